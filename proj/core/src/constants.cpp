#include "fracsob/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace fracsob {

namespace {

constexpr double kPi = std::numbers::pi;

// p * log((alpha - 1) / p), shared by every L_alpha shape.
double log_prefactor(double alpha, double p) { return p * std::log((alpha - 1.0) / p); }

void check_alpha_p(const char* who, double alpha, double p) {
  if (!(alpha > 1.0)) throw DomainError(std::string(who) + ": alpha must exceed 1");
  if (!(p > alpha)) throw DomainError(std::string(who) + ": p must exceed alpha");
}

}  // namespace

double sharp_constant_K(int n, double s) {
  if (n < 1) throw DomainError("sharp_constant_K: dimension must be >= 1");
  if (!(s > 0.0 && s < n)) throw DomainError("sharp_constant_K: s must lie in (0, n)");
  const double a = 0.5 * s * std::log(kPi) + log_gamma(0.5 * (n - s)) - log_gamma(0.5 * (n + s));
  const double b = (s / n) * (log_gamma(static_cast<double>(n)) - log_gamma(0.5 * n));
  return std::exp(a + b);
}

double K_asymptote(int n, double s) {
  if (n < 1) throw DomainError("K_asymptote: dimension must be >= 1");
  if (!(s > 0.0 && s < n)) throw DomainError("K_asymptote: s must lie in (0, n)");
  return sphere_area(n) / (n - s);
}

double sobolev_q(double p, int n, double s) {
  if (n < 1 || !(s > 0.0 && s < n)) throw DomainError("sobolev_q: need 0 < s < n");
  if (!(p > 1.0) || !(s * p < n)) throw DomainError("sobolev_q: need 1 < p < n/s");
  return p * n / (n - s * p);
}

double inverse_p(double q, int n, double s) {
  if (n < 1 || !(s > 0.0 && s < n)) throw DomainError("inverse_p: need 0 < s < n");
  if (!(q > n / (n - s))) throw DomainError("inverse_p: need q > n/(n-s)");
  return q * n / (n + q * s);
}

ExponentPair exponent_pair(double p, int n, double s) { return {p, sobolev_q(p, n, s), n, s}; }

QuadResult L_alpha(double alpha, double p, double tol) {
  check_alpha_p("L_alpha", alpha, p);
  const double e = (alpha - 1.0) / p;
  const double delta = p - alpha;

  // r in [1/2, 1): with d = 1 - r = u^{1/delta} the integrand tends to a
  // constant at u = 0, whatever the steepness of (1 - r)^{p-1-alpha}.
  const double u_max = std::pow(0.5, delta);
  auto near_one = [&](double u) {
    if (u <= 0.0) return std::pow(e, p) / delta;
    const double d = std::pow(u, 1.0 / delta);
    // num^p / d^{1+alpha} * dd/du collapses to (num / d)^p / delta, where
    // num / d = (1 - (1-d)^e) / d = e (1 + (1-e) d / 2 + ...).
    const double ratio = d < 1e-8 ? e * (1.0 + 0.5 * (1.0 - e) * d) : -std::expm1(e * std::log1p(-d)) / d;
    return std::pow(ratio, p) / delta;
  };
  QuadOptions q;
  q.rel_tol = tol;
  q.abs_tol = 0.0;
  q.max_intervals = 8000;
  const QuadResult a = integrate_1d(near_one, 0.0, u_max, q);

  // r in (0, 1/2] with r = exp(-w).
  auto near_zero = [&](double w) {
    const double num = -std::expm1(-e * w);
    return std::pow(num, p) * std::exp(-w) * std::pow(-std::expm1(-w), -1.0 - alpha);
  };
  HalflineOptions h;
  h.rel_tol = tol;
  h.abs_tol = 0.0;
  h.scale = std::max(1.0, p);
  h.max_intervals = 8000;
  const QuadResult b = integrate_halfline(near_zero, std::log(2.0), h);
  return {a.value + b.value, a.error_estimate + b.error_estimate, a.evaluations + b.evaluations};
}

double case_A_asymptote(double alpha, double p) {
  check_alpha_p("case_A_asymptote", alpha, p);
  return std::exp(log_prefactor(alpha, p) - std::log(p - alpha));
}

double case_B_asymptote(double alpha, double p) {
  check_alpha_p("case_B_asymptote", alpha, p);
  return std::exp(log_prefactor(alpha, p) + log_gamma(p + 1.0));
}

CaseCBounds case_C_bounds(double alpha, double p, double delta) {
  check_alpha_p("case_C_bounds", alpha, p);
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("case_C_bounds: delta must lie in (0, 1)");
  const double lp = log_prefactor(alpha, p);
  const double lg = log_gamma(p + 1.0);
  const double one_minus = std::log1p(-delta);
  const double first = std::exp(lp + lg - (1.0 + alpha) * one_minus);
  const double second =
      std::exp(lp + p * std::log(std::fabs(std::log(delta))) - p * one_minus - std::log(p - alpha));
  const double lower = std::exp(lp + lg) + std::exp(lp - std::log(p - alpha));
  return {delta, first + second, lower};
}

double empirical_c_alpha(double alpha, const double* p_begin, const double* p_end) {
  if (p_begin == p_end) throw DomainError("empirical_c_alpha: empty p list");
  double best = std::numeric_limits<double>::infinity();
  for (const double* it = p_begin; it != p_end; ++it) {
    const double p = *it;
    const double ratio = L_alpha(alpha, p).value / case_C_bounds(alpha, p).lower_shape;
    best = std::min(best, std::pow(ratio, 1.0 / p));
  }
  return best;
}

double D_alpha_n(double alpha, int n, double p, double tol) {
  if (n < 1) throw DomainError("D_alpha_n: dimension must be >= 1");
  check_alpha_p("D_alpha_n", alpha, p);
  const double pre = 2.0 * std::exp(0.5 * (n - 1) * std::log(kPi) + log_gamma(0.5 * (1.0 + alpha)) -
                                    log_gamma(0.5 * (n + alpha)));
  return pre * L_alpha(alpha, p, tol).value;
}

double g_alpha_n(double alpha, int n, double p, double tol) {
  return std::pow(D_alpha_n(alpha, n, p, tol), -1.0 / p);
}

std::pair<double, double> Z_bounds(int n, double s, double p) {
  if (n < 1) throw DomainError("Z_bounds: dimension must be >= 1");
  if (!(s > 0.0 && s < 1.0)) throw DomainError("Z_bounds: s must lie in (0, 1)");
  if (!(p >= 1.0)) throw DomainError("Z_bounds: p must be >= 1");
  const double sp = s * p;
  const double omega = sphere_area(n);
  const double common = std::log(omega) * (1.0 + sp / n) - std::log(sp);
  const double upper = std::exp(common - (sp / n) * std::log(static_cast<double>(n)));
  return {upper / n, upper};
}

QuadResult Z_attainment(int n, double s, double p) {
  if (n < 1) throw DomainError("Z_attainment: dimension must be >= 1");
  if (!(s > 0.0 && s < 1.0) || !(p >= 1.0)) throw DomainError("Z_attainment: need s in (0,1), p >= 1");
  const double sp = s * p;
  const double omega = sphere_area(n);
  // omega_n \int_1^inf r^{n-1} r^{-(n+sp)} dr
  auto f = [&](double r) { return omega * std::pow(r, -1.0 - sp); };
  HalflineOptions h;
  h.rel_tol = 1e-12;
  h.abs_tol = 0.0;
  h.decay_power = 1.0 + sp;
  const QuadResult r = integrate_halfline(f, 1.0, h);
  const double ball = std::pow(ball_volume(n), sp / n);
  return {r.value * ball, r.error_estimate * ball, r.evaluations};
}

}  // namespace fracsob
