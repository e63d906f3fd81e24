// Slobodetskii and delta seminorms.
//
// Both are \iint |u(x) - u(y)|^p |x - y|^{-kappa} over D^2 with kappa = n + sp
// or n + alpha. In one dimension we write y = x + h and integrate
// 2 \int_0^inf h^{-kappa} F(h) dh, F(h) = \int |u(x+h) - u(x)|^p dx over the
// x for which both points lie in D. In two and three dimensions the same
// (x, h) split is sampled by randomized QMC.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "fracsob/norms.hpp"

namespace fracsob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = std::numbers::pi;

struct Window {
  double lo;
  double hi;
};

// Region of x for which x and x + h both lie in the domain, for h > 0.
Window pair_window(const std::optional<ConvexDomain>& domain, double h) {
  if (!domain) return {-kInf, kInf};
  if (domain->kind() == ConvexDomain::Kind::half_line) return {0.0, kInf};
  return {-1.0, 1.0 - h};
}

double effective_support(const TestFunction& u) {
  if (u.family() == Family::gaussian) return 7.5 * u.length_scale();
  return u.support_radius();
}

NormResult seminorm_1d(const TestFunction& u, double p, double kappa, const std::optional<ConvexDomain>& domain,
                       const NormOptions& opts) {
  const double m = u.sup_abs();
  const double ell = u.length_scale();
  const double c = u.centre();
  const double S = u.support_radius();
  const bool bounded = std::isfinite(S);
  const bool ball = domain && domain->kind() == ConvexDomain::Kind::unit_ball;
  const double tol = opts.rel_tol;

  auto diff = [&](double x, double h) {
    const double a = u.evaluate(std::fabs(x + h - c));
    const double b = u.evaluate(std::fabs(x - c));
    return std::pow(std::fabs(a - b) / m, p);
  };

  auto F = [&](double h) {
    Window w = pair_window(domain, h);
    if (bounded) {
      w.lo = std::max(w.lo, c - S - h);
      w.hi = std::min(w.hi, c + S);
    }
    if (!(w.hi > w.lo)) return 0.0;
    QuadOptions q;
    q.rel_tol = 0.1 * tol;
    q.abs_tol = 1e-3 * tol * ell * std::min(1.0, std::pow(h / ell, p));
    q.max_intervals = 4000;
    for (double b : {c - S - h, c - S, c + S - h, c + S, c - 0.5 * h, c, c - h})
      if (b > w.lo && b < w.hi) q.breakpoints.push_back(b);
    auto g = [&](double x) { return diff(x, h); };
    if (std::isfinite(w.lo) && std::isfinite(w.hi)) return integrate_1d(g, w.lo, w.hi, q).value;
    // Unbounded profile: split around the centre and hand the ends to the half-line rule.
    const double lo = std::isfinite(w.lo) ? w.lo : c - h - 16.0 * ell;
    const double hi = c + 16.0 * ell;
    std::erase_if(q.breakpoints, [&](double b) { return b <= lo || b >= hi; });
    double total = integrate_1d(g, lo, hi, q).value;
    HalflineOptions t;
    t.rel_tol = q.rel_tol;
    t.abs_tol = q.abs_tol;
    t.scale = 16.0 * ell;
    t.decay_power = u.decay_power() * p;
    total += integrate_halfline(g, hi, t).value;
    if (!std::isfinite(w.lo)) total += integrate_halfline([&](double y) { return g(-y); }, -lo, t).value;
    return total;
  };

  auto outer = [&](double h) { return F(h) * std::pow(h, -kappa); };
  const double gamma = p - kappa;
  if (!(gamma > -1.0)) return NormResult::infinite(NormMethod::product_quadrature);

  // Below hs the differences drown in rounding, so F(h) / h^p is replaced by
  // the quadratic through three samples and integrated against h^{p-kappa}.
  const double hs = 1e-4 * ell;
  const double R1 = F(hs) / std::pow(hs, p);
  const double R2 = F(0.5 * hs) / std::pow(0.5 * hs, p);
  const double R4 = F(0.25 * hs) / std::pow(0.25 * hs, p);
  const double c2 = (R1 - 3.0 * R2 + 2.0 * R4) * 8.0 / (3.0 * hs * hs);
  const double c1 = (R2 - R4) * 4.0 / hs - 0.75 * c2 * hs;
  const double c0 = R4 - 0.25 * c1 * hs - c2 * hs * hs / 16.0;
  const double small = c0 * std::pow(hs, gamma + 1.0) / (gamma + 1.0) +
                       c1 * std::pow(hs, gamma + 2.0) / (gamma + 2.0) +
                       c2 * std::pow(hs, gamma + 3.0) / (gamma + 3.0);
  const double small_err = std::fabs(c2) * std::pow(hs, gamma + 3.0) / (gamma + 3.0) + tol * std::fabs(small);

  const double h0 = 0.1 * ell;
  QuadOptions q;
  q.rel_tol = tol;
  q.abs_tol = 1e-9 * tol * std::pow(ell, 2.0 - kappa);
  q.max_intervals = 4000;
  for (double b = 1e-3 * ell; b < h0; b *= 10.0) q.breakpoints.push_back(b);
  QuadResult near = integrate_1d(outer, hs, h0, q);
  near.value += small;
  near.error_estimate += small_err;

  double H = kInf;
  if (ball) H = 2.0;
  else if (bounded) H = domain ? std::max(h0, c + S) : std::max(h0, 2.0 * S);
  QuadResult mid;
  double tail = 0.0;
  if (std::isfinite(H)) {
    q.breakpoints = {};
    for (double b : {ell, 2.0 * ell, 4.0 * ell, S, 2.0 * S, c - S, c + S})
      if (b > h0 && b < H) q.breakpoints.push_back(b);
    if (H > h0) mid = integrate_1d(outer, h0, H, q);
    if (!ball) {
      // Supports are disjoint beyond H: F(h) = |u|_p^p over the admissible x.
      const double mass = std::pow(m, -p) * [&] {
        NormOptions o = opts;
        if (!domain) return std::pow(lp_norm(u, p, o).value, p);
        auto g = [&](double x) { return std::pow(std::fabs(u.evaluate(std::fabs(x - c))), p); };
        QuadOptions qq;
        qq.rel_tol = 0.1 * tol;
        qq.abs_tol = 0.0;
        qq.breakpoints = {c};
        std::erase_if(qq.breakpoints, [&](double b) { return b <= std::max(0.0, c - S); });
        return integrate_1d(g, std::max(0.0, c - S), c + S, qq).value;
      }();
      const double copies = domain ? 1.0 : 2.0;
      tail = copies * mass * std::pow(H, 1.0 - kappa) / (kappa - 1.0);
    }
  } else {
    HalflineOptions t;
    t.rel_tol = tol;
    t.abs_tol = q.abs_tol;
    t.scale = std::max(h0, 4.0 * ell);
    t.decay_power = kappa;
    mid = integrate_halfline(outer, h0, t);
  }

  const double total = 2.0 * (near.value + mid.value + tail);
  const double err = 2.0 * (near.error_estimate + mid.error_estimate) + tol * total;
  if (total <= 0.0) return {0.0, 0.0, NormMethod::product_quadrature, false};
  const double value = m * std::pow(total, 1.0 / p);
  return {value, value * err / (p * total), NormMethod::product_quadrature, false};
}

// Unit direction from a point of [0,1]^{n-1}.
void direction(int n, const double* a, double* out) {
  if (n == 2) {
    out[0] = std::cos(2.0 * kPi * a[0]);
    out[1] = std::sin(2.0 * kPi * a[0]);
    return;
  }
  const double z = 2.0 * a[1] - 1.0;
  const double w = std::sqrt(std::max(0.0, 1.0 - z * z));
  out[0] = z;
  out[1] = w * std::cos(2.0 * kPi * a[0]);
  out[2] = w * std::sin(2.0 * kPi * a[0]);
}

NormResult seminorm_qmc(const TestFunction& u, double p, double kappa, const std::optional<ConvexDomain>& domain,
                        const NormOptions& opts) {
  const int n = u.dimension();
  if (n > 3) throw UnsupportedDimension("seminorm: dimensions above 3 are not supported");
  const double S = effective_support(u);
  if (!std::isfinite(S)) throw UnsupportedDimension("seminorm: unbounded profiles are only supported in one dimension");
  const double m = u.sup_abs();
  const double ell = u.length_scale();
  const double c = u.centre();
  const double a = n - kappa + p;  // integrand ~ rho^{a-1} near 0
  const double b = kappa - n;      // and ~ rho^{-b-1} at infinity
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("seminorm: exponent outside the integrable range");
  const double rho0 = ell;
  const double omega = sphere_area(n);

  // Coordinates: x in the cube [c - S, c + S] x [-S, S]^{n-1}, then v, then the direction.
  std::vector<Interval> box;
  for (int i = 0; i < n; ++i) box.emplace_back(i == 0 ? c - S : -S, i == 0 ? c + S : S);
  box.emplace_back(0.0, 1.0);
  for (int i = 0; i < n - 1; ++i) box.emplace_back(0.0, 1.0);

  auto in_support = [&](const double* x) {
    double r2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = i == 0 ? x[i] - c : x[i];
      r2 += d * d;
    }
    return r2 < S * S;
  };

  auto f = [&](std::span<const double> z) -> double {
    const double* x = z.data();
    if (!in_support(x)) return 0.0;
    if (domain && !domain->contains(std::span<const double>(x, n))) return 0.0;
    const double v = std::clamp(z[n], 1e-300, 1.0 - 1e-16);
    const double rho = rho0 * std::pow(v, 1.0 / a) * std::pow(1.0 - v, -1.0 / b);
    if (!std::isfinite(rho) || rho == 0.0) return 0.0;
    const double jac = rho * (1.0 / (a * v) + 1.0 / (b * (1.0 - v)));
    std::array<double, 3> dir{};
    std::array<double, 3> y{};
    direction(n, z.data() + n + 1, dir.data());
    for (int i = 0; i < n; ++i) y[i] = x[i] + rho * dir[i];
    const std::span<const double> ys(y.data(), n);
    if (domain && !domain->contains(ys)) return 0.0;
    const double weight = in_support(y.data()) ? 1.0 : 2.0;
    const double d = std::fabs(u.at(ys) - u.at(std::span<const double>(x, n))) / m;
    if (d == 0.0) return 0.0;
    return weight * std::pow(d, p) * std::pow(rho, n - 1 - kappa) * jac * omega;
  };

  const QuadResult r = integrate_qmc(f, box, opts.qmc);
  if (r.value <= 0.0) return {0.0, r.error_estimate, NormMethod::qmc, false};
  const double value = m * std::pow(r.value, 1.0 / p);
  const double err = value * r.error_estimate / (p * r.value);
  return {value, err, NormMethod::qmc, err > opts.qmc_target * value};
}

NormResult seminorm(const TestFunction& u, double p, double kappa, const std::optional<ConvexDomain>& domain,
                    const NormOptions& opts) {
  if (domain && domain->dimension() != u.dimension()) throw DomainError("seminorm: dimension mismatch");
  if (u.is_zero()) return {0.0, 0.0, u.dimension() == 1 ? NormMethod::product_quadrature : NormMethod::qmc, false};
  if (u.dimension() == 1) return seminorm_1d(u, p, kappa, domain, opts);
  return seminorm_qmc(u, p, kappa, domain, opts);
}

}  // namespace

NormResult slobodetskii_norm(const TestFunction& u, double s, double p, const std::optional<ConvexDomain>& domain,
                             const NormOptions& opts) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("slobodetskii_norm: s must lie in (0, 1)");
  if (!(p >= 1.0)) throw DomainError("slobodetskii_norm: p must be >= 1");
  return seminorm(u, p, u.dimension() + s * p, domain, opts);
}

NormResult delta_seminorm(const TestFunction& f, double p, const ConvexDomain& domain, double alpha,
                          const NormOptions& opts) {
  if (!(alpha > 1.0 && alpha < p)) throw DomainError("delta_seminorm: alpha must lie in (1, p)");
  return seminorm(f, p, f.dimension() + alpha, domain, opts);
}

}  // namespace fracsob
