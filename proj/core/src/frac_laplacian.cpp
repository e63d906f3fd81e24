#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <unordered_map>
#include <vector>

#include "fracsob/norms.hpp"

namespace fracsob {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kFarTerms = 12;

}  // namespace

double frac_laplacian_constant(int n, double s) {
  if (n < 1) throw DomainError("frac_laplacian_constant: dimension must be >= 1");
  if (!(s > 0.0 && s < 2.0)) throw DomainError("frac_laplacian_constant: order must lie in (0, 2)");
  // s 2^{s-1} Gamma((n+s)/2) / (pi^{n/2} Gamma(1 - s/2))
  return s * std::exp((s - 1.0) * std::log(2.0) + log_gamma(0.5 * (n + s)) - 0.5 * n * std::log(kPi) -
                      log_gamma(1.0 - 0.5 * s));
}

struct RadialProfile::Impl {
  explicit Impl(TestFunction f) : u(std::move(f)) {}

  TestFunction u;
  double s = 0.0;
  int n = 1;
  LaplacianRoute route = LaplacianRoute::real_space;
  double rel_tol = 1e-10;
  double ell = 1.0;
  double magnitude = 0.0;
  double decay = 0.0;
  double far = kInf;
  std::vector<double> far_coeffs;  // g(r) ~ sum_k far_coeffs[k] r^{-(n+s)-2k}
  double rho_max = 0.0;            // spectral cut-off

  mutable std::mutex mutex;
  mutable std::unordered_map<double, double> memo;

  double value(double r) const;
  double spectral(double r) const;
  double real_space(double r) const;
  double far_field(double r) const;
  double spherical_mean(double r, double t) const;
  double deficit(double r, double ur, double t) const;
  double abs_floor(double r) const {
    const double decayed = r > ell ? std::pow(ell / r, n + s) : 1.0;
    return 1e-3 * rel_tol * magnitude * decayed;
  }
};

double RadialProfile::Impl::far_field(double r) const {
  double sum = 0.0;
  const double inv2 = 1.0 / (r * r);
  double power = std::pow(r, -(n + s));
  for (double c : far_coeffs) {
    sum += c * power;
    power *= inv2;
  }
  return sum;
}

double RadialProfile::Impl::spherical_mean(double r, double t) const {
  switch (n) {
    case 1:
      return 0.5 * (u.evaluate(r + t) + u.evaluate(std::fabs(r - t)));
    case 3: {
      if (r == 0.0) return u.evaluate(t);
      return u.shell_integral_about(r, t) / (2.0 * r * t);
    }
    default: {
      // Mean over the circle |y - x| = t, |x| = r.
      auto f = [&](double theta) {
        const double d2 = r * r + t * t + 2.0 * r * t * std::cos(theta);
        return u.evaluate(std::sqrt(std::max(d2, 0.0)));
      };
      QuadOptions q;
      q.rel_tol = 0.1 * rel_tol;
      q.abs_tol = 1e-3 * rel_tol * u.sup_abs();
      return integrate_1d(f, 0.0, kPi, q).value / kPi;
    }
  }
}

// u(r) - M(r, t). For short shells in R^3 the shell endpoints r +- t lose
// the width 2t to rounding, so integrate the symmetric difference instead.
double RadialProfile::Impl::deficit(double r, double ur, double t) const {
  if (n == 3 && t < r && t < 0.05 * ell) {
    auto g = [&](double tau) { return (r + tau) * u.evaluate(r + tau) + (r - tau) * u.evaluate(r - tau) - 2.0 * r * ur; };
    return -gauss_legendre20(g, 0.0, t) / (2.0 * r * t);
  }
  return ur - spherical_mean(r, t);
}

double RadialProfile::Impl::real_space(double r) const {
  const double ur = u.evaluate(r);
  auto deficit = [&](double t) { return this->deficit(r, ur, t); };

  if (s == 2.0) {
    // -Delta u = 2n lim (u - M(t)) / t^2, Richardson in t.
    const double h = 1e-2 * ell;
    const double coarse = 2.0 * n * deficit(h) / (h * h);
    const double fine = 2.0 * n * deficit(0.5 * h) / (0.25 * h * h);
    return (4.0 * fine - coarse) / 3.0;
  }

  const double c = sphere_area(n) * frac_laplacian_constant(n, s);
  const double t0 = 1e-3 * ell;
  // u - M(t) = a t^2 + b t^4 + ... on [0, t0]; fit a, b from t0 and t0/2.
  const double a2 = deficit(t0) / (t0 * t0);
  const double a1 = deficit(0.5 * t0) / (0.25 * t0 * t0);
  const double b = (a2 - a1) / (0.75 * t0 * t0);
  const double a = a2 - b * t0 * t0;
  double total = a * std::pow(t0, 2.0 - s) / (2.0 - s) + b * std::pow(t0, 4.0 - s) / (4.0 - s);

  const double support = u.support_radius();
  const bool bounded = std::isfinite(support);
  const double top = bounded ? r + support : r + 20.0 * ell;

  QuadOptions q;
  q.rel_tol = rel_tol;
  // The pieces below cancel down to g(r); their size is set by u(r).
  q.abs_tol = std::max(abs_floor(r), 1e-2 * rel_tol * std::fabs(ur) * std::pow(ell, -s)) / c;
  q.max_intervals = 8000;
  q.breakpoints = {r};
  for (double k : {0.25, 1.0, 3.0, 8.0}) {
    q.breakpoints.push_back(r + k * ell);
    q.breakpoints.push_back(r - k * ell);
    q.breakpoints.push_back(k * ell);
  }
  if (bounded && u.family() == Family::bump) {
    for (double k : {0.9, 0.99, 1.0})
      for (double t : {k * support - r, r - k * support, r + k * support}) q.breakpoints.push_back(t);
  }
  auto integrand = [&](double t) { return deficit(t) * std::pow(t, -1.0 - s); };
  total += integrate_1d(integrand, t0, top, q).value;

  // Beyond `top` the mean M vanishes for bounded support.
  total += ur * std::pow(top, -s) / s;
  if (!bounded) {
    HalflineOptions h;
    h.rel_tol = rel_tol;
    h.abs_tol = q.abs_tol;
    h.scale = top;
    h.decay_power = u.decay_power() + 1.0 + s;
    auto mean_part = [&](double t) { return spherical_mean(r, t) * std::pow(t, -1.0 - s); };
    total -= integrate_halfline(mean_part, top, h).value;
  }
  return c * total;
}

double RadialProfile::Impl::spectral(double r) const {
  auto uhat = [&](double rho) { return fourier_radial(u, rho); };
  std::function<double(double)> integrand;
  double prefactor = 1.0;
  switch (n) {
    case 1:
      prefactor = 1.0 / kPi;
      integrand = [&](double rho) { return std::pow(rho, s) * uhat(rho) * std::cos(rho * r); };
      break;
    case 2:
      prefactor = 1.0 / (2.0 * kPi);
      integrand = [&](double rho) { return std::pow(rho, s + 1.0) * uhat(rho) * bessel_j0(rho * r); };
      break;
    default:
      if (r == 0.0) {
        prefactor = 1.0 / (2.0 * kPi * kPi);
        integrand = [&](double rho) { return std::pow(rho, s + 2.0) * uhat(rho); };
      } else {
        prefactor = 1.0 / (2.0 * kPi * kPi * r);
        integrand = [&](double rho) { return std::pow(rho, s + 1.0) * uhat(rho) * std::sin(rho * r); };
      }
      break;
  }
  QuadOptions q;
  q.rel_tol = rel_tol;
  // Oscillation cancels to g(r) from terms of size |u^(0)| / ell^{s+k}; the
  // rounding floor of that sum bounds what any tolerance can deliver. The
  // phase rho * r carries rounding proportional to r as well.
  const double k = n == 1 ? 1.0 : (n == 3 && r == 0.0 ? 3.0 : 2.0);
  const double noise =
      1e-14 * std::fabs(fourier_radial(u, 0.0)) * std::pow(ell, -(s + k)) * std::max(1.0, r / ell);
  q.abs_tol = std::max(abs_floor(r) / prefactor, noise);
  q.max_intervals = 20000;
  if (r > 0.0) {
    const double period = kPi / r;
    const int cuts = static_cast<int>(std::min(2000.0, rho_max / period));
    for (int k = 1; k <= cuts; ++k) q.breakpoints.push_back(k * period);
  }
  for (double k : {0.5, 1.0, 2.0, 4.0}) q.breakpoints.push_back(k / ell);
  return prefactor * integrate_1d(integrand, 0.0, rho_max, q).value;
}

double RadialProfile::Impl::value(double r) const {
  if (u.is_zero()) return 0.0;
  if (r >= far) return far_field(r);
  {
    std::lock_guard lock(mutex);
    if (auto it = memo.find(r); it != memo.end()) return it->second;
  }
  const double v = route == LaplacianRoute::spectral ? spectral(r) : real_space(r);
  std::lock_guard lock(mutex);
  memo.emplace(r, v);
  return v;
}

double RadialProfile::operator()(double r) const {
  if (!(r >= 0.0)) throw DomainError("RadialProfile: radius must be >= 0");
  return impl_->value(r);
}
int RadialProfile::dimension() const { return impl_->n; }
double RadialProfile::order() const { return impl_->s; }
LaplacianRoute RadialProfile::route() const { return impl_->route; }
double RadialProfile::decay_power() const { return impl_->decay; }
double RadialProfile::length_scale() const { return impl_->ell; }
double RadialProfile::magnitude() const { return impl_->magnitude; }
double RadialProfile::far_radius() const { return impl_->far; }
double RadialProfile::value_tolerance() const { return impl_->rel_tol; }

RadialProfile apply_frac_laplacian(const TestFunction& u, double s, const FracLaplacianOptions& opts) {
  const int n = u.dimension();
  if (n < 1 || n > 3) throw UnsupportedDimension("apply_frac_laplacian: supported dimensions are 1, 2, 3");
  if (!(s > 0.0 && s <= 2.0)) throw DomainError("apply_frac_laplacian: order must lie in (0, 2]");

  auto impl = std::make_shared<RadialProfile::Impl>(u.shifted(0.0));
  impl->s = s;
  impl->n = n;
  impl->rel_tol = opts.rel_tol;
  impl->ell = u.length_scale();
  impl->magnitude = u.sup_abs() * std::pow(impl->ell, -s);

  const bool closed_form = u.family() == Family::gaussian;
  LaplacianRoute route = opts.route;
  if (route == LaplacianRoute::automatic) route = closed_form ? LaplacianRoute::spectral : LaplacianRoute::real_space;
  if (route == LaplacianRoute::real_space && s == 2.0 && !std::isfinite(u.support_radius()))
    throw DomainError("apply_frac_laplacian: s = 2 needs a rapidly decaying function");
  impl->route = route;

  const double beta = u.decay_power();
  impl->decay = s == 2.0 ? kInf : std::min(beta, static_cast<double>(n)) + s;

  if (route == LaplacianRoute::spectral) {
    if (u.decay_power() <= n)
      throw DomainError("apply_frac_laplacian: spectral route needs an integrable function");
    if (closed_form) {
      impl->rho_max = 12.0 / impl->ell;
    } else {
      // Walk out until |xi|^{s+n} |u^| is negligible.
      const double ref = std::fabs(fourier_radial(impl->u, 0.0));
      double rho = 8.0 / impl->ell;
      while (rho < 4096.0 / impl->ell &&
             std::fabs(fourier_radial(impl->u, rho)) * std::pow(rho * impl->ell, s + n) > 1e-14 * ref)
        rho *= 1.5;
      impl->rho_max = rho;
    }
  }

  // Multipole far field, when enough moments exist.
  if (s < 2.0 && !u.is_zero()) {
    std::vector<double> moments;
    for (int k = 0; k < kFarTerms; ++k) {
      auto m = impl->u.even_moment(k);
      if (!m) break;
      moments.push_back(*m);
    }
    if (static_cast<int>(moments.size()) == kFarTerms && std::isfinite(u.support_radius())) {
      const double c = frac_laplacian_constant(n, s);
      double factor = -c;
      for (int k = 0; k < kFarTerms; ++k) {
        impl->far_coeffs.push_back(moments[k] * factor);
        // Delta^{k+1}|x|^{-a} / (2^{k+1} (k+1)! prod (n + 2j)) recursion.
        const double a = n + s + 2.0 * k;
        factor *= a * (s + 2.0 + 2.0 * k) / (2.0 * (k + 1) * (n + 2.0 * k));
      }
      impl->far = u.family() == Family::gaussian ? 30.0 * impl->ell : 4.0 * u.support_radius();
    }
  }

  RadialProfile g;
  g.impl_ = std::move(impl);
  return g;
}

}  // namespace fracsob
