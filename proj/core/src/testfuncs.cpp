#include "fracsob/testfuncs.hpp"

#include <atomic>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace fracsob {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
// exp(-x^2/2) < 1e-300 for x > kGaussCut
constexpr double kGaussCut = 37.2;

std::string fmt17(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

// e^{-V}/V - E1(V); positive and decreasing, -> 0 as V -> inf.
double bump_h(double v) {
  if (v > 700.0) return 0.0;
  const double e1 = -std::expint(-v);
  return std::exp(-v) / v - e1;
}

// Wynn epsilon extrapolation of a sequence of partial sums.
double wynn_epsilon(const std::vector<double>& s) {
  const std::size_t m = s.size();
  if (m < 3) return s.back();
  std::vector<std::vector<double>> e(m + 1, std::vector<double>(m + 1, 0.0));
  for (std::size_t i = 0; i < m; ++i) e[i][1] = s[i];
  double best = s.back();
  for (std::size_t k = 2; k <= m; ++k) {
    for (std::size_t i = 0; i + k <= m; ++i) {
      const double d = e[i + 1][k - 1] - e[i][k - 1];
      if (d == 0.0) return e[i + 1][k - 1];
      e[i][k] = e[i + 1][k - 2] + 1.0 / d;
    }
    if (k % 2 == 1) best = e[m - k][k];
  }
  return best;
}

}  // namespace

std::string to_string(Family f) {
  switch (f) {
    case Family::gaussian:
      return "gaussian";
    case Family::bubble:
      return "bubble";
    case Family::bump:
      return "bump";
    case Family::custom_radial:
      return "custom-radial";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  if (name == "gaussian") return Family::gaussian;
  if (name == "bubble") return Family::bubble;
  if (name == "bump") return Family::bump;
  if (name == "custom-radial") return Family::custom_radial;
  throw DomainError("unknown test-function family '" + name + "'");
}

TestFunction TestFunction::gaussian(int n, double sigma) {
  if (n < 1) throw DomainError("gaussian: dimension must be >= 1");
  if (!(sigma > 0.0)) throw DomainError("gaussian: sigma must be positive");
  TestFunction u;
  u.family_ = Family::gaussian;
  u.n_ = n;
  u.param_ = sigma;
  u.name_ = "gaussian";
  return u;
}

TestFunction TestFunction::bubble(int n, double beta) {
  if (n < 1) throw DomainError("bubble: dimension must be >= 1");
  if (!(beta > 0.0)) throw DomainError("bubble: beta must be positive");
  TestFunction u;
  u.family_ = Family::bubble;
  u.n_ = n;
  u.param_ = beta;
  u.name_ = "bubble";
  return u;
}

TestFunction TestFunction::bump(int n, double radius) {
  if (n < 1) throw DomainError("bump: dimension must be >= 1");
  if (!(radius > 0.0)) throw DomainError("bump: radius must be positive");
  TestFunction u;
  u.family_ = Family::bump;
  u.n_ = n;
  u.param_ = radius;
  u.name_ = "bump";
  return u;
}

TestFunction TestFunction::custom(int n, std::string name, RealFunction profile, CustomTraits traits) {
  static std::atomic<unsigned long> counter{0};
  if (n < 1) throw DomainError("custom: dimension must be >= 1");
  if (!profile) throw DomainError("custom: empty profile");
  if (!(traits.length_scale > 0.0)) throw DomainError("custom: length scale must be positive");
  TestFunction u;
  u.family_ = Family::custom_radial;
  u.n_ = n;
  u.param_ = 0.0;
  u.name_ = std::move(name) + "#" + std::to_string(counter.fetch_add(1));
  u.custom_ = std::make_shared<const RealFunction>(std::move(profile));
  u.traits_ = traits;
  return u;
}

TestFunction TestFunction::zero(int n) { return bump(n, 1.0).scaled(0.0); }

double TestFunction::unit_profile(double x) const {
  switch (family_) {
    case Family::gaussian: {
      const double z = x / param_;
      return std::exp(-0.5 * z * z);
    }
    case Family::bubble:
      return std::pow(1.0 + x * x, -0.5 * param_);
    case Family::bump: {
      const double z = x / param_;
      if (z >= 1.0) return 0.0;
      return std::exp(-1.0 / (1.0 - z * z));
    }
    case Family::custom_radial:
      return (*custom_)(x);
  }
  return 0.0;
}

double TestFunction::evaluate(double r) const {
  if (amplitude_ == 0.0) return 0.0;
  return amplitude_ * unit_profile(lambda_ * r);
}

double TestFunction::at(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw DomainError("TestFunction::at: point has wrong dimension");
  double r2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = i == 0 ? x[i] - centre_ : x[i];
    r2 += d * d;
  }
  return evaluate(std::sqrt(r2));
}

double TestFunction::shell_integral(double a, double b) const {
  if (!(a >= 0.0) || b < a) throw DomainError("shell_integral: need 0 <= a <= b");
  if (amplitude_ == 0.0 || a == b) return 0.0;
  const double scale = std::max(length_scale(), 1e-300);
  // Short shells: direct Gauss-Legendre is exact to rounding and avoids
  // cancellation between antiderivative values.
  if (b - a < 0.05 * scale || family_ == Family::custom_radial) {
    auto g = [&](double rho) { return evaluate(rho) * rho; };
    if (b - a < 0.05 * scale) return gauss_legendre20(g, a, b);
    QuadOptions q;
    q.rel_tol = 1e-12;
    q.abs_tol = 1e-300;
    const double top = std::min(b, support_radius());
    if (top <= a) return 0.0;
    return integrate_1d(g, a, top, q).value;
  }
  return closed_shell(lambda_ * a, lambda_ * lambda_ * (b - a) * (b + a));
}

double TestFunction::shell_integral_about(double r, double t) const {
  if (!(r >= 0.0) || !(t >= 0.0)) throw DomainError("shell_integral_about: need r, t >= 0");
  if (amplitude_ == 0.0 || r == 0.0 || t == 0.0) return 0.0;
  const double scale = std::max(length_scale(), 1e-300);
  // Parametrise about the midpoint so the width is exact.
  const double mid = std::max(r, t);
  const double half = std::min(r, t);
  if (2.0 * half < 0.05 * scale || family_ == Family::custom_radial) {
    auto g = [&](double tau) { return evaluate(mid + tau) * (mid + tau); };
    if (2.0 * half < 0.05 * scale) return gauss_legendre20(g, -half, half);
    return shell_integral(mid - half, mid + half);
  }
  return closed_shell(lambda_ * (mid - half), lambda_ * lambda_ * 4.0 * r * t);
}

// \int_a^b rho phi(lambda rho) d rho in scaled variables: la = lambda a,
// gap = (lambda b)^2 - (lambda a)^2 supplied separately to keep it exact.
double TestFunction::closed_shell(double la, double gap) const {
  const double lb = std::sqrt(la * la + gap);
  const double factor = amplitude_ / (lambda_ * lambda_);
  switch (family_) {
    case Family::gaussian: {
      const double s2 = param_ * param_;
      const double ea = -0.5 * la * la / s2;
      return factor * s2 * std::exp(ea) * -std::expm1(-0.5 * gap / s2);
    }
    case Family::bubble: {
      const double ratio = std::log1p(gap / (1.0 + la * la));
      if (param_ == 2.0) return factor * 0.5 * ratio;
      const double c = 1.0 - 0.5 * param_;
      return factor * std::pow(1.0 + la * la, c) * std::expm1(c * ratio) / (2.0 - param_);
    }
    case Family::bump: {
      const double radius = param_;
      auto vol = [&](double x) {
        const double z = x / radius;
        return z >= 1.0 ? kInf : 1.0 / (1.0 - z * z);
      };
      const double va = vol(la);
      const double vb = vol(lb);
      const double ha = std::isinf(va) ? 0.0 : bump_h(va);
      const double hb = std::isinf(vb) ? 0.0 : bump_h(vb);
      return factor * radius * radius * 0.5 * (ha - hb);
    }
    case Family::custom_radial:
      break;
  }
  return 0.0;
}

std::optional<double> TestFunction::even_moment(int k) const {
  if (k < 0) throw DomainError("even_moment: order must be >= 0");
  if (amplitude_ == 0.0) return 0.0;
  const double area = sphere_area(n_);
  const double power = 2.0 * k + n_;
  switch (family_) {
    case Family::gaussian: {
      const double s = param_ / lambda_;
      const double half = 0.5 * power;
      return amplitude_ * area * 0.5 * std::exp(half * std::log(2.0 * s * s) + log_gamma(half));
    }
    case Family::bubble: {
      if (param_ <= power) return std::nullopt;
      // \int_0^inf r^{power-1} (1+r^2)^{-beta/2} dr = B(power/2, (beta-power)/2) / 2
      const double a = 0.5 * power;
      const double b = 0.5 * (param_ - power);
      const double beta_fn = std::exp(log_gamma(a) + log_gamma(b) - log_gamma(a + b));
      return amplitude_ * area * 0.5 * beta_fn * std::pow(lambda_, -power);
    }
    case Family::bump:
    case Family::custom_radial: {
      const double top = support_radius();
      if (!std::isfinite(top)) return std::nullopt;
      auto g = [&](double r) { return evaluate(r) * std::pow(r, power - 1.0); };
      QuadOptions q;
      q.rel_tol = 1e-12;
      q.abs_tol = 0.0;
      q.breakpoints = {0.5 * top, 0.9 * top};
      return area * integrate_1d(g, 0.0, top, q).value;
    }
  }
  return std::nullopt;
}

double TestFunction::sup_abs() const {
  if (amplitude_ == 0.0) return 0.0;
  switch (family_) {
    case Family::gaussian:
    case Family::bubble:
      return std::fabs(amplitude_);
    case Family::bump:
      return std::fabs(amplitude_) * std::exp(-1.0);
    case Family::custom_radial:
      return std::fabs(amplitude_) * traits_.sup_abs;
  }
  return 0.0;
}

double TestFunction::length_scale() const {
  switch (family_) {
    case Family::gaussian:
    case Family::bump:
      return param_ / lambda_;
    case Family::bubble:
      return 1.0 / lambda_;
    case Family::custom_radial:
      return traits_.length_scale / lambda_;
  }
  return 1.0;
}

double TestFunction::support_radius() const {
  switch (family_) {
    case Family::gaussian:
      return kGaussCut * param_ / lambda_;
    case Family::bubble:
      return kInf;
    case Family::bump:
      return param_ / lambda_;
    case Family::custom_radial:
      return traits_.support_radius / lambda_;
  }
  return kInf;
}

double TestFunction::decay_power() const {
  switch (family_) {
    case Family::bubble:
      return param_;
    case Family::custom_radial:
      return std::isfinite(traits_.support_radius) ? kInf : traits_.decay_power;
    default:
      return kInf;
  }
}

TestFunction TestFunction::dilated(double lambda) const {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("dilate: lambda must be positive");
  TestFunction u = *this;
  u.lambda_ *= lambda;
  u.centre_ /= lambda;
  return u;
}

TestFunction TestFunction::scaled(double factor) const {
  if (!std::isfinite(factor)) throw DomainError("scaled: factor must be finite");
  TestFunction u = *this;
  u.amplitude_ *= factor;
  return u;
}

TestFunction TestFunction::shifted(double c) const {
  if (!std::isfinite(c)) throw DomainError("shifted: centre must be finite");
  TestFunction u = *this;
  u.centre_ = c;
  return u;
}

std::string TestFunction::key() const {
  std::ostringstream os;
  os << name_ << "|n=" << n_ << "|p=" << fmt17(param_) << "|lam=" << fmt17(lambda_) << "|A=" << fmt17(amplitude_)
     << "|c=" << fmt17(centre_);
  return os.str();
}

TestFunction dilate(const TestFunction& u, double lambda) { return u.dilated(lambda); }

TestFunction sum(const TestFunction& u, const TestFunction& v) {
  if (u.dimension() != v.dimension()) throw DomainError("sum: dimension mismatch");
  if (u.centre() != 0.0 || v.centre() != 0.0) throw DomainError("sum: functions must be centred");
  CustomTraits t;
  t.support_radius = std::max(u.support_radius(), v.support_radius());
  t.decay_power = std::min(u.decay_power(), v.decay_power());
  t.length_scale = std::min(u.length_scale(), v.length_scale());
  t.sup_abs = u.sup_abs() + v.sup_abs();
  auto profile = [u, v](double r) { return u.evaluate(r) + v.evaluate(r); };
  return TestFunction::custom(u.dimension(), u.name() + "+" + v.name(), profile, t);
}

double fourier_radial_numeric(const TestFunction& u, double rho) {
  const int n = u.dimension();
  if (n < 1 || n > 3) throw UnsupportedDimension("fourier_radial: supported dimensions are 1, 2, 3");
  if (!(rho >= 0.0)) throw DomainError("fourier_radial: frequency radius must be >= 0");
  if (u.centre() != 0.0) throw DomainError("fourier_radial: translated functions have complex transforms");
  if (u.is_zero()) return 0.0;
  if (u.decay_power() <= n) throw DomainError("fourier_radial: function is not integrable on R^n");

  auto kernel = [n, rho](double r) -> double {
    switch (n) {
      case 1:
        return 2.0 * std::cos(rho * r);
      case 2:
        return 2.0 * kPi * bessel_j0(rho * r) * r;
      default:
        if (rho == 0.0) return 4.0 * kPi * r * r;
        return 4.0 * kPi * r * std::sin(rho * r) / rho;
    }
  };
  auto integrand = [&](double r) { return u.evaluate(r) * kernel(r); };
  const double ell = u.length_scale();
  const double magnitude = u.sup_abs() * std::pow(ell, n) * sphere_area(n);
  QuadOptions q;
  q.rel_tol = 1e-11;
  // Cancellation in the oscillatory kernel limits absolute accuracy to a few
  // ulps of \int |u|; asking for more only exhausts the interval budget.
  q.abs_tol = 1e-14 * magnitude;
  q.max_intervals = 20000;

  const double top = u.support_radius();
  if (std::isfinite(top)) {
    if (rho > 0.0) {
      const double period = kPi / rho;
      const int cuts = static_cast<int>(std::min(4000.0, top / period));
      for (int k = 1; k <= cuts; ++k) q.breakpoints.push_back(k * period);
    }
    q.breakpoints.push_back(0.5 * top);
    return integrate_1d(integrand, 0.0, top, q).value;
  }

  const double start = 10.0 * ell;
  if (rho == 0.0) {
    HalflineOptions h;
    h.rel_tol = 1e-11;
    h.abs_tol = q.abs_tol;
    h.scale = start;
    h.decay_power = u.decay_power() - (n - 1);
    return integrate_1d(integrand, 0.0, start, q).value + integrate_halfline(integrand, start, h).value;
  }
  // Oscillatory tail: sum half periods and accelerate the partial sums.
  const double period = kPi / rho;
  const double x0 = std::ceil(start / period) * period;
  for (int k = 1; k * period < x0; ++k) q.breakpoints.push_back(k * period);
  double head = integrate_1d(integrand, 0.0, x0, q).value;
  std::vector<double> partial;
  double running = head;
  for (int k = 0; k < 40; ++k) {
    running += integrate_1d(integrand, x0 + k * period, x0 + (k + 1) * period, q).value;
    partial.push_back(running);
  }
  return wynn_epsilon(partial);
}

double fourier_radial(const TestFunction& u, double rho) {
  const int n = u.dimension();
  if (n < 1 || n > 3) throw UnsupportedDimension("fourier_radial: supported dimensions are 1, 2, 3");
  if (!(rho >= 0.0)) throw DomainError("fourier_radial: frequency radius must be >= 0");
  if (u.family() == Family::gaussian && u.centre() == 0.0) {
    const double s = u.parameter() / u.dilation();
    return u.amplitude() * std::pow(2.0 * kPi, 0.5 * n) * std::pow(s, n) * std::exp(-0.5 * s * s * rho * rho);
  }
  return fourier_radial_numeric(u, rho);
}

}  // namespace fracsob
