#include "fracsob/norms.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace fracsob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Radii at which radial integrands typically change character.
std::vector<double> geometric_breaks(double ell, double top) {
  std::vector<double> out;
  for (double r = 0.25 * ell; r < top; r *= 2.0) out.push_back(r);
  return out;
}

// p-th root of omega_n * integral, with the error propagated.
NormResult root(double integral, double err, double p, double scale, NormMethod m) {
  if (integral <= 0.0) return {0.0, scale * std::pow(std::max(err, 0.0), 1.0 / p), m, false};
  const double value = scale * std::pow(integral, 1.0 / p);
  return {value, value * err / (p * integral), m, false};
}

struct ProfileKey {
  std::string key;
  double s;
  int route;
  double tol;
  auto operator<=>(const ProfileKey&) const = default;
};

RadialProfile cached_profile(const TestFunction& u, double s, const FracLaplacianOptions& opts) {
  static std::mutex mutex;
  static std::map<ProfileKey, RadialProfile> cache;
  ProfileKey k{u.shifted(0.0).key(), s, static_cast<int>(opts.route), opts.rel_tol};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(k); it != cache.end()) return it->second;
  }
  RadialProfile g = apply_frac_laplacian(u, s, opts);
  std::lock_guard lock(mutex);
  return cache.emplace(k, g).first->second;
}

// Coefficients c of g(r) = sum_i c_i (R/r)^{k_i}, matched at R / 2^j for
// j = 0 .. m-1, m = k.size() <= 4.
std::vector<double> fit_tail(const std::vector<double>& k, const std::array<double, 4>& g) {
  const std::size_t m = k.size();
  std::array<std::array<double, 5>, 4> a{};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) a[i][j] = std::pow(std::ldexp(1.0, static_cast<int>(i)), k[j]);
    a[i][4] = g[i];
  }
  // Gaussian elimination with partial pivoting.
  for (std::size_t c = 0; c < m; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < m; ++r)
      if (std::fabs(a[r][c]) > std::fabs(a[piv][c])) piv = r;
    std::swap(a[c], a[piv]);
    for (std::size_t r = c + 1; r < m; ++r) {
      const double f = a[r][c] / a[c][c];
      for (std::size_t j = c; j < 5; ++j) a[r][j] -= f * a[c][j];
    }
  }
  std::vector<double> coef(m);
  for (std::size_t i = m; i-- > 0;) {
    double v = a[i][4];
    for (std::size_t j = i + 1; j < m; ++j) v -= a[i][j] * coef[j];
    coef[i] = v / a[i][i];
  }
  return coef;
}

}  // namespace

std::string to_string(NormMethod m) {
  switch (m) {
    case NormMethod::radial_quadrature:
      return "radial-quadrature";
    case NormMethod::qmc:
      return "qmc";
    case NormMethod::spectral:
      return "spectral";
    case NormMethod::product_quadrature:
      return "product-quadrature";
  }
  return "unknown";
}

NormResult lp_norm(const TestFunction& u, double p, const NormOptions& opts) {
  if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1");
  const int n = u.dimension();
  if (u.is_zero()) return {0.0, 0.0, NormMethod::radial_quadrature, false};
  if (u.decay_power() * p <= n) return NormResult::infinite(NormMethod::radial_quadrature);

  // Normalise by sup|u| so large p stays in range.
  const double m = u.sup_abs();
  const double ell = u.length_scale();
  auto f = [&](double r) { return std::pow(std::fabs(u.evaluate(r)) / m, p) * std::pow(r, n - 1); };
  const double width = ell / std::sqrt(p);
  QuadOptions q;
  q.rel_tol = opts.rel_tol;
  q.abs_tol = 1e-3 * opts.rel_tol * std::pow(width, n) * 1e-6;
  q.max_intervals = 8000;
  for (double k : {0.5, 1.0, 2.0, 4.0, 8.0}) q.breakpoints.push_back(k * width);
  for (double b : geometric_breaks(ell, 64.0 * ell)) q.breakpoints.push_back(b);

  QuadResult head;
  QuadResult tail;
  const double top = u.support_radius();
  if (std::isfinite(top)) {
    if (u.family() == Family::bump)
      for (double k : {0.9, 0.99}) q.breakpoints.push_back(k * top);
    head = integrate_1d(f, 0.0, top, q);
  } else {
    const double split = 16.0 * ell;
    head = integrate_1d(f, 0.0, split, q);
    HalflineOptions h;
    h.rel_tol = opts.rel_tol;
    h.abs_tol = q.abs_tol;
    h.scale = split;
    h.decay_power = u.decay_power() * p - (n - 1);
    tail = integrate_halfline(f, split, h);
  }
  const double omega = sphere_area(n);
  return root(omega * (head.value + tail.value), omega * (head.error_estimate + tail.error_estimate), p, m,
              NormMethod::radial_quadrature);
}

NormResult lp_norm(const RadialProfile& g, double p, const NormOptions& opts) {
  if (!(p >= 1.0)) throw DomainError("lp_norm: p must be >= 1");
  const int n = g.dimension();
  const NormMethod method = g.route() == LaplacianRoute::spectral ? NormMethod::spectral
                                                                  : NormMethod::radial_quadrature;
  if (g.magnitude() == 0.0) return {0.0, 0.0, method, false};
  if (g.decay_power() * p <= n) return NormResult::infinite(method);

  const double m = g.magnitude();
  const double ell = g.length_scale();
  auto f = [&](double r) { return std::pow(std::fabs(g(r)) / m, p) * std::pow(r, n - 1); };
  const double tol = std::max(opts.rel_tol, 10.0 * g.value_tolerance());

  const bool series = std::isfinite(g.far_radius());
  const double split = series ? g.far_radius() : 100.0 * ell;
  QuadOptions q;
  q.rel_tol = tol;
  q.abs_tol = 1e-9 * tol * std::pow(ell, n);
  q.max_intervals = 8000;
  q.breakpoints = geometric_breaks(ell, split);
  const QuadResult head = integrate_1d(f, 0.0, split, q);

  double tail = 0.0;
  double tail_err = 0.0;
  if (std::isfinite(g.decay_power())) {
    HalflineOptions h;
    h.rel_tol = tol;
    h.abs_tol = q.abs_tol;
    h.scale = split;
    if (series) {
      h.decay_power = g.decay_power() * p - (n - 1);
      const QuadResult t = integrate_halfline(f, split, h);
      tail = t.value;
      tail_err = t.error_estimate;
    } else {
      // Beyond `split` the profile of a power-law u ~ r^{-beta} behaves like
      // A r^{-beta-s} (1 + O(r^{-2})) + B r^{-n-s}. Fit those exponents through
      // three radii and integrate the model; the spread against the fit
      // without the r^{-2} correction is the error bar.
      const double k1 = g.decay_power();
      const double k3 = n + g.order();
      std::vector<double> ks{k1, k1 + 2.0, k1 + 4.0};
      if (std::fabs(k3 - k1) > 1e-6 && std::fabs(k3 - k1 - 2.0) > 0.05) ks = {k1, k3, k1 + 2.0, k3 + 2.0};
      const std::array<double, 4> samples{g(split), g(0.5 * split), g(0.25 * split), g(0.125 * split)};
      auto model_tail = [&](const std::vector<double>& kk) {
        const std::vector<double> c = fit_tail(kk, samples);
        auto model = [&](double r) {
          const double x = split / r;
          double v = 0.0;
          for (std::size_t i = 0; i < kk.size(); ++i) v += c[i] * std::pow(x, kk[i]);
          return std::pow(std::fabs(v) / m, p) * std::pow(r, n - 1);
        };
        h.decay_power = k1 * p - (n - 1);
        return integrate_halfline(model, split, h).value;
      };
      tail = model_tail(ks);
      const std::vector<double> fewer(ks.begin(), ks.end() - 1);
      tail_err = 0.1 * std::fabs(tail - model_tail(fewer)) + tol * tail;
    }
  }
  const double omega = sphere_area(n);
  NormResult r = root(omega * (head.value + tail), omega * (head.error_estimate + tail_err), p, m, method);
  r.error_estimate += r.value * g.value_tolerance();
  return r;
}

NormResult frac_sobolev_norm(const TestFunction& u, double s, double p, const NormOptions& opts) {
  if (!(p >= 1.0)) throw DomainError("frac_sobolev_norm: p must be >= 1");
  if (!(s > 0.0 && s <= 2.0)) throw DomainError("frac_sobolev_norm: s must lie in (0, 2]");
  if (u.is_zero()) return {0.0, 0.0, NormMethod::radial_quadrature, false};
  return lp_norm(cached_profile(u, s, opts.laplacian), p, opts);
}

NormResult frac_sobolev_norm_plancherel(const TestFunction& u, double s, const NormOptions& opts) {
  if (!(s > 0.0 && s <= 2.0)) throw DomainError("frac_sobolev_norm_plancherel: s must lie in (0, 2]");
  const int n = u.dimension();
  if (u.is_zero()) return {0.0, 0.0, NormMethod::spectral, false};
  const double ell = u.length_scale();
  const double uhat0 = std::fabs(fourier_radial(u, 0.0));
  auto f = [&](double rho) {
    const double v = fourier_radial(u, rho) / uhat0;
    return std::pow(rho, 2.0 * s + n - 1) * v * v;
  };
  QuadOptions q;
  q.rel_tol = opts.rel_tol;
  q.abs_tol = 1e-3 * opts.rel_tol * std::pow(ell, -(2.0 * s + n)) * 1e-6;
  q.max_intervals = 8000;
  for (double k : {0.5, 1.0, 2.0, 4.0, 8.0}) q.breakpoints.push_back(k / ell);
  const double top = (u.family() == Family::gaussian ? 40.0 : 400.0) / ell;
  const QuadResult r = integrate_1d(f, 0.0, top, q);
  const double scale = sphere_area(n) * std::pow(2.0 * std::numbers::pi, -n) * uhat0 * uhat0;
  return root(scale * r.value, scale * r.error_estimate, 2.0, 1.0, NormMethod::spectral);
}

NormResult complete_norm(const TestFunction& u, double s, double p, const NormOptions& opts) {
  const NormResult a = lp_norm(u, p, opts);
  const NormResult b = frac_sobolev_norm(u, s, p, opts);
  if (a.is_infinite() || b.is_infinite()) return NormResult::infinite(b.method);
  const double sum = std::pow(a.value, p) + std::pow(b.value, p);
  const double value = std::pow(sum, 1.0 / p);
  const double err = value == 0.0 ? a.error_estimate + b.error_estimate
                                  : (std::pow(a.value, p - 1) * a.error_estimate +
                                     std::pow(b.value, p - 1) * b.error_estimate) /
                                        std::pow(value, p - 1);
  return {value, err, b.method, a.low_confidence || b.low_confidence};
}

// ---------------------------------------------------------------------------
// Domains

ConvexDomain ConvexDomain::half_line() { return {Kind::half_line, 1}; }

ConvexDomain ConvexDomain::half_space(int n) {
  if (n != 2 && n != 3) throw UnsupportedDimension("half_space: dimension must be 2 or 3");
  return {Kind::half_space, n};
}

ConvexDomain ConvexDomain::unit_ball(int n) {
  if (n < 1 || n > 3) throw UnsupportedDimension("unit_ball: dimension must be 1, 2 or 3");
  return {Kind::unit_ball, n};
}

double ConvexDomain::boundary_distance(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != n_) throw DomainError("ConvexDomain: point has wrong dimension");
  switch (kind_) {
    case Kind::half_line:
    case Kind::half_space:
      return x[0];
    case Kind::unit_ball: {
      double r2 = 0.0;
      for (double v : x) r2 += v * v;
      return 1.0 - std::sqrt(r2);
    }
  }
  return 0.0;
}

bool ConvexDomain::contains(std::span<const double> x) const { return boundary_distance(x) > 0.0; }

std::string ConvexDomain::name() const {
  switch (kind_) {
    case Kind::half_line:
      return "half-line";
    case Kind::half_space:
      return "half-space-" + std::to_string(n_);
    case Kind::unit_ball:
      return "unit-ball-" + std::to_string(n_);
  }
  return "unknown";
}

double dist_alpha(std::span<const double> x, const ConvexDomain& domain, double alpha) {
  if (!(alpha > 0.0)) throw DomainError("dist_alpha: alpha must be positive");
  const double d = domain.boundary_distance(x);
  if (!(d > 0.0)) throw DomainError("dist_alpha: point lies outside the domain");
  return std::pow(d, alpha);
}

namespace {

// Vanishing order k of a boundary profile F(d) ~ d^k, read off at two small
// distances; inf when F is identically zero there.
double vanishing_order(const RealFunction& F, double ell) {
  const double d1 = 1e-5 * ell;
  const double d2 = 1e-6 * ell;
  const double f1 = std::fabs(F(d1));
  const double f2 = std::fabs(F(d2));
  if (f1 == 0.0 && f2 == 0.0) return kInf;
  if (f2 == 0.0) return kInf;
  return std::log(f1 / f2) / std::log(d1 / d2);
}

}  // namespace

NormResult weighted_lp_norm(const TestFunction& f, double p, const ConvexDomain& domain, double alpha,
                            const NormOptions& opts) {
  if (!(p >= 1.0)) throw DomainError("weighted_lp_norm: p must be >= 1");
  if (!(alpha > 1.0 && alpha < p)) throw DomainError("weighted_lp_norm: alpha must lie in (1, p)");
  if (f.dimension() != domain.dimension()) throw DomainError("weighted_lp_norm: dimension mismatch");
  const int n = f.dimension();
  const NormMethod method =
      domain.kind() == ConvexDomain::Kind::half_space ? NormMethod::product_quadrature : NormMethod::radial_quadrature;
  if (f.is_zero()) return {0.0, 0.0, method, false};

  const double m = f.sup_abs();
  const double ell = f.length_scale();
  const double c = f.centre();
  const double S = f.support_radius();

  // Radial or sectional density G(d) so the norm^p is \int G(d) d^{-alpha} dd
  // over boundary distance d in (0, dmax).
  RealFunction G;
  double dmax = kInf;
  std::vector<double> breaks;
  switch (domain.kind()) {
    case ConvexDomain::Kind::half_line:
      G = [&](double x) { return std::pow(std::fabs(f.evaluate(std::fabs(x - c))) / m, p); };
      breaks = {c - S, c, c + S};
      if (std::isfinite(S)) dmax = c + S;
      break;
    case ConvexDomain::Kind::unit_ball: {
      if (c != 0.0) throw DomainError("weighted_lp_norm: the unit ball needs a centred function");
      const double omega = sphere_area(n);
      G = [&, omega](double d) {
        const double r = 1.0 - d;
        return omega * std::pow(std::fabs(f.evaluate(r)) / m, p) * std::pow(r, n - 1);
      };
      dmax = 1.0;
      breaks = {1.0 - S, 0.5};
      break;
    }
    case ConvexDomain::Kind::half_space: {
      const double omega = sphere_area(n - 1);
      G = [&, omega](double x1) {
        const double a = x1 - c;
        auto inner = [&](double rho) {
          return std::pow(std::fabs(f.evaluate(std::hypot(a, rho))) / m, p) * std::pow(rho, n - 2);
        };
        QuadOptions q;
        q.rel_tol = 0.1 * opts.rel_tol;
        q.abs_tol = 1e-6 * opts.rel_tol * std::pow(ell, n - 1);
        q.breakpoints = geometric_breaks(ell, 64.0 * ell);
        if (std::isfinite(S)) {
          if (std::fabs(a) >= S) return 0.0;
          return omega * integrate_1d(inner, 0.0, std::sqrt(S * S - a * a), q).value;
        }
        HalflineOptions h;
        h.rel_tol = q.rel_tol;
        h.abs_tol = q.abs_tol;
        h.scale = ell;
        h.decay_power = f.decay_power() * p - (n - 2);
        return omega * integrate_halfline(inner, 0.0, h).value;
      };
      breaks = {c - S, c, c + S};
      if (std::isfinite(S)) dmax = c + S;
      break;
    }
  }

  const double k = vanishing_order(G, ell);
  if (k - alpha <= -1.0) return NormResult::infinite(method);

  auto integrand = [&](double d) { return G(d) * std::pow(d, -alpha); };
  QuadOptions q;
  q.rel_tol = opts.rel_tol;
  q.abs_tol = 1e-9 * opts.rel_tol * std::pow(ell, n - alpha);
  q.max_intervals = 8000;
  if (std::isfinite(k) && alpha - k > 0.0) q.singularity = EndpointSingularity{Endpoint::lower, alpha - k};
  double lo = 0.0;
  if (std::isfinite(S) && domain.kind() != ConvexDomain::Kind::unit_ball) lo = std::max(0.0, c - S);
  if (domain.kind() == ConvexDomain::Kind::unit_ball && std::isfinite(S)) lo = std::max(0.0, 1.0 - S);
  if (lo > 0.0) q.singularity.reset();
  for (double b : geometric_breaks(ell, 64.0 * ell)) q.breakpoints.push_back(b);
  for (double b : breaks) q.breakpoints.push_back(b);
  std::erase_if(q.breakpoints, [&](double b) { return !(b > lo) || !(b < dmax); });

  QuadResult head;
  QuadResult tail;
  if (std::isfinite(dmax)) {
    head = integrate_1d(integrand, lo, dmax, q);
  } else {
    const double split = std::max(lo, c) + 16.0 * ell;
    std::erase_if(q.breakpoints, [&](double b) { return b >= split; });
    head = integrate_1d(integrand, lo, split, q);
    HalflineOptions h;
    h.rel_tol = opts.rel_tol;
    h.abs_tol = q.abs_tol;
    h.scale = split;
    h.decay_power = f.decay_power() * p + alpha - (n - 1);
    tail = integrate_halfline(integrand, split, h);
  }
  return root(head.value + tail.value, head.error_estimate + tail.error_estimate, p, m, method);
}

// ---------------------------------------------------------------------------
// Cache

namespace {

std::string options_tag(const NormOptions& o) {
  std::ostringstream os;
  os.precision(17);
  os << o.rel_tol << '/' << o.laplacian.rel_tol << '/' << static_cast<int>(o.laplacian.route) << '/'
     << o.qmc.log2_points << '/' << o.qmc.shifts << '/' << o.qmc.seed;
  return os.str();
}

}  // namespace

template <class F>
NormResult NormCache::lookup(Key key, F&& compute) {
  {
    std::lock_guard lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
  }
  NormResult r = compute();
  std::lock_guard lock(mutex_);
  return entries_.emplace(std::move(key), r).first->second;
}

NormResult NormCache::lp(const TestFunction& u, double p, const NormOptions& opts) {
  return lookup({u.key(), Kind::lp, p, 0.0, options_tag(opts)}, [&] { return lp_norm(u, p, opts); });
}

NormResult NormCache::sobolev(const TestFunction& u, double s, double p, const NormOptions& opts) {
  return lookup({u.key(), Kind::sobolev, p, s, options_tag(opts)},
                [&] { return frac_sobolev_norm(u, s, p, opts); });
}

NormResult NormCache::weighted(const TestFunction& f, double p, const ConvexDomain& domain, double alpha,
                               const NormOptions& opts) {
  return lookup({f.key(), Kind::weighted, p, alpha, domain.name() + options_tag(opts)},
                [&] { return weighted_lp_norm(f, p, domain, alpha, opts); });
}

NormResult NormCache::delta(const TestFunction& f, double p, const ConvexDomain& domain, double alpha,
                            const NormOptions& opts) {
  return lookup({f.key(), Kind::delta, p, alpha, domain.name() + options_tag(opts)},
                [&] { return delta_seminorm(f, p, domain, alpha, opts); });
}

std::size_t NormCache::size() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

void NormCache::clear() {
  std::lock_guard lock(mutex_);
  entries_.clear();
}

NormCache& NormCache::global() {
  static NormCache cache;
  return cache;
}

}  // namespace fracsob
