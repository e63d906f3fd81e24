#pragma once

#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <tuple>

#include "fracsob/numerics.hpp"
#include "fracsob/testfuncs.hpp"

namespace fracsob {

enum class NormMethod { radial_quadrature, qmc, spectral, product_quadrature };

std::string to_string(NormMethod m);

struct NormResult {
  double value = 0.0;
  double error_estimate = 0.0;
  NormMethod method = NormMethod::radial_quadrature;
  /// Set when a stochastic estimate missed its requested tolerance.
  bool low_confidence = false;

  bool is_infinite() const noexcept { return value == std::numeric_limits<double>::infinity(); }
  static NormResult infinite(NormMethod m) {
    return {std::numeric_limits<double>::infinity(), 0.0, m, false};
  }
};

// ---------------------------------------------------------------------------
// Fractional Laplacian

enum class LaplacianRoute {
  automatic,   // spectral for closed-form transforms, real space otherwise
  spectral,    // (2 pi)^{-n} \int |xi|^s u^(xi) e^{i x.xi} dxi, radially
  real_space,  // hypersingular integral against exact spherical means
};

struct FracLaplacianOptions {
  double rel_tol = 1e-10;
  LaplacianRoute route = LaplacianRoute::automatic;
};

/// Radial profile of (-Delta)^{s/2} u, evaluated lazily and memoised.
///
/// Beyond far_radius() values come from the multipole series
/// sum_k M_{2k} Delta^k[-C |x|^{-n-s}] / (2^k k! n(n+2)...(n+2k-2)), which is
/// exact for compact support and asymptotic for gaussians.
class RadialProfile {
 public:
  double operator()(double r) const;

  int dimension() const;
  double order() const;
  LaplacianRoute route() const;
  /// |g(r)| ~ r^{-decay_power()} for large r.
  double decay_power() const;
  double length_scale() const;
  /// Typical magnitude sup|u| / length^s.
  double magnitude() const;
  /// Radius from which the multipole series is used; inf if unavailable.
  double far_radius() const;
  /// Relative accuracy targeted for each value.
  double value_tolerance() const;

  struct Impl;

 private:
  friend RadialProfile apply_frac_laplacian(const TestFunction&, double, const FracLaplacianOptions&);
  std::shared_ptr<Impl> impl_;
};

/// (-Delta)^{s/2} u for s in (0, 2], n in {1, 2, 3}.
RadialProfile apply_frac_laplacian(const TestFunction& u, double s, const FracLaplacianOptions& opts = {});

/// Normalising constant of the hypersingular representation
/// (-Delta)^{s/2} u(x) = C \int (u(x) - u(y)) / |x - y|^{n+s} dy, s in (0, 2).
double frac_laplacian_constant(int n, double s);

// ---------------------------------------------------------------------------
// Norms on R^n

struct NormOptions {
  double rel_tol = 1e-9;
  FracLaplacianOptions laplacian{};
  QmcOptions qmc{};
  /// Relative error above which a QMC estimate is flagged low-confidence.
  double qmc_target = 1e-2;
};

/// |u|_p = (omega_n \int_0^inf |u(r)|^p r^{n-1} dr)^{1/p}, p >= 1.
/// Returns the infinite-norm value when the tail diverges.
NormResult lp_norm(const TestFunction& u, double p, const NormOptions& opts = {});

/// L_p norm of an already computed fractional-Laplacian profile.
NormResult lp_norm(const RadialProfile& g, double p, const NormOptions& opts = {});

/// ||u||W_p^s = |(-Delta)^{s/2} u|_p.
NormResult frac_sobolev_norm(const TestFunction& u, double s, double p, const NormOptions& opts = {});

/// p = 2 via Plancherel: ((2 pi)^{-n} \int |xi|^{2s} |u^(xi)|^2 dxi)^{1/2}.
NormResult frac_sobolev_norm_plancherel(const TestFunction& u, double s, const NormOptions& opts = {});

/// (|u|_p^p + ||u||W_p^s^p)^{1/p}.
NormResult complete_norm(const TestFunction& u, double s, double p, const NormOptions& opts = {});

// ---------------------------------------------------------------------------
// Domains and weighted norms

class ConvexDomain {
 public:
  enum class Kind { half_line, half_space, unit_ball };

  /// (0, inf) in R^1.
  static ConvexDomain half_line();
  /// {x : x_1 > 0} in R^n, n in {2, 3}.
  static ConvexDomain half_space(int n);
  /// {|x| < 1} in R^n, n in {1, 2, 3}.
  static ConvexDomain unit_ball(int n);

  Kind kind() const noexcept { return kind_; }
  int dimension() const noexcept { return n_; }
  bool contains(std::span<const double> x) const;
  /// Distance from x to the complement of the domain.
  double boundary_distance(std::span<const double> x) const;
  std::string name() const;

 private:
  ConvexDomain(Kind k, int n) : kind_(k), n_(n) {}
  Kind kind_;
  int n_;
};

/// d_alpha(x) = dist(x, complement)^alpha for x inside the domain.
double dist_alpha(std::span<const double> x, const ConvexDomain& domain, double alpha);

/// (\int_Omega |f|^p / d_alpha(x) dx)^{1/p}, alpha in (1, p).
NormResult weighted_lp_norm(const TestFunction& f, double p, const ConvexDomain& domain, double alpha,
                            const NormOptions& opts = {});

// ---------------------------------------------------------------------------
// Double-integral seminorms

/// (\iint |u(x) - u(y)|^p / |x - y|^{n+sp} dx dy)^{1/p} over R^n or domain^2.
/// n = 1 uses deterministic product quadrature in (x, h = y - x); n in {2, 3}
/// uses randomized QMC and may come back low-confidence.
NormResult slobodetskii_norm(const TestFunction& u, double s, double p,
                             const std::optional<ConvexDomain>& domain = std::nullopt,
                             const NormOptions& opts = {});

/// (\iint_{Omega^2} |f(x) - f(y)|^p / |x - y|^{n+alpha} dx dy)^{1/p}, alpha in (1, p).
NormResult delta_seminorm(const TestFunction& f, double p, const ConvexDomain& domain, double alpha,
                          const NormOptions& opts = {});

// ---------------------------------------------------------------------------
// Memoisation

/// Thread-safe memo of norm evaluations keyed by (function, norm kind, p, s).
/// Concurrent inserts of the same key store identical values.
class NormCache {
 public:
  enum class Kind { lp, sobolev, weighted, delta };

  NormResult lp(const TestFunction& u, double p, const NormOptions& opts = {});
  NormResult sobolev(const TestFunction& u, double s, double p, const NormOptions& opts = {});
  NormResult weighted(const TestFunction& f, double p, const ConvexDomain& domain, double alpha,
                      const NormOptions& opts = {});
  NormResult delta(const TestFunction& f, double p, const ConvexDomain& domain, double alpha,
                   const NormOptions& opts = {});

  std::size_t size() const;
  void clear();

  static NormCache& global();

 private:
  using Key = std::tuple<std::string, Kind, double, double, std::string>;
  template <class F>
  NormResult lookup(Key key, F&& compute);

  mutable std::mutex mutex_;
  std::map<Key, NormResult> entries_;
};

}  // namespace fracsob
