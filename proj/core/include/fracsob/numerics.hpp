#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fracsob {

/// Thrown when an argument lies outside an operation's mathematical domain.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown by operations restricted to a subset of dimensions.
class UnsupportedDimension : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;  // absolute
  std::size_t evaluations = 0;
};

/// Quadrature did not reach its tolerance, or the integrand misbehaved.
/// `partial()` holds the best estimate available when the failure was raised.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, QuadResult partial)
      : std::runtime_error(what), partial_(partial) {}
  const QuadResult& partial() const noexcept { return partial_; }

 private:
  QuadResult partial_;
};

// ---------------------------------------------------------------------------
// Special functions

double gamma(double x);
double log_gamma(double x);

/// Surface area of the unit sphere S^{n-1} in R^n, 2 pi^{n/2} / Gamma(n/2).
double sphere_area(int n);

/// Volume of the unit ball in R^n.
inline double ball_volume(int n) { return sphere_area(n) / n; }

double bessel_j0(double x);

// ---------------------------------------------------------------------------
// One-dimensional adaptive quadrature

enum class Endpoint { lower, upper };

/// Integrand behaves like (distance to `at`)^{-power} near that endpoint.
struct EndpointSingularity {
  Endpoint at = Endpoint::lower;
  double power = 0.0;  // must be < 1
};

struct QuadOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-8;
  std::size_t max_intervals = 4000;
  std::optional<EndpointSingularity> singularity;
  /// Interior points where the integrand has kinks or steep features.
  std::vector<double> breakpoints;
};

using RealFunction = std::function<double(double)>;

/// Fixed 20-point Gauss-Legendre rule on [a, b].
double gauss_legendre20(const RealFunction& f, double a, double b);

/// Global adaptive Gauss-Kronrod (7/15) integration of f over [a, b].
/// Converged when error_estimate <= max(abs_tol, rel_tol * |value|).
QuadResult integrate_1d(const RealFunction& f, double a, double b, const QuadOptions& opts);

/// Convenience form: error_estimate <= tol * max(1, |value|).
QuadResult integrate_1d(const RealFunction& f, double a, double b, double tol = 1e-8,
                        std::optional<EndpointSingularity> singularity = std::nullopt);

struct HalflineOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-8;
  /// Length over which f varies near `a`; sets the compactification scale.
  double scale = 1.0;
  /// If set, f(r) ~ r^{-decay_power} as r -> inf (decay_power > 1); a
  /// power-law substitution replaces r = a + scale*t/(1-t).
  std::optional<double> decay_power;
  std::size_t max_intervals = 4000;
};

/// Integral of f over (a, inf). Throws QuadratureError when the
/// compactified integrand shows no decay at the far end.
QuadResult integrate_halfline(const RealFunction& f, double a, const HalflineOptions& opts);
QuadResult integrate_halfline(const RealFunction& f, double a, double tol = 1e-8);

// ---------------------------------------------------------------------------
// Randomized quasi-Monte Carlo

using Interval = std::pair<double, double>;
using MultiFunction = std::function<double(std::span<const double>)>;

struct QmcOptions {
  unsigned log2_points = 18;  // points per shift
  unsigned shifts = 8;
  std::uint64_t seed = 20240917;
};

/// Sobol' points with independent random shifts over a product box.
/// error_estimate is the standard error of the mean over the shifts.
QuadResult integrate_qmc(const MultiFunction& f, std::span<const Interval> box,
                         const QmcOptions& opts = {});

}  // namespace fracsob
