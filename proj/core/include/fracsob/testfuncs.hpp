#pragma once

#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>

#include "fracsob/numerics.hpp"

namespace fracsob {

enum class Family { gaussian, bubble, bump, custom_radial };

std::string to_string(Family f);
Family family_from_string(const std::string& name);

/// Extra information a custom radial profile must supply, since nothing can
/// be read off a closure.
struct CustomTraits {
  /// Profile vanishes (or is below 1e-300) beyond this radius.
  double support_radius = std::numeric_limits<double>::infinity();
  /// Profile decays like r^{-decay_power} when support is unbounded.
  double decay_power = std::numeric_limits<double>::infinity();
  /// Characteristic length of the profile.
  double length_scale = 1.0;
  /// max_r |profile(r)|
  double sup_abs = 1.0;
};

/// A radial test function x -> A * phi(lambda * |x - c|) on R^n.
///
/// phi is one of the analytic families (gaussian exp(-r^2 / 2 sigma^2),
/// bubble (1 + r^2)^{-beta/2}, bump exp(-1/(1 - (r/R)^2)) for r < R) or a
/// custom profile. The centre c sits on the first coordinate axis; it is only
/// used for domain-restricted computations on half-lines and half-spaces.
/// Values are immutable; dilation and scaling return new objects.
class TestFunction {
 public:
  static TestFunction gaussian(int n, double sigma = 1.0);
  static TestFunction bubble(int n, double beta);
  static TestFunction bump(int n, double radius = 1.0);
  static TestFunction custom(int n, std::string name, RealFunction profile, CustomTraits traits);
  /// The identically zero function (a bump with amplitude 0).
  static TestFunction zero(int n);

  Family family() const noexcept { return family_; }
  int dimension() const noexcept { return n_; }
  /// sigma, beta or R depending on the family; 0 for custom profiles.
  double parameter() const noexcept { return param_; }
  double dilation() const noexcept { return lambda_; }
  double amplitude() const noexcept { return amplitude_; }
  double centre() const noexcept { return centre_; }
  const std::string& name() const noexcept { return name_; }

  bool is_zero() const noexcept { return amplitude_ == 0.0; }

  /// Radial profile at distance r >= 0 from the centre.
  double evaluate(double r) const;
  /// Value at a point of R^n.
  double at(std::span<const double> x) const;

  /// Integral of profile(rho) * rho over [a, b] (0 <= a <= b); the building
  /// block of spherical means in R^3.
  double shell_integral(double a, double b) const;
  /// The same over [|r - t|, r + t], with the shell width kept exact.
  double shell_integral_about(double r, double t) const;

  /// \int_{R^n} |x - c|^{2k} u(x) dx, when finite.
  std::optional<double> even_moment(int k) const;

  double sup_abs() const;
  double length_scale() const;
  /// Radius (about the centre) beyond which the profile is negligible; inf if none.
  double support_radius() const;
  /// Algebraic decay exponent of the profile (inf for super-algebraic decay).
  double decay_power() const;

  TestFunction dilated(double lambda) const;
  TestFunction scaled(double factor) const;
  /// Moves the centre to c * e_1.
  TestFunction shifted(double c) const;

  /// Identity used for memoising norm evaluations.
  std::string key() const;

 private:
  TestFunction() = default;
  double unit_profile(double x) const;
  double closed_shell(double la, double gap) const;

  Family family_ = Family::gaussian;
  int n_ = 1;
  double param_ = 1.0;
  double lambda_ = 1.0;
  double amplitude_ = 1.0;
  double centre_ = 0.0;
  std::string name_;
  std::shared_ptr<const RealFunction> custom_;
  CustomTraits traits_;
};

/// u(lambda * .); dilations compose multiplicatively.
TestFunction dilate(const TestFunction& u, double lambda);

/// Pointwise sum of two centred functions on the same R^n, as a custom profile.
TestFunction sum(const TestFunction& u, const TestFunction& v);

/// Radial profile of the Fourier transform \int e^{-i x.xi} u(x) dx at
/// |xi| = rho, for n in {1, 2, 3}. Gaussians use their closed form; other
/// families use the cosine / J0 / sine radial kernels numerically.
double fourier_radial(const TestFunction& u, double rho);

/// Numeric radial transform, also for gaussians (used to cross-check the closed form).
double fourier_radial_numeric(const TestFunction& u, double rho);

}  // namespace fracsob
