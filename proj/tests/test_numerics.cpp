#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "fracsob/numerics.hpp"

using namespace fracsob;

namespace {

constexpr double kPi = std::numbers::pi;

TEST(Gamma, KnownValues) {
  EXPECT_DOUBLE_EQ(fracsob::gamma(1.0), 1.0);
  EXPECT_NEAR(fracsob::gamma(0.5), std::sqrt(kPi), 1e-12 * std::sqrt(kPi));
  EXPECT_NEAR(fracsob::gamma(5.0), 24.0, 24.0 * 1e-12);
}

TEST(Gamma, RejectsNonPositive) {
  EXPECT_THROW(fracsob::gamma(0.0), DomainError);
  EXPECT_THROW(fracsob::gamma(-1.5), DomainError);
  EXPECT_THROW(log_gamma(0.0), DomainError);
}

TEST(Gamma, OverflowIsSignalled) { EXPECT_THROW(fracsob::gamma(200.0), std::overflow_error); }

TEST(Gamma, Recurrence) {
  for (double x = 1e-3; x < 80.0; x *= 1.37) {
    const double lhs = fracsob::gamma(x + 1.0);
    EXPECT_NEAR(lhs, x * fracsob::gamma(x), 1e-12 * lhs) << "x = " << x;
  }
}

TEST(LogGamma, KnownValues) {
  EXPECT_NEAR(log_gamma(1.0), 0.0, 1e-15);
  EXPECT_NEAR(log_gamma(2.0), 0.0, 1e-15);
  EXPECT_NEAR(log_gamma(11.0), std::log(3628800.0), 1e-12 * 15.1);
}

TEST(LogGamma, AgreesWithGamma) {
  for (double x = 0.01; x <= 170.0; x *= 1.21) {
    const double g = fracsob::gamma(x);
    EXPECT_NEAR(std::exp(log_gamma(x)), g, 1e-10 * g) << "x = " << x;
  }
}

TEST(SphereArea, LowDimensions) {
  EXPECT_DOUBLE_EQ(sphere_area(1), 2.0);
  EXPECT_NEAR(sphere_area(2), 2 * kPi, 1e-14);
  EXPECT_NEAR(sphere_area(3), 4 * kPi, 1e-13);
  EXPECT_THROW(sphere_area(0), DomainError);
}

TEST(SphereArea, BallVolumeByQmc) {
  for (int n : {2, 3}) {
    std::vector<Interval> box(n, {-1.0, 1.0});
    auto inside = [](std::span<const double> x) {
      double r2 = 0;
      for (double v : x) r2 += v * v;
      return r2 < 1.0 ? 1.0 : 0.0;
    };
    QmcOptions o;
    o.log2_points = 14;
    const QuadResult r = integrate_qmc(inside, box, o);
    const double vol = r.value;
    const double err = r.error_estimate;
    EXPECT_NEAR(vol, sphere_area(n) / n, 3 * err + 1e-12) << "n = " << n;
  }
}

TEST(BesselJ0, Values) {
  EXPECT_DOUBLE_EQ(bessel_j0(0.0), 1.0);
  EXPECT_NEAR(bessel_j0(2.404825557695773), 0.0, 1e-12);
  EXPECT_NEAR(bessel_j0(10.0), -0.245935764451348, 1e-12);
  EXPECT_NEAR(bessel_j0(-3.0), bessel_j0(3.0), 0.0);
}

TEST(Integrate1d, Polynomial) {
  const QuadResult r = integrate_1d([](double x) { return x; }, 0.0, 1.0, 1e-10);
  EXPECT_NEAR(r.value, 0.5, 1e-12);
  EXPECT_GE(r.error_estimate, 0.0);
  EXPECT_GE(r.evaluations, 1u);
}

TEST(Integrate1d, EndpointSingularity) {
  const QuadResult r = integrate_1d([](double x) { return 1.0 / std::sqrt(1.0 - x); }, 0.0, 1.0, 1e-10,
                                    EndpointSingularity{Endpoint::upper, 0.5});
  EXPECT_NEAR(r.value, 2.0, 1e-9);
}

TEST(Integrate1d, Gaussian) {
  const QuadResult r = integrate_1d([](double x) { return std::exp(-x * x); }, -8.0, 8.0, 1e-10);
  EXPECT_NEAR(r.value, std::sqrt(kPi), 1e-9);
}

TEST(Integrate1d, NanFailsImmediately) {
  try {
    integrate_1d([](double x) { return x > 0.5 ? std::nan("") : x; }, 0.0, 1.0);
    FAIL() << "expected QuadratureError";
  } catch (const QuadratureError& e) {
    EXPECT_LT(e.partial().evaluations, 100u);
  }
}

TEST(Integrate1d, ExhaustedBudgetCarriesPartial) {
  QuadOptions o;
  o.rel_tol = 1e-14;
  o.abs_tol = 1e-14;
  o.max_intervals = 3;
  try {
    integrate_1d([](double x) { return std::sin(1.0 / x); }, 1e-4, 1.0, o);
    FAIL() << "expected QuadratureError";
  } catch (const QuadratureError& e) {
    EXPECT_TRUE(std::isfinite(e.partial().value));
  }
}

TEST(Integrate1d, Linearity) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  auto f = [](double x) { return std::cos(3 * x) * std::exp(-x); };
  auto g = [](double x) { return std::sqrt(x) + x * x; };
  for (int i = 0; i < 10; ++i) {
    const double a = coef(rng);
    const double b = coef(rng);
    const QuadResult rf = integrate_1d(f, 0, 2, 1e-10);
    const QuadResult rg = integrate_1d(g, 0, 2, 1e-10);
    const QuadResult rh = integrate_1d([&](double x) { return a * f(x) + b * g(x); }, 0, 2, 1e-10);
    const double tol = std::fabs(a) * rf.error_estimate + std::fabs(b) * rg.error_estimate + rh.error_estimate;
    EXPECT_NEAR(rh.value, a * rf.value + b * rg.value, tol + 1e-12);
  }
}

TEST(IntegrateHalfline, Decays) {
  EXPECT_NEAR(integrate_halfline([](double r) { return std::exp(-r); }, 0.0).value, 1.0, 1e-8);
  EXPECT_NEAR(integrate_halfline([](double r) { return r * std::exp(-r * r / 2); }, 0.0).value, 1.0, 1e-8);
  EXPECT_NEAR(integrate_halfline([](double r) { return 1.0 / (r * r); }, 1.0).value, 1.0, 1e-8);
}

TEST(IntegrateHalfline, NoDecayFails) {
  EXPECT_THROW(integrate_halfline([](double) { return 1.0; }, 0.0), QuadratureError);
}

TEST(IntegrateQmc, SimpleBoxes) {
  std::vector<Interval> unit(2, {0.0, 1.0});
  QmcOptions o;
  o.log2_points = 12;
  EXPECT_NEAR(integrate_qmc([](std::span<const double>) { return 1.0; }, unit, o).value, 1.0, 1e-12);
  const QuadResult xy = integrate_qmc([](std::span<const double> x) { return x[0] * x[1]; }, unit, o);
  EXPECT_NEAR(xy.value, 0.25, std::max(3 * xy.error_estimate, 1e-6));

  std::vector<Interval> wide(2, {-6.0, 6.0});
  const QuadResult g =
      integrate_qmc([](std::span<const double> x) { return std::exp(-x[0] * x[0] - x[1] * x[1]); }, wide, o);
  EXPECT_NEAR(g.value, kPi, std::max(3 * g.error_estimate, 1e-6));
}

TEST(IntegrateQmc, SeedsAgree) {
  std::vector<Interval> box(3, {0.0, 1.0});
  auto f = [](std::span<const double> x) { return std::exp(x[0] * x[1]) * std::cos(x[2]); };
  QmcOptions a;
  a.log2_points = 12;
  QmcOptions b = a;
  b.seed = 99;
  const QuadResult ra = integrate_qmc(f, box, a);
  const QuadResult rb = integrate_qmc(f, box, b);
  EXPECT_NEAR(ra.value, rb.value, 3 * (ra.error_estimate + rb.error_estimate) + 1e-12);
  EXPECT_EQ(ra.value, integrate_qmc(f, box, a).value);
}

TEST(IntegrateQmc, InfiniteSampleFails) {
  std::vector<Interval> box(2, {0.0, 1.0});
  EXPECT_THROW(integrate_qmc([](std::span<const double>) { return INFINITY; }, box), QuadratureError);
}

}  // namespace
