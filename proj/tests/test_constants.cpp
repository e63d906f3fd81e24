#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fracsob/constants.hpp"

using namespace fracsob;

namespace {

constexpr double kPi = std::numbers::pi;

TEST(SharpConstant, ReferenceValues) {
  EXPECT_NEAR(sharp_constant_K(3, 1.0), 2.32489470301925, 1e-12);
  EXPECT_NEAR(sharp_constant_K(3, 1.0), std::sqrt(kPi) * std::cbrt(2.0 / std::tgamma(1.5)), 1e-12);
  EXPECT_NEAR(sharp_constant_K(1, 0.5), 2.95867511918864, 1e-12);
}

TEST(SharpConstant, ZeroOrderLimit) {
  for (int n = 1; n <= 5; ++n) EXPECT_NEAR(sharp_constant_K(n, 1e-8), 1.0, 1e-6) << n;
}

TEST(SharpConstant, BlowUpConvergesMonotonically) {
  for (int n : {1, 2, 3}) {
    double last_gap = INFINITY;
    for (int k : {2, 3, 4}) {
      const double s = n - std::pow(10.0, -k);
      const double gap = std::fabs((n - s) * sharp_constant_K(n, s) - sphere_area(n));
      EXPECT_LT(gap, last_gap) << "n=" << n << " k=" << k;
      last_gap = gap;
    }
    EXPECT_LT(last_gap / sphere_area(n), 1e-3);
  }
}

TEST(SharpConstant, Domain) {
  EXPECT_THROW(sharp_constant_K(3, 0.0), DomainError);
  EXPECT_THROW(sharp_constant_K(3, 3.0), DomainError);
  EXPECT_THROW(K_asymptote(2, 2.0), DomainError);
}

TEST(KAsymptote, Values) {
  EXPECT_NEAR(K_asymptote(2, 2 - 1e-4), 2 * kPi * 1e4, 1e-6);
  EXPECT_DOUBLE_EQ(K_asymptote(1, 0.5), 4.0);
  EXPECT_NEAR(sharp_constant_K(3, 2.999) / K_asymptote(3, 2.999), 1.0, 0.01);
}

TEST(Exponents, Examples) {
  EXPECT_DOUBLE_EQ(sobolev_q(2.0, 3, 1.0), 6.0);
  EXPECT_DOUBLE_EQ(inverse_p(6.0, 3, 1.0), 2.0);
  EXPECT_NEAR(conformal_p(1, 0.5), 4.0 / 3.0, 1e-15);
  EXPECT_NEAR(sobolev_q(conformal_p(1, 0.5), 1, 0.5), 4.0, 1e-14);
  for (int n = 1; n <= 6; ++n)
    for (double s : {0.2, 0.5, 0.9})
      EXPECT_NEAR(sobolev_q(conformal_p(n, s), n, s), 2.0 * n / (n - s), 1e-12);
}

TEST(Exponents, Domain) {
  EXPECT_THROW(sobolev_q(2.0, 1, 0.5), DomainError);
  EXPECT_THROW(sobolev_q(1.0, 3, 1.0), DomainError);
  EXPECT_THROW(inverse_p(1.9, 1, 0.5), DomainError);
  const ExponentPair e = exponent_pair(2.0, 3, 1.0);
  EXPECT_DOUBLE_EQ(e.q, 6.0);
}

TEST(Exponents, RoundTripRandom) {
  std::mt19937 rng(42);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> u01(0.001, 0.999);
  for (int i = 0; i < 1000; ++i) {
    const int n = dim(rng);
    const double s = n * u01(rng);
    const double p = 1.0 + (n / s - 1.0) * u01(rng);
    const double q = sobolev_q(p, n, s);
    EXPECT_NEAR(inverse_p(q, n, s), p, 1e-12 * p);
  }
}

TEST(LAlpha, ReferenceValues) {
  EXPECT_NEAR(L_alpha(1.5, 3.0).value, 0.0176456950414182, 1e-12);
  EXPECT_NEAR(L_alpha(1.2, 2.2).value, 0.0160401759607747, 1e-12);
  EXPECT_NEAR(L_alpha(1.5, 1.51).value, 19.0192294569921, 1e-8);
  EXPECT_NEAR(L_alpha(1.0 + 1e-9, 2.0).value, 0.0, 1e-12);
}

TEST(LAlpha, Domain) {
  EXPECT_THROW(L_alpha(1.5, 1.5), DomainError);
  EXPECT_THROW(L_alpha(1.0, 2.0), DomainError);
}

TEST(Asymptotes, Values) {
  EXPECT_NEAR(case_A_asymptote(1.5, 1.6), 1.55510613497460, 1e-11);
  EXPECT_NEAR(case_B_asymptote(1.5, 30.0), 1.19983786485202e-21, 1e-32);
  EXPECT_TRUE(std::isfinite(case_B_asymptote(1.5, 200.0)));
}

TEST(Asymptotes, CaseAApproach) {
  for (double alpha : {1.2, 1.5, 2.0}) {
    const double far = std::fabs(L_alpha(alpha, alpha + 0.01).value / case_A_asymptote(alpha, alpha + 0.01) - 1);
    const double near = std::fabs(L_alpha(alpha, alpha + 0.001).value / case_A_asymptote(alpha, alpha + 0.001) - 1);
    EXPECT_LT(near, far) << alpha;
  }
}

TEST(CaseC, UpperBoundExample) {
  const CaseCBounds b = case_C_bounds(1.5, 3.0);
  EXPECT_DOUBLE_EQ(b.delta, 0.5);
  EXPECT_NEAR(b.upper, 0.165357671176984, 1e-13);
  EXPECT_GT(b.lower_shape, 0.0);
  EXPECT_THROW(case_C_bounds(1.5, 3.0, 1.0), DomainError);
  EXPECT_THROW(case_C_bounds(1.5, 3.0, 0.0), DomainError);
}

TEST(CaseC, UpperDominatesOnGrid) {
  for (double alpha : {1.2, 1.5, 2.0})
    for (double off = 0.5; off <= 10.0; off += 0.5) {
      const double p = alpha + off;
      const CaseCBounds b = case_C_bounds(alpha, p);
      EXPECT_GE(b.upper, L_alpha(alpha, p).value) << alpha << ' ' << p;
      EXPECT_GT(b.lower_shape, 0.0);
    }
}

TEST(CaseC, EmpiricalConstantIsBelowOne) {
  const std::vector<double> ps{2.0, 3.0, 5.0, 9.0};
  const double c = empirical_c_alpha(1.5, ps.data(), ps.data() + ps.size());
  EXPECT_GT(c, 0.0);
  EXPECT_LT(c, 1.0);
}

TEST(DAlpha, Composition) {
  EXPECT_NEAR(D_alpha_n(1.5, 1, 3.0), 2 * L_alpha(1.5, 3.0).value, 1e-14);
  EXPECT_NEAR(D_alpha_n(1.5, 3, 3.0), 0.0886969374553686, 1e-12);
  for (double p : {2.0, 3.0, 7.0}) {
    const double d = D_alpha_n(1.2, 2, p);
    EXPECT_NEAR(g_alpha_n(1.2, 2, p) * std::pow(d, 1.0 / p), 1.0, 1e-14);
  }
}

TEST(ZBounds, Examples) {
  const auto [lo, hi] = Z_bounds(1, 0.5, 2.0);
  EXPECT_NEAR(lo, 4.0, 1e-14);
  EXPECT_NEAR(hi, 4.0, 1e-14);
  for (int n = 1; n <= 4; ++n)
    for (double s : {0.1, 0.5, 0.9})
      for (double p : {1.0, 2.0, 5.0}) {
        const auto [l, u] = Z_bounds(n, s, p);
        EXPECT_LE(l, u);
        EXPECT_NEAR(u / l, n, 1e-12 * n);
      }
}

TEST(ZBounds, Attainment) {
  const QuadResult r = Z_attainment(3, 0.5, 2.0);
  const double upper = Z_bounds(3, 0.5, 2.0).second;
  EXPECT_NEAR(r.value, upper, 1e-6 * upper);
  EXPECT_NEAR(upper, sphere_area(3) / 1.0 * std::pow(sphere_area(3) / 3, 1.0 / 3.0), 1e-12);
}

}  // namespace
