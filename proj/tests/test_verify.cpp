#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "fracsob/constants.hpp"
#include "fracsob/verify.hpp"

using namespace fracsob;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

TEST(SlackRecordTest, SettleAndViolation) {
  SlackRecord r;
  r.lhs = 2.0;
  r.rhs = 1.0;
  r.confidence = 0.1;
  r.settle();
  EXPECT_EQ(r.slack, -1.0);
  EXPECT_EQ(r.relative_slack, -1.0);
  EXPECT_TRUE(r.violated());
  r.confidence = 0.5;
  EXPECT_FALSE(r.violated());
}

TEST(SlackRecordTest, DeterministicOrder) {
  std::vector<SlackRecord> rs(4);
  rs[0].inequality = "sobolev";
  rs[0].p = 2.0;
  rs[1].inequality = "dilation";
  rs[2].inequality = "sobolev";
  rs[2].p = 1.5;
  rs[3].inequality = "sobolev";
  rs[3].p = 1.5;
  rs[3].n = 3;
  sort_records(rs);
  EXPECT_EQ(rs[0].inequality, "dilation");
  EXPECT_EQ(rs[1].p, 1.5);
  EXPECT_EQ(rs[2].p, 2.0);
  EXPECT_EQ(rs[3].n, 3);
}

TEST(Sobolev, ZeroFunction) {
  const SlackRecord r = check_sobolev(TestFunction::zero(1), 0.5, 4.0 / 3.0);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.rhs, 0.0);
  EXPECT_EQ(r.slack, 0.0);
}

TEST(Sobolev, ConformalGaussian) {
  const SlackRecord r = check_sobolev(TestFunction::gaussian(1), 0.5, conformal_p(1, 0.5));
  EXPECT_DOUBLE_EQ(r.q, 4.0);
  EXPECT_NEAR(r.lhs, lp_norm(TestFunction::gaussian(1), 4.0).value, 1e-12);
  EXPECT_NEAR(r.rhs, 4.398504177, 1e-8);
  EXPECT_GE(r.slack, 0.0);
  EXPECT_FALSE(r.violated());
  EXPECT_EQ(r.inequality, "sobolev");
  EXPECT_EQ(r.family, "gaussian");
}

// With the e^{-i x.xi} transform the extremal ratio is K (2 pi)^{-s}, so the
// conformal bubble leaves relative slack exactly 1 - (2 pi)^{-s}.
TEST(Sobolev, ConformalBubbleSlack) {
  const SlackRecord r = check_sobolev(TestFunction::bubble(3, 2.0), 1.0, 1.5);
  EXPECT_NEAR(r.relative_slack, 1.0 - 1.0 / (2 * kPi), 1e-7);
  const SlackRecord h = check_sobolev(TestFunction::bubble(1, 0.5), 0.5, conformal_p(1, 0.5));
  EXPECT_NEAR(h.relative_slack, 1.0 - std::pow(2 * kPi, -0.5), 1e-6);
}

TEST(Sobolev, Domain) {
  EXPECT_THROW(check_sobolev(TestFunction::gaussian(1), 0.5, 2.0), DomainError);
  EXPECT_THROW(check_sobolev(TestFunction::gaussian(1), 0.5, 1.0), DomainError);
  EXPECT_THROW(check_sobolev(TestFunction::gaussian(1), 1.5, 1.5), DomainError);
}

TEST(Dilation, RelativeSlackInvariant) {
  const auto recs = dilation_covariance(TestFunction::gaussian(1), 0.5, conformal_p(1, 0.5), {0.5, 1.0, 2.0, 4.0});
  ASSERT_EQ(recs.size(), 4u);
  const SlackRecord base = check_sobolev(TestFunction::gaussian(1), 0.5, conformal_p(1, 0.5));
  for (const SlackRecord& r : recs) {
    EXPECT_NEAR(r.relative_slack, 0.759447, 1e-6) << r.dilation;
    EXPECT_EQ(r.inequality, "dilation");
  }
  EXPECT_NEAR(recs[1].lhs, base.lhs, 1e-14);
  EXPECT_NEAR(recs[1].rhs, base.rhs, 1e-14);
}

TEST(Dilation, MismatchedExponentDrifts) {
  const double p = conformal_p(1, 0.5);
  const auto recs = dilation_covariance(TestFunction::gaussian(1), 0.5, p, {0.5, 2.0}, 5.0);
  // lhs/rhs changes by lambda^{n/q_correct - n/q} between dilations.
  const double r0 = recs[0].lhs / recs[0].rhs;
  const double r1 = recs[1].lhs / recs[1].rhs;
  EXPECT_LT(rel(r1 / r0, std::pow(4.0, 1.0 / 4.0 - 1.0 / 5.0)), 1e-6);
  EXPECT_NE(recs[0].relative_slack, recs[1].relative_slack);
}

TEST(Theorem21, DegenerateReducesToSobolev) {
  const auto u = TestFunction::bump(1);
  const ChainReport c = check_theorem21(u, PsiFunction::degenerate(1.5), 0.5, {6.0});
  const SlackRecord s = check_sobolev(u, 0.5, 1.5);
  EXPECT_LT(rel(c.global.lhs, s.lhs), 1e-9);
  EXPECT_LT(rel(c.global.rhs, s.rhs), 1e-9);
  EXPECT_NEAR(c.global.lhs, 0.3426390005, 1e-9);
}

TEST(Theorem21, BumpConstantPsi) {
  const ChainReport c = check_theorem21(TestFunction::bump(1), PsiFunction::constant(1.0, 1.0, 2.0), 0.5,
                                        {2.5, 4.0, 8.0, 11.0});
  EXPECT_FALSE(c.global.violated());
  // sup over q of |u|_q tends to the sup norm e^{-1}.
  EXPECT_NEAR(c.global.lhs, std::exp(-1.0), 1e-3);
  ASSERT_EQ(c.pointwise.size(), 4u);
  for (const SlackRecord& r : c.pointwise) {
    EXPECT_FALSE(r.violated()) << r.q;
    EXPECT_EQ(r.inequality, "theorem21_chain");
  }
}

TEST(Theorem21, ZeroFunction) {
  const ChainReport c =
      check_theorem21(TestFunction::zero(1), PsiFunction::constant(1.0, 1.0, 2.0), 0.5, {3.0, 5.0});
  EXPECT_EQ(c.global.slack, 0.0);
  for (const SlackRecord& r : c.pointwise) EXPECT_EQ(r.slack, 0.0);
}

TEST(Theorem21, SupportViolation) {
  EXPECT_THROW(check_theorem21(TestFunction::bump(1), PsiFunction::constant(1.0, 1.0, 3.0), 0.5, {4.0}),
               DomainError);
}

TEST(Theorem31, GaussianConstantTau) {
  const SlackRecord r =
      check_theorem31(TestFunction::gaussian(1), TauFunction::constant(1.0, INFINITY, 0.3, 0.7), 5.0);
  EXPECT_NEAR(r.lhs, lp_norm(TestFunction::gaussian(1), 5.0).value, 1e-12);
  EXPECT_GE(r.slack, -3 * r.confidence);
  EXPECT_NEAR(r.rhs, 6.4262, 1e-3);
}

TEST(Theorem31, SingletonTauIsSobolev) {
  const double p = conformal_p(1, 0.5);
  const auto u = TestFunction::gaussian(1);
  const SlackRecord r = check_theorem31(u, TauFunction::constant(p, p, 0.5, 0.5), 4.0);
  const SlackRecord s = check_sobolev(u, 0.5, p);
  EXPECT_LT(rel(r.lhs, s.lhs), 1e-12);
  EXPECT_LT(rel(r.rhs, s.rhs), 1e-9);
}

TEST(Theorem31, Zero) {
  const SlackRecord r = check_theorem31(TestFunction::zero(1), TauFunction::constant(1.0, INFINITY, 0.3, 0.7), 5.0);
  EXPECT_EQ(r.slack, 0.0);
}

TEST(Corollary31, GaussianConstantTau) {
  const SlackRecord r = check_corollary31(TestFunction::gaussian(1), TauFunction::constant(1.0, INFINITY, 0.3, 0.7),
                                          {3.0, 4.0, 5.0, 6.0, 8.0, 10.0});
  EXPECT_FALSE(r.violated());
  EXPECT_GT(r.relative_slack, 0.5);
}

TEST(Weighted, XexpAndBump) {
  const auto line = ConvexDomain::half_line();
  const SlackRecord a = check_weighted(xexp_profile(), line, 1.5, 2.5);
  EXPECT_FALSE(a.violated());
  const SlackRecord b = check_weighted(TestFunction::bump(1, 0.5).shifted(1.5), line, 1.2, 2.0);
  EXPECT_FALSE(b.violated());
  EXPECT_NEAR(b.lhs, 0.2040082825, 1e-8);
  EXPECT_NEAR(b.rhs, 4.689407736, 1e-6);
  const SlackRecord z = check_weighted(TestFunction::zero(1), line, 1.5, 2.0);
  EXPECT_EQ(z.slack, 0.0);
  EXPECT_THROW(check_weighted(xexp_profile(), line, 2.5, 2.0), DomainError);
}

TEST(Weighted, ReferenceSides) {
  const SlackRecord r = check_weighted(xexp_profile(), ConvexDomain::half_line(), 1.2, 2.0);
  EXPECT_NEAR(r.lhs, 0.5171747784, 1e-8);
  EXPECT_NEAR(r.rhs, 2.937666894, 1e-6);
  EXPECT_NEAR(r.constant, g_alpha_n(1.2, 1, 2.0), 1e-14);
}

TEST(Theorem41, XexpConstantPsi) {
  const ChainReport c =
      check_theorem41(xexp_profile(), PsiFunction::constant(1.0, 1.6, 4.0), ConvexDomain::half_line(), 1.5);
  EXPECT_FALSE(c.global.violated());
  EXPECT_NEAR(c.global.lhs, 1.5123, 1e-3);
  EXPECT_NEAR(c.global.rhs, 3.2430, 1e-3);
  EXPECT_FALSE(c.pointwise.empty());
  for (const SlackRecord& r : c.pointwise) EXPECT_FALSE(r.violated()) << r.p;
}

TEST(Theorem41, DegenerateReducesToWeighted) {
  const auto line = ConvexDomain::half_line();
  const ChainReport c = check_theorem41(xexp_profile(), PsiFunction::degenerate(2.5), line, 1.5);
  const SlackRecord w = check_weighted(xexp_profile(), line, 1.5, 2.5);
  EXPECT_LT(std::fabs(c.global.relative_slack - w.relative_slack), 1e-9);
  EXPECT_LT(rel(c.global.rhs, w.rhs / w.constant), 1e-9);
}

TEST(Probe, BubbleStaysWithinConstant) {
  const double p = conformal_p(1, 0.5);
  const ProbeReport b = sharpness_probe(1, 0.5, ProbeFamily::conformal_bubble, p);
  EXPECT_TRUE(b.within_constant());
  EXPECT_EQ(b.excluded, 0u);
  // The sup over conformal bubbles is attained at beta = n - s.
  EXPECT_NEAR(b.arg_beta, 0.5, 0.01);
  EXPECT_NEAR(b.ratio_over_K, std::pow(2 * kPi, -0.5), 1e-6);
  const ProbeReport g = sharpness_probe(1, 0.5, ProbeFamily::gaussian_scale, p);
  EXPECT_TRUE(g.within_constant());
  EXPECT_LT(g.max_ratio, b.max_ratio);
  EXPECT_EQ(to_string(b.family), "conformal-bubble");
}

TEST(Probe, ArgmaxStableUnderTighterQuadrature) {
  const double p = conformal_p(1, 0.5);
  NormOptions tight;
  tight.rel_tol = 1e-11;
  tight.laplacian.rel_tol = 1e-11;
  const ProbeReport a = sharpness_probe(1, 0.5, ProbeFamily::conformal_bubble, p);
  const ProbeReport b = sharpness_probe(1, 0.5, ProbeFamily::conformal_bubble, p, tight);
  EXPECT_NEAR(a.arg_beta, b.arg_beta, 0.05 * 0.5);
  EXPECT_LT(rel(a.max_ratio, b.max_ratio), 1e-6);
}

// Degenerate collapse of the G-level checkers on random configurations.
TEST(Properties, DegenerateCollapseRandom) {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> u01(0.1, 0.9);
  for (int i = 0; i < 20; ++i) {
    if (i % 2 == 0) {
      const double s = 0.2 + 0.6 * u01(rng);
      const double r = 1.0 + (1.0 / s - 1.0) * u01(rng);
      const auto u = i % 4 == 0 ? TestFunction::bump(1) : TestFunction::gaussian(1, 0.5 + u01(rng));
      const ChainReport c = check_theorem21(u, PsiFunction::degenerate(r), s, {});
      const SlackRecord d = check_sobolev(u, s, r);
      EXPECT_LT(rel(c.global.lhs, d.lhs), 1e-9) << i;
      EXPECT_LT(rel(c.global.rhs, d.rhs), 1e-9) << i;
    } else {
      const double alpha = 1.1 + 0.8 * u01(rng);
      const double r = alpha + 0.2 + 2.0 * u01(rng);
      const auto f = i % 4 == 1 ? xexp_profile() : TestFunction::bump(1, 0.5).shifted(1.0 + u01(rng));
      const auto line = ConvexDomain::half_line();
      const ChainReport c = check_theorem41(f, PsiFunction::degenerate(r), line, alpha);
      const SlackRecord w = check_weighted(f, line, alpha, r);
      EXPECT_LT(std::fabs(c.global.relative_slack - w.relative_slack), 1e-9) << i;
    }
  }
}

}  // namespace
