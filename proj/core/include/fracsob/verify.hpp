#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fracsob/glspaces.hpp"

namespace fracsob {

/// Both sides of one checked inequality lhs <= rhs.
///
/// Coordinates that do not apply are NaN. slack = rhs - lhs exactly, and
/// confidence is the summed absolute error of both sides.
struct SlackRecord {
  std::string inequality;
  int n = 1;
  double s = std::numeric_limits<double>::quiet_NaN();
  double p = std::numeric_limits<double>::quiet_NaN();
  double q = std::numeric_limits<double>::quiet_NaN();
  double alpha = std::numeric_limits<double>::quiet_NaN();
  std::string family;
  double dilation = 1.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double constant = std::numeric_limits<double>::quiet_NaN();
  double slack = 0.0;
  double relative_slack = 0.0;
  double confidence = 0.0;
  bool low_confidence = false;

  bool violated() const noexcept { return slack < -3.0 * confidence; }
  /// Fills slack and relative_slack from lhs and rhs.
  void settle();
};

/// Deterministic order: inequality, then n, s, p, q, alpha, family, dilation.
bool record_less(const SlackRecord& a, const SlackRecord& b);
void sort_records(std::vector<SlackRecord>& records);

/// |u|_q <= K(n, s) ||u||W_p^s with q = sobolev_q(p). Throws DomainError
/// unless 0 < s < n and 1 < p < n/s.
SlackRecord check_sobolev(const TestFunction& u, double s, double p, const NormOptions& opts = {});

/// check_sobolev on u dilated by each lambda. With q_override the left side
/// uses that exponent instead of the conjugate one (a negative control).
std::vector<SlackRecord> dilation_covariance(const TestFunction& u, double s, double p,
                                             const std::vector<double>& lambdas,
                                             std::optional<double> q_override = std::nullopt,
                                             const NormOptions& opts = {});

struct ChainReport {
  SlackRecord global;
  /// Pointwise records, one per grid exponent.
  std::vector<SlackRecord> pointwise;
};

/// ||u||G nu <= K ||u||SGL psi, plus |u|_q <= K psi(inverse_p(q)) ||u||SGL psi on q_grid.
ChainReport check_theorem21(const TestFunction& u, const PsiFunction& psi, double s,
                            const std::vector<double>& q_grid, const SweepGrid& grid = {},
                            const NormOptions& opts = {});

/// |u|_q <= lambda(q) |||u|||DGL tau.
SlackRecord check_theorem31(const TestFunction& u, const TauFunction& tau, double q, const SweepGrid& p_grid = {},
                            const SweepGrid& s_grid = {}, const NormOptions& opts = {});

/// ||u||G lambda <= |||u|||DGL tau with lambda tabulated on q_points.
SlackRecord check_corollary31(const TestFunction& u, const TauFunction& tau, const std::vector<double>& q_points,
                              const SweepGrid& p_grid = {}, const SweepGrid& s_grid = {},
                              const NormOptions& opts = {});

/// |f|_{L_p(mu_alpha)} <= g_{alpha,n}(p) |delta f|_{L_p(nu_alpha)}.
SlackRecord check_weighted(const TestFunction& f, const ConvexDomain& domain, double alpha, double p,
                           const NormOptions& opts = {});

/// ||f||G theta(mu_alpha) <= ||delta f||G psi(nu_alpha) with theta = g psi, plus the
/// per-exponent chain on the grid points of the sweep.
ChainReport check_theorem41(const TestFunction& f, const PsiFunction& psi, const ConvexDomain& domain,
                            double alpha, const SweepGrid& grid = {}, const NormOptions& opts = {});

enum class ProbeFamily { conformal_bubble, gaussian_scale };

std::string to_string(ProbeFamily f);

struct ProbePoint {
  double beta;      // bubble exponent, NaN for gaussians
  double dilation;  // lambda for bubbles, sigma for gaussians
  double ratio;     // |u|_q / ||u||W_p^s
  double error;
  bool excluded;    // norm evaluation failed
};

struct ProbeReport {
  ProbeFamily family;
  int n;
  double s, p, q;
  double K;
  double max_ratio = 0.0;
  double ratio_over_K = 0.0;
  double arg_beta = std::numeric_limits<double>::quiet_NaN();
  double arg_dilation = std::numeric_limits<double>::quiet_NaN();
  double confidence = 0.0;
  std::vector<ProbePoint> points;
  std::size_t excluded = 0;

  /// max_ratio <= K (1 + 3 confidence / K); the validity side of sharpness.
  bool within_constant() const noexcept { return max_ratio <= K + 3.0 * confidence; }
};

/// Maximises |u|_q / ||u||W_p^s over the family's parameters. Bubbles sweep
/// beta around n - s and the dilation; gaussians sweep sigma.
ProbeReport sharpness_probe(int n, double s, ProbeFamily family, double p, const NormOptions& opts = {});

/// x e^{-x} on the half-line, the weighted-inequality test profile.
TestFunction xexp_profile();

}  // namespace fracsob
