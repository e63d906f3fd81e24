#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fracsob/norms.hpp"

namespace fracsob {

/// A weight p -> psi(p) in (0, inf) on an open interval (A, B), +inf outside.
///
/// The degenerate weight psi_r is finite only at p = r; tabulated weights
/// interpolate log-linearly between knots and are finite on [first, last].
class PsiFunction {
 public:
  enum class Kind { analytic, degenerate, natural, tabulated };

  static PsiFunction analytic(std::string name, double A, double B, std::function<double(double)> f);
  static PsiFunction constant(double c, double A, double B);
  /// p^a on (A, B).
  static PsiFunction power(double a, double A, double B);
  /// value at p = r, +inf elsewhere.
  static PsiFunction degenerate(double r, double value = 1.0);
  /// p -> |f|_p on (A, B), memoised through the global NormCache.
  static PsiFunction natural(const TestFunction& f, double A, double B, const NormOptions& opts = {});
  static PsiFunction tabulated(std::string name, std::vector<double> knots, std::vector<double> values);

  /// "const c", "power a", "degenerate r"; support (A, B) is ignored for degenerate.
  static PsiFunction parse(const std::string& spec, double A, double B);

  double operator()(double p) const;

  Kind kind() const noexcept { return kind_; }
  double lower() const noexcept { return A_; }
  double upper() const noexcept { return B_; }
  bool is_degenerate() const noexcept { return kind_ == Kind::degenerate; }
  /// Tabulated weights are interpolated, hence approximate between knots.
  bool approximate() const noexcept { return kind_ == Kind::tabulated; }
  const std::string& name() const noexcept { return name_; }
  /// True when p lies in the support (the single point for degenerate weights).
  bool in_support(double p) const;

  PsiFunction scaled(double c) const;

 private:
  PsiFunction() = default;
  Kind kind_ = Kind::analytic;
  double A_ = 1.0;
  double B_ = 1.0;
  std::string name_;
  std::shared_ptr<const std::function<double(double)>> eval_;
};

/// tau(p, s) >= 1 on (P1, P2) x (S1, S2), normalised at construction so that
/// its infimum over the normalisation grid is 1. Either range may be a single
/// point (P1 = P2 or S1 = S2).
class TauFunction {
 public:
  TauFunction(std::string name, double P1, double P2, double S1, double S2,
              std::function<double(double, double)> raw);
  static TauFunction constant(double P1, double P2, double S1, double S2);

  double operator()(double p, double s) const;
  double p_lower() const noexcept { return P1_; }
  double p_upper() const noexcept { return P2_; }
  double s_lower() const noexcept { return S1_; }
  double s_upper() const noexcept { return S2_; }
  /// The raw infimum that was divided out.
  double normalisation() const noexcept { return norm_; }
  const std::string& name() const noexcept { return name_; }

 private:
  std::string name_;
  double P1_, P2_, S1_, S2_;
  double norm_ = 1.0;
  std::shared_ptr<const std::function<double(double, double)>> raw_;
};

/// Sweep policy for sup / inf over an open interval.
struct SweepGrid {
  /// Evenly spaced interior points (in the compactified coordinate).
  int interior_points = 16;
  /// Offsets from each open endpoint, in the compactified coordinate.
  std::vector<double> eps_schedule{1e-1, 1e-2, 1e-3, 1e-4};
  /// Golden-section passes around the running extremum.
  int refine_passes = 3;

  /// Points strictly inside (A, B); a single point when A == B.
  std::vector<double> points(double A, double B) const;
  /// Map from the compactified coordinate t in (0, 1) to (A, B).
  static double map(double A, double B, double t);
  static double unmap(double A, double B, double p);
  SweepGrid doubled() const;
};

struct TrendPoint {
  double eps;
  double at;
  double value;
  double running;  // extremum so far along the schedule
};

/// Outcome of a sup or inf sweep.
struct SweepResult {
  NormResult norm;
  double arg = 0.0;
  std::vector<TrendPoint> lower_trend;
  std::vector<TrendPoint> upper_trend;
  /// The running extremum still moved by more than 1% at the last schedule step.
  bool endpoint_lower = false;
  bool endpoint_upper = false;
  std::size_t evaluations = 0;

  double value() const noexcept { return norm.value; }
  bool possibly_infinite() const noexcept { return endpoint_lower || endpoint_upper; }
};

enum class Extremum { sup, inf };

/// Value with its absolute error, as returned by sweep integrands.
struct Sample {
  double value;
  double error;
};

SweepResult sweep(const std::function<Sample(double)>& f, double A, double B, const SweepGrid& grid,
                  Extremum which);

using ExponentMap = std::function<NormResult(double)>;

/// ||f||_{G psi} = sup_p pmap(p) / psi(p).
SweepResult gls_norm(const ExponentMap& pmap, const PsiFunction& psi, const SweepGrid& grid = {});

/// sup_p ||u||W_p^s / psi(p); psi must live inside (1, n/s).
SweepResult sgl_norm(const TestFunction& u, const PsiFunction& psi, double s, const SweepGrid& grid = {},
                     const NormOptions& opts = {});

/// nu(q) = psi(qn / (n + qs)) on (sobolev_q(A), sobolev_q(B)).
PsiFunction nu_transform(const PsiFunction& psi, int n, double s);

/// sup_{p, s} ||u||W_p^s / tau(p, s).
SweepResult dgl_norm(const TestFunction& u, const TauFunction& tau, const SweepGrid& p_grid = {},
                     const SweepGrid& s_grid = {}, const NormOptions& opts = {});

struct LambdaRow {
  double q;
  double value;   // +inf when no s in range is admissible
  double arg_s;
};

/// lambda(q) = inf_s K(n, s) tau(qn/(n+qs), s) at each q, with the minimising s.
std::vector<LambdaRow> lambda_table(const TauFunction& tau, int n, const std::vector<double>& q_points,
                                    const SweepGrid& s_grid = {});

/// Tabulated psi built from lambda_table over the admissible q.
PsiFunction lambda_transform(const TauFunction& tau, int n, const std::vector<double>& q_points,
                             const SweepGrid& s_grid = {});

/// zeta(q) = inf_s K(n, s) ||u||W^s_{qn/(n+qs)} over (S1, S2).
SweepResult zeta_of_u(const TestFunction& u, double q, int n, double S1, double S2, const SweepGrid& s_grid = {},
                      const NormOptions& opts = {});

/// theta(p) = g_{alpha,n}(p) psi(p); psi must live inside (alpha, inf).
PsiFunction theta_transform(const PsiFunction& psi, double alpha, int n);

}  // namespace fracsob
