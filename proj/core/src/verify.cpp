#include "fracsob/verify.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include "fracsob/constants.hpp"

namespace fracsob {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string family_of(const TestFunction& u) {
  if (u.family() != Family::custom_radial) return to_string(u.family());
  const std::string& name = u.name();
  return name.substr(0, name.find('#'));
}

SlackRecord base_record(std::string inequality, const TestFunction& u) {
  SlackRecord r;
  r.inequality = std::move(inequality);
  r.n = u.dimension();
  r.family = family_of(u);
  r.dilation = u.dilation();
  return r;
}

void check_sobolev_pair(int n, double s, double p, const char* who) {
  if (!(s > 0.0 && s < n)) throw DomainError(std::string(who) + ": need 0 < s < n");
  if (!(p > 1.0 && s * p < n)) throw DomainError(std::string(who) + ": need 1 < p < n/s");
}

// NaN sorts last so records with missing coordinates stay together.
bool less_nan(double a, double b) {
  if (std::isnan(a)) return false;
  if (std::isnan(b)) return true;
  return a < b;
}

}  // namespace

void SlackRecord::settle() {
  slack = rhs - lhs;
  relative_slack = rhs == 0.0 ? 0.0 : slack / rhs;
}

bool record_less(const SlackRecord& a, const SlackRecord& b) {
  if (a.inequality != b.inequality) return a.inequality < b.inequality;
  if (a.n != b.n) return a.n < b.n;
  for (auto [x, y] : {std::pair{a.s, b.s}, std::pair{a.p, b.p}, std::pair{a.q, b.q}, std::pair{a.alpha, b.alpha}}) {
    if (less_nan(x, y)) return true;
    if (less_nan(y, x)) return false;
  }
  if (a.family != b.family) return a.family < b.family;
  return less_nan(a.dilation, b.dilation);
}

void sort_records(std::vector<SlackRecord>& records) { std::stable_sort(records.begin(), records.end(), record_less); }

SlackRecord check_sobolev(const TestFunction& u, double s, double p, const NormOptions& opts) {
  const int n = u.dimension();
  check_sobolev_pair(n, s, p, "check_sobolev");
  SlackRecord r = base_record("sobolev", u);
  r.s = s;
  r.p = p;
  r.q = sobolev_q(p, n, s);
  r.constant = sharp_constant_K(n, s);
  const NormResult lhs = NormCache::global().lp(u, r.q, opts);
  const NormResult w = NormCache::global().sobolev(u, s, p, opts);
  r.lhs = lhs.value;
  r.rhs = r.constant * w.value;
  r.confidence = lhs.error_estimate + r.constant * w.error_estimate;
  r.low_confidence = lhs.low_confidence || w.low_confidence;
  r.settle();
  return r;
}

std::vector<SlackRecord> dilation_covariance(const TestFunction& u, double s, double p,
                                             const std::vector<double>& lambdas, std::optional<double> q_override,
                                             const NormOptions& opts) {
  std::vector<SlackRecord> out;
  for (double lambda : lambdas) {
    if (!(lambda > 0.0)) throw DomainError("dilation_covariance: lambda must be positive");
    const TestFunction v = u.dilated(lambda);
    SlackRecord r = check_sobolev(v, s, p, opts);
    r.inequality = "dilation";
    if (q_override) {
      const NormResult lhs = NormCache::global().lp(v, *q_override, opts);
      const NormResult w = NormCache::global().sobolev(v, s, p, opts);
      r.q = *q_override;
      r.lhs = lhs.value;
      r.confidence = lhs.error_estimate + r.constant * w.error_estimate;
      r.settle();
    }
    out.push_back(r);
  }
  return out;
}

ChainReport check_theorem21(const TestFunction& u, const PsiFunction& psi, double s, const std::vector<double>& q_grid,
                            const SweepGrid& grid, const NormOptions& opts) {
  const int n = u.dimension();
  const PsiFunction nu = nu_transform(psi, n, s);  // validates the support
  const double K = sharp_constant_K(n, s);
  const SweepResult sgl = sgl_norm(u, psi, s, grid, opts);
  const SweepResult gnu = gls_norm([&](double q) { return NormCache::global().lp(u, q, opts); }, nu, grid);

  ChainReport out;
  SlackRecord& g = out.global;
  g = base_record("theorem21", u);
  g.s = s;
  g.p = sgl.arg;
  g.q = gnu.arg;
  g.constant = K;
  g.lhs = gnu.value();
  g.rhs = K * sgl.value();
  g.confidence = gnu.norm.error_estimate + K * sgl.norm.error_estimate;
  g.low_confidence = sgl.norm.low_confidence || gnu.norm.low_confidence;
  g.settle();

  std::vector<double> qs = q_grid;
  if (psi.is_degenerate()) qs = {nu.lower()};
  for (double q : qs) {
    if (!nu.in_support(q)) throw DomainError("check_theorem21: q-grid point outside the support of nu");
    const double p = inverse_p(q, n, s);
    const NormResult lq = NormCache::global().lp(u, q, opts);
    SlackRecord r = base_record("theorem21_chain", u);
    r.s = s;
    r.p = p;
    r.q = q;
    r.constant = K * psi(p);
    r.lhs = lq.value;
    r.rhs = r.constant * sgl.value();
    r.confidence = lq.error_estimate + r.constant * sgl.norm.error_estimate;
    r.low_confidence = lq.low_confidence || g.low_confidence;
    r.settle();
    out.pointwise.push_back(r);
  }
  return out;
}

SlackRecord check_theorem31(const TestFunction& u, const TauFunction& tau, double q, const SweepGrid& p_grid,
                            const SweepGrid& s_grid, const NormOptions& opts) {
  const int n = u.dimension();
  const LambdaRow row = lambda_table(tau, n, {q}, s_grid).front();
  if (!std::isfinite(row.value)) throw DomainError("check_theorem31: no admissible s for this q");
  const SweepResult dgl = dgl_norm(u, tau, p_grid, s_grid, opts);
  const NormResult lq = NormCache::global().lp(u, q, opts);
  SlackRecord r = base_record("theorem31", u);
  r.s = row.arg_s;
  r.p = inverse_p(q, n, row.arg_s);
  r.q = q;
  r.constant = row.value;
  r.lhs = lq.value;
  r.rhs = row.value * dgl.value();
  r.confidence = lq.error_estimate + row.value * dgl.norm.error_estimate;
  r.low_confidence = lq.low_confidence || dgl.norm.low_confidence;
  r.settle();
  return r;
}

SlackRecord check_corollary31(const TestFunction& u, const TauFunction& tau, const std::vector<double>& q_points,
                              const SweepGrid& p_grid, const SweepGrid& s_grid, const NormOptions& opts) {
  const PsiFunction lambda = lambda_transform(tau, u.dimension(), q_points, s_grid);
  // The tabulated weight is only known at its knots; sweep exactly those.
  double best = 0.0;
  double best_err = 0.0;
  double best_q = lambda.lower();
  bool low = false;
  for (double q : q_points) {
    if (!lambda.in_support(q)) continue;
    const NormResult lq = NormCache::global().lp(u, q, opts);
    const double w = lambda(q);
    low = low || lq.low_confidence;
    if (lq.value / w > best) {
      best = lq.value / w;
      best_err = lq.error_estimate / w;
      best_q = q;
    }
  }
  const SweepResult dgl = dgl_norm(u, tau, p_grid, s_grid, opts);
  SlackRecord r = base_record("corollary31", u);
  r.q = best_q;
  r.constant = 1.0;
  r.lhs = best;
  r.rhs = dgl.value();
  r.confidence = best_err + dgl.norm.error_estimate;
  r.low_confidence = low || dgl.norm.low_confidence;
  r.settle();
  return r;
}

SlackRecord check_weighted(const TestFunction& f, const ConvexDomain& domain, double alpha, double p,
                           const NormOptions& opts) {
  if (!(alpha > 1.0 && alpha < p)) throw DomainError("check_weighted: need 1 < alpha < p");
  if (f.dimension() != domain.dimension()) throw DomainError("check_weighted: dimension mismatch");
  SlackRecord r = base_record("weighted", f);
  r.p = p;
  r.alpha = alpha;
  r.constant = g_alpha_n(alpha, f.dimension(), p);
  const NormResult lhs = NormCache::global().weighted(f, p, domain, alpha, opts);
  const NormResult d = NormCache::global().delta(f, p, domain, alpha, opts);
  r.lhs = lhs.value;
  r.rhs = r.constant * d.value;
  r.confidence = lhs.error_estimate + r.constant * d.error_estimate;
  r.low_confidence = lhs.low_confidence || d.low_confidence;
  r.settle();
  return r;
}

ChainReport check_theorem41(const TestFunction& f, const PsiFunction& psi, const ConvexDomain& domain, double alpha,
                            const SweepGrid& grid, const NormOptions& opts) {
  if (f.dimension() != domain.dimension()) throw DomainError("check_theorem41: dimension mismatch");
  const PsiFunction theta = theta_transform(psi, alpha, f.dimension());  // validates the support
  auto& cache = NormCache::global();
  const SweepResult lhs =
      gls_norm([&](double p) { return cache.weighted(f, p, domain, alpha, opts); }, theta, grid);
  const SweepResult rhs = gls_norm([&](double p) { return cache.delta(f, p, domain, alpha, opts); }, psi, grid);

  ChainReport out;
  SlackRecord& g = out.global;
  g = base_record("theorem41", f);
  g.p = lhs.arg;
  g.alpha = alpha;
  g.constant = 1.0;
  g.lhs = lhs.value();
  g.rhs = rhs.value();
  g.confidence = lhs.norm.error_estimate + rhs.norm.error_estimate;
  g.low_confidence = lhs.norm.low_confidence || rhs.norm.low_confidence;
  g.settle();

  const std::vector<double> ps = psi.is_degenerate() ? std::vector<double>{psi.lower()} : grid.points(psi.lower(), psi.upper());
  for (double p : ps) {
    SlackRecord r = check_weighted(f, domain, alpha, p, opts);
    r.inequality = "theorem41_chain";
    out.pointwise.push_back(r);
  }
  return out;
}

std::string to_string(ProbeFamily f) {
  return f == ProbeFamily::conformal_bubble ? "conformal-bubble" : "gaussian-scale";
}

ProbeReport sharpness_probe(int n, double s, ProbeFamily family, double p, const NormOptions& opts) {
  check_sobolev_pair(n, s, p, "sharpness_probe");
  ProbeReport rep;
  rep.family = family;
  rep.n = n;
  rep.s = s;
  rep.p = p;
  rep.q = sobolev_q(p, n, s);
  rep.K = sharp_constant_K(n, s);

  auto evaluate = [&](const TestFunction& u, double beta, double scale) {
    ProbePoint pt{beta, scale, 0.0, 0.0, false};
    try {
      const NormResult lq = NormCache::global().lp(u, rep.q, opts);
      const NormResult w = NormCache::global().sobolev(u, s, p, opts);
      if (lq.is_infinite() || w.is_infinite() || !(w.value > 0.0)) {
        pt.excluded = true;
      } else {
        pt.ratio = lq.value / w.value;
        pt.error = pt.ratio * (lq.error_estimate / lq.value + w.error_estimate / w.value);
      }
    } catch (const std::exception&) {
      pt.excluded = true;
    }
    rep.points.push_back(pt);
    return pt;
  };

  if (family == ProbeFamily::conformal_bubble) {
    // Finiteness of both sides needs beta > (n - s) / 2 at the conformal pair
    // and beta q > n in general.
    const double centre = n - s;
    const double floor = std::max(0.5 * centre, n / rep.q);
    auto ratio_at = [&](double beta, double lambda) {
      if (!(beta > floor)) return ProbePoint{beta, lambda, 0.0, 0.0, true};
      return evaluate(TestFunction::bubble(n, beta).dilated(lambda), beta, lambda);
    };
    for (double f : {0.8, 0.9, 0.95, 1.0, 1.05, 1.1, 1.25})
      for (double lambda : {0.5, 1.0, 2.0}) ratio_at(f * centre, lambda);
    // Golden-section refinement in beta at unit dilation around the best grid beta.
    double best_beta = centre;
    double best = 0.0;
    for (const ProbePoint& pt : rep.points)
      if (!pt.excluded && pt.ratio > best) {
        best = pt.ratio;
        best_beta = pt.beta;
      }
    double a = std::max(best_beta - 0.05 * centre, floor + 1e-3 * centre);
    double b = best_beta + 0.05 * centre;
    constexpr double g = 0.6180339887498949;
    double x1 = b - g * (b - a);
    double x2 = a + g * (b - a);
    double f1 = ratio_at(x1, 1.0).ratio;
    double f2 = ratio_at(x2, 1.0).ratio;
    for (int k = 0; k < 8; ++k) {
      if (f1 > f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - g * (b - a);
        f1 = ratio_at(x1, 1.0).ratio;
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + g * (b - a);
        f2 = ratio_at(x2, 1.0).ratio;
      }
    }
  } else {
    for (double sigma : {0.25, 0.5, 1.0, 2.0, 4.0}) evaluate(TestFunction::gaussian(n, sigma), kNaN, sigma);
  }

  for (const ProbePoint& pt : rep.points) {
    if (pt.excluded) {
      ++rep.excluded;
      continue;
    }
    if (pt.ratio > rep.max_ratio) {
      rep.max_ratio = pt.ratio;
      rep.confidence = pt.error;
      rep.arg_beta = pt.beta;
      rep.arg_dilation = pt.dilation;
    }
  }
  rep.ratio_over_K = rep.max_ratio / rep.K;
  return rep;
}

TestFunction xexp_profile() {
  CustomTraits traits;
  traits.support_radius = 750.0;  // below 1e-300 from here on
  traits.length_scale = 1.0;
  traits.sup_abs = std::exp(-1.0);
  return TestFunction::custom(1, "xexp", [](double r) { return r * std::exp(-r); }, traits);
}

}  // namespace fracsob
