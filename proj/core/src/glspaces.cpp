#include "fracsob/glspaces.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <sstream>

#include "fracsob/constants.hpp"

namespace fracsob {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kGolden = 0.6180339887498949;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

void check_support(double A, double B, const char* who) {
  if (!(A >= 1.0) || !(B > A)) throw DomainError(std::string(who) + ": support must satisfy 1 <= A < B");
}

}  // namespace

// ---------------------------------------------------------------------------
// PsiFunction

PsiFunction PsiFunction::analytic(std::string name, double A, double B, std::function<double(double)> f) {
  check_support(A, B, "PsiFunction");
  PsiFunction psi;
  psi.kind_ = Kind::analytic;
  psi.A_ = A;
  psi.B_ = B;
  psi.name_ = std::move(name);
  psi.eval_ = std::make_shared<const std::function<double(double)>>(std::move(f));
  return psi;
}

PsiFunction PsiFunction::constant(double c, double A, double B) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("PsiFunction::constant: value must be positive");
  return analytic("const " + fmt(c), A, B, [c](double) { return c; });
}

PsiFunction PsiFunction::power(double a, double A, double B) {
  return analytic("power " + fmt(a), A, B, [a](double p) { return std::pow(p, a); });
}

PsiFunction PsiFunction::degenerate(double r, double value) {
  if (!(r >= 1.0) || !std::isfinite(r)) throw DomainError("PsiFunction::degenerate: r must be >= 1");
  if (!(value > 0.0) || !std::isfinite(value)) throw DomainError("PsiFunction::degenerate: value must be positive");
  PsiFunction psi;
  psi.kind_ = Kind::degenerate;
  psi.A_ = r;
  psi.B_ = r;
  psi.name_ = "degenerate " + fmt(r);
  psi.eval_ = std::make_shared<const std::function<double(double)>>([value](double) { return value; });
  return psi;
}

PsiFunction PsiFunction::natural(const TestFunction& f, double A, double B, const NormOptions& opts) {
  check_support(A, B, "natural_psi");
  if (f.is_zero()) throw DomainError("natural_psi: the zero function has no natural weight");
  if (f.decay_power() * A < f.dimension())
    throw DomainError("natural_psi: |f|_p is infinite for some p in the declared support");
  PsiFunction psi = analytic("natural " + f.name(), A, B, [f, opts](double p) {
    const NormResult r = NormCache::global().lp(f, p, opts);
    if (r.is_infinite()) throw DomainError("natural_psi: |f|_p is infinite at p = " + fmt(p));
    return r.value;
  });
  psi.kind_ = Kind::natural;
  return psi;
}

PsiFunction PsiFunction::tabulated(std::string name, std::vector<double> knots, std::vector<double> values) {
  if (knots.size() != values.size() || knots.empty()) throw DomainError("PsiFunction::tabulated: bad table");
  if (!std::is_sorted(knots.begin(), knots.end()) ||
      std::adjacent_find(knots.begin(), knots.end()) != knots.end())
    throw DomainError("PsiFunction::tabulated: knots must be strictly increasing");
  for (double v : values)
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("PsiFunction::tabulated: values must be positive");
  if (knots.size() == 1) {
    PsiFunction psi = degenerate(knots[0], values[0]);
    psi.name_ = std::move(name);
    return psi;
  }
  PsiFunction psi;
  psi.kind_ = Kind::tabulated;
  psi.A_ = knots.front();
  psi.B_ = knots.back();
  psi.name_ = std::move(name);
  psi.eval_ = std::make_shared<const std::function<double(double)>>(
      [k = std::move(knots), v = std::move(values)](double p) {
        const auto it = std::upper_bound(k.begin(), k.end(), p);
        const std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - k.begin(), 1), k.size() - 1);
        const double w = (p - k[i - 1]) / (k[i] - k[i - 1]);
        return std::exp((1.0 - w) * std::log(v[i - 1]) + w * std::log(v[i]));
      });
  return psi;
}

PsiFunction PsiFunction::parse(const std::string& spec, double A, double B) {
  std::istringstream is(spec);
  std::string kind;
  double x = 0.0;
  if (!(is >> kind >> x)) throw DomainError("psi spec '" + spec + "': expected '<kind> <number>'");
  if (kind == "const") return constant(x, A, B);
  if (kind == "power") return power(x, A, B);
  if (kind == "degenerate") return degenerate(x);
  throw DomainError("psi spec '" + spec + "': unknown kind '" + kind + "'");
}

bool PsiFunction::in_support(double p) const {
  if (kind_ == Kind::degenerate) return p == A_;
  if (kind_ == Kind::tabulated) return p >= A_ && p <= B_;
  return p > A_ && p < B_;
}

double PsiFunction::operator()(double p) const {
  if (!in_support(p)) return kInf;
  return (*eval_)(p);
}

PsiFunction PsiFunction::scaled(double c) const {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("PsiFunction::scaled: factor must be positive");
  PsiFunction psi = *this;
  auto inner = eval_;
  psi.eval_ = std::make_shared<const std::function<double(double)>>([inner, c](double p) { return c * (*inner)(p); });
  psi.name_ = fmt(c) + "*(" + name_ + ")";
  return psi;
}

// ---------------------------------------------------------------------------
// TauFunction

TauFunction::TauFunction(std::string name, double P1, double P2, double S1, double S2,
                         std::function<double(double, double)> raw)
    : name_(std::move(name)), P1_(P1), P2_(P2), S1_(S1), S2_(S2) {
  if (!(P1 >= 1.0) || P2 < P1 || (P1 == P2 && !(P1 > 1.0)))
    throw DomainError("TauFunction: p-range must satisfy 1 <= P1 < P2 or be a single point above 1");
  if (!(S1 > 0.0) || S2 < S1) throw DomainError("TauFunction: s-range must satisfy 0 < S1 <= S2");
  raw_ = std::make_shared<const std::function<double(double, double)>>(std::move(raw));
  // Normalise by the infimum over the default sweep points.
  const SweepGrid grid;
  double lowest = kInf;
  for (double s : grid.points(S1, S2))
    for (double p : grid.points(P1, P2)) lowest = std::min(lowest, (*raw_)(p, s));
  if (!(lowest > 0.0) || !std::isfinite(lowest)) throw DomainError("TauFunction: values must be positive and finite");
  norm_ = lowest;
}

TauFunction TauFunction::constant(double P1, double P2, double S1, double S2) {
  return {"const", P1, P2, S1, S2, [](double, double) { return 1.0; }};
}

double TauFunction::operator()(double p, double s) const {
  // Singleton ranges accept round-off from the exponent maps.
  const bool s_ok = S1_ == S2_ ? s == S1_ : (s > S1_ && s < S2_);
  const bool p_ok = P1_ == P2_ ? std::fabs(p - P1_) <= 1e-12 * P1_ : (p > P1_ && p < P2_);
  if (!p_ok || !s_ok) return kInf;
  return (*raw_)(p, s) / norm_;
}

// ---------------------------------------------------------------------------
// Sweeps

double SweepGrid::map(double A, double B, double t) {
  if (std::isinf(B)) return A + t / (1.0 - t) * std::max(A, 1.0);
  return A + (B - A) * t;
}

double SweepGrid::unmap(double A, double B, double p) {
  if (std::isinf(B)) {
    const double x = (p - A) / std::max(A, 1.0);
    return x / (1.0 + x);
  }
  return (p - A) / (B - A);
}

std::vector<double> SweepGrid::points(double A, double B) const {
  if (A == B) return {A};
  std::vector<double> t;
  for (int i = 1; i <= interior_points; ++i) t.push_back(static_cast<double>(i) / (interior_points + 1));
  for (double e : eps_schedule) {
    t.push_back(e);
    t.push_back(1.0 - e);
  }
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  std::vector<double> p;
  for (double x : t) {
    const double v = map(A, B, x);
    if (v > A && v < B && (p.empty() || v > p.back())) p.push_back(v);
  }
  return p;
}

SweepGrid SweepGrid::doubled() const {
  SweepGrid g = *this;
  g.interior_points = 2 * interior_points + 1;
  return g;
}

SweepResult sweep(const std::function<Sample(double)>& f, double A, double B, const SweepGrid& grid,
                  Extremum which) {
  if (!(B >= A)) throw DomainError("sweep: empty interval");
  const bool maximise = which == Extremum::sup;
  // Order so that "better" is larger; infinite values are handled explicitly.
  auto better = [maximise](double a, double b) { return maximise ? a > b : a < b; };

  std::map<double, Sample> samples;  // keyed by compactified coordinate
  SweepResult out;
  auto eval_t = [&](double t) -> const Sample& {
    if (auto it = samples.find(t); it != samples.end()) return it->second;
    const double p = A == B ? A : SweepGrid::map(A, B, t);
    ++out.evaluations;
    return samples.emplace(t, f(p)).first->second;
  };

  if (A == B) {
    const Sample s = eval_t(0.0);
    out.norm = {s.value, s.error, NormMethod::radial_quadrature, false};
    out.arg = A;
    return out;
  }

  for (double p : grid.points(A, B)) eval_t(SweepGrid::unmap(A, B, p));
  if (samples.empty()) throw DomainError("sweep: empty effective grid");

  auto best_t = [&] {
    double bt = samples.begin()->first;
    double bv = samples.begin()->second.value;
    for (const auto& [t, s] : samples)
      if (better(s.value, bv)) {
        bt = t;
        bv = s.value;
      }
    return bt;
  };

  // Golden-section passes in the bracket formed by the neighbours of the best point.
  for (int pass = 0; pass < grid.refine_passes; ++pass) {
    const double bt = best_t();
    if (std::isinf(samples.at(bt).value)) break;
    auto it = samples.find(bt);
    const double lo = it == samples.begin() ? 0.0 : std::prev(it)->first;
    const double hi = std::next(it) == samples.end() ? 1.0 : std::next(it)->first;
    double a = lo;
    double b = hi;
    double x1 = b - kGolden * (b - a);
    double x2 = a + kGolden * (b - a);
    for (int k = 0; k < 6; ++k) {
      const double v1 = x1 > 0.0 && x1 < 1.0 ? eval_t(x1).value : (maximise ? -kInf : kInf);
      const double v2 = x2 > 0.0 && x2 < 1.0 ? eval_t(x2).value : (maximise ? -kInf : kInf);
      if (better(v1, v2)) {
        b = x2;
        x2 = x1;
        x1 = b - kGolden * (b - a);
      } else {
        a = x1;
        x1 = x2;
        x2 = a + kGolden * (b - a);
      }
    }
  }

  const double bt = best_t();
  const Sample& best = samples.at(bt);
  out.arg = SweepGrid::map(A, B, bt);
  out.norm = {best.value, best.error, NormMethod::radial_quadrature, false};

  // Endpoint trends along the eps schedule.
  auto trend = [&](bool lower, std::vector<TrendPoint>& rows) {
    double running = maximise ? -kInf : kInf;
    double previous = running;
    for (double e : grid.eps_schedule) {
      const double t = lower ? e : 1.0 - e;
      if (!(t > 0.0 && t < 1.0)) continue;
      const double v = eval_t(t).value;
      previous = running;
      if (better(v, running)) running = v;
      rows.push_back({e, SweepGrid::map(A, B, t), v, running});
    }
    if (rows.size() < 2) return false;
    if (std::isinf(running)) return maximise && running > 0.0;
    const double moved = std::fabs(running - previous);
    return moved > 0.01 * std::fabs(previous);
  };
  out.endpoint_lower = trend(true, out.lower_trend);
  out.endpoint_upper = trend(false, out.upper_trend);
  return out;
}

SweepResult gls_norm(const ExponentMap& pmap, const PsiFunction& psi, const SweepGrid& grid) {
  bool low_confidence = false;
  NormMethod method = NormMethod::radial_quadrature;
  auto f = [&](double p) -> Sample {
    const double w = psi(p);
    if (std::isinf(w)) return {0.0, 0.0};
    const NormResult r = pmap(p);
    low_confidence = low_confidence || r.low_confidence;
    method = r.method;
    if (r.is_infinite()) return {kInf, 0.0};
    return {r.value / w, r.error_estimate / w};
  };
  const double A = psi.lower();
  const double B = psi.upper();
  SweepResult out;
  if (psi.kind() == PsiFunction::Kind::tabulated) {
    // Knots are part of the support here.
    SweepGrid g = grid;
    out = sweep(f, A, B, g, Extremum::sup);
    for (double p : {A, B}) {
      const Sample s = f(p);
      if (s.value > out.norm.value) {
        out.norm.value = s.value;
        out.norm.error_estimate = s.error;
        out.arg = p;
      }
    }
  } else {
    out = sweep(f, A, B, grid, Extremum::sup);
  }
  out.norm.method = method;
  out.norm.low_confidence = low_confidence;
  return out;
}

SweepResult sgl_norm(const TestFunction& u, const PsiFunction& psi, double s, const SweepGrid& grid,
                     const NormOptions& opts) {
  const int n = u.dimension();
  if (!(s > 0.0 && s < n)) throw DomainError("sgl_norm: s must lie in (0, n)");
  const double top = n / s;
  const bool inside = psi.is_degenerate() ? (psi.lower() > 1.0 && psi.lower() < top)
                                          : (psi.lower() >= 1.0 && psi.upper() <= top);
  if (!inside)
    throw DomainError("sgl_norm: psi support (" + fmt(psi.lower()) + ", " + fmt(psi.upper()) +
                      ") is not inside (1, " + fmt(top) + ")");
  return gls_norm([&](double p) { return NormCache::global().sobolev(u, s, p, opts); }, psi, grid);
}

PsiFunction nu_transform(const PsiFunction& psi, int n, double s) {
  if (!(s > 0.0 && s < n)) throw DomainError("nu_transform: s must lie in (0, n)");
  if (psi.is_degenerate()) {
    PsiFunction nu = PsiFunction::degenerate(sobolev_q(psi.lower(), n, s), psi(psi.lower()));
    return nu;
  }
  const double top = n / s;
  if (psi.lower() < 1.0 || psi.upper() > top) throw DomainError("nu_transform: psi must live inside (1, n/s)");
  const double qa = psi.lower() == 1.0 ? n / (n - s) : sobolev_q(psi.lower(), n, s);
  const double qb = psi.upper() >= top ? kInf : sobolev_q(psi.upper(), n, s);
  return PsiFunction::analytic("nu(" + psi.name() + ")", qa, qb,
                               [psi, n, s](double q) { return psi(inverse_p(q, n, s)); });
}

SweepResult dgl_norm(const TestFunction& u, const TauFunction& tau, const SweepGrid& p_grid, const SweepGrid& s_grid,
                     const NormOptions& opts) {
  bool low_confidence = false;
  std::map<double, SweepResult> inner;
  auto per_s = [&](double s) -> Sample {
    SweepResult r = sweep(
        [&](double p) -> Sample {
          const NormResult w = NormCache::global().sobolev(u, s, p, opts);
          low_confidence = low_confidence || w.low_confidence;
          const double t = tau(p, s);
          if (w.is_infinite()) return {kInf, 0.0};
          return {w.value / t, w.error_estimate / t};
        },
        tau.p_lower(), tau.p_upper(), p_grid, Extremum::sup);
    inner.emplace(s, r);
    return {r.norm.value, r.norm.error_estimate};
  };
  SweepResult out = sweep(per_s, tau.s_lower(), tau.s_upper(), s_grid, Extremum::sup);
  const SweepResult& at = inner.at(out.arg);
  out.endpoint_lower = out.endpoint_lower || at.endpoint_lower;
  out.endpoint_upper = out.endpoint_upper || at.endpoint_upper;
  out.norm.low_confidence = low_confidence;
  return out;
}

namespace {

// s-interval on which p = qn/(n+qs) lies inside (P1, P2), intersected with the tau range.
std::pair<double, double> admissible_s(double q, int n, double P1, double P2, double S1, double S2) {
  double lo = S1;
  double hi = S2;
  const double p_floor = std::max(1.0, P1);
  hi = std::min(hi, n * (q - p_floor) / (q * p_floor));  // p > p_floor
  if (std::isfinite(P2)) lo = std::max(lo, n * (q - P2) / (q * P2));  // p < P2
  hi = std::min(hi, static_cast<double>(n));
  return {lo, hi};
}

}  // namespace

std::vector<LambdaRow> lambda_table(const TauFunction& tau, int n, const std::vector<double>& q_points,
                                    const SweepGrid& s_grid) {
  std::vector<LambdaRow> rows;
  for (double q : q_points) {
    auto g = [&](double s) -> Sample {
      const double p = q * n / (n + q * s);
      return {sharp_constant_K(n, s) * tau(p, s), 0.0};
    };
    if (tau.s_lower() == tau.s_upper()) {
      const double s = tau.s_lower();
      const double p = q * n / (n + q * s);
      const bool ok = p > 1.0 && s < n && std::isfinite(tau(p, s));
      rows.push_back({q, ok ? g(s).value : kInf, s});
      continue;
    }
    if (tau.p_lower() == tau.p_upper()) {
      // The exponent pins s.
      const double P = tau.p_lower();
      const double s = n * (q - P) / (q * P);
      const bool ok = s > tau.s_lower() && s < tau.s_upper() && s < n;
      rows.push_back({q, ok ? sharp_constant_K(n, s) * tau(P, s) : kInf, s});
      continue;
    }
    const auto [lo, hi] = admissible_s(q, n, tau.p_lower(), tau.p_upper(), tau.s_lower(), tau.s_upper());
    if (!(hi > lo)) {
      rows.push_back({q, kInf, std::numeric_limits<double>::quiet_NaN()});
      continue;
    }
    const SweepResult r = sweep(g, lo, hi, s_grid, Extremum::inf);
    rows.push_back({q, r.norm.value, r.arg});
  }
  return rows;
}

PsiFunction lambda_transform(const TauFunction& tau, int n, const std::vector<double>& q_points,
                             const SweepGrid& s_grid) {
  std::vector<double> knots;
  std::vector<double> values;
  for (const LambdaRow& row : lambda_table(tau, n, q_points, s_grid)) {
    if (!std::isfinite(row.value)) continue;
    knots.push_back(row.q);
    values.push_back(row.value);
  }
  if (knots.empty()) throw DomainError("lambda_transform: no admissible q");
  return PsiFunction::tabulated("lambda(" + tau.name() + ")", std::move(knots), std::move(values));
}

SweepResult zeta_of_u(const TestFunction& u, double q, int n, double S1, double S2, const SweepGrid& s_grid,
                      const NormOptions& opts) {
  if (!(S1 > 0.0) || S2 < S1 || !(S2 < n)) throw DomainError("zeta_of_u: need 0 < S1 <= S2 < n");
  if (!(q > n / (n - S2))) throw DomainError("zeta_of_u: need q > n/(n - S2)");
  bool low_confidence = false;
  auto f = [&](double s) -> Sample {
    const NormResult w = NormCache::global().sobolev(u, s, inverse_p(q, n, s), opts);
    low_confidence = low_confidence || w.low_confidence;
    if (w.is_infinite()) return {kInf, 0.0};
    const double K = sharp_constant_K(n, s);
    return {K * w.value, K * w.error_estimate};
  };
  SweepResult r = sweep(f, S1, S2, s_grid, Extremum::inf);
  r.norm.low_confidence = low_confidence;
  return r;
}

PsiFunction theta_transform(const PsiFunction& psi, double alpha, int n) {
  if (!(alpha > 1.0)) throw DomainError("theta_transform: alpha must exceed 1");
  const bool inside = psi.is_degenerate() ? psi.lower() > alpha : psi.lower() >= alpha;
  if (!inside) throw DomainError("theta_transform: psi must live inside (alpha, inf)");
  if (psi.is_degenerate()) {
    const double r = psi.lower();
    return PsiFunction::degenerate(r, g_alpha_n(alpha, n, r) * psi(r));
  }
  struct Memo {
    std::mutex mutex;
    std::map<double, double> values;
  };
  auto memo = std::make_shared<Memo>();
  return PsiFunction::analytic("theta(" + psi.name() + ")", psi.lower(), psi.upper(), [psi, alpha, n, memo](double p) {
    {
      std::lock_guard lock(memo->mutex);
      if (auto it = memo->values.find(p); it != memo->values.end()) return it->second * psi(p);
    }
    const double g = g_alpha_n(alpha, n, p);
    std::lock_guard lock(memo->mutex);
    memo->values.emplace(p, g);
    return g * psi(p);
  });
}

}  // namespace fracsob
