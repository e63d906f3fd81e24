#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fracsob/constants.hpp"
#include "fracsob/verify.hpp"
#include "svg.hpp"
#include "table.hpp"

#ifndef FRACSOB_VERSION
#define FRACSOB_VERSION "unknown"
#endif

namespace fracsob::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Invalid configuration; `field` names the offending option.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error("--" + field + ": " + what) {}
};

struct RunConfig {
  std::string command;
  std::string out_dir;
  std::string tag;
  std::uint64_t seed = 20240917;
  double rel_tol = 1e-9;
  int qmc_log2 = 14;
  bool plot = false;

  // constants
  bool K = false;
  bool L = false;
  bool Z = false;
  std::string n_list = "1";
  std::string s_grid;
  std::string p_grid;
  std::string alpha_list = "1.5";
  std::string p_offsets = "0.5,1,2,4,8";
  double delta = 0.5;

  // norms / verify / probe
  std::string family = "gaussian";
  int n = 1;
  double param = kNaN;
  double dilation = 1.0;
  double centre = 0.0;
  double s = 0.5;
  std::string p = "conformal";
  double q = kNaN;
  std::string q_grid;
  std::string psi;
  std::string psi_range;
  std::string ineq = "sobolev";
  double alpha = 1.5;
  std::string lambdas = "0.5,1,2,4";
  std::string tau_p_range = "1:inf";
  std::string tau_s_range;
  std::string domain = "half-line";
  std::string probe_family = "both";

  // report
  std::string input;
  std::string kind;
  std::string output;
};

// ---------------------------------------------------------------------------
// Parsing helpers

double parse_number(const std::string& field, const std::string& text) {
  if (text == "inf") return kInf;
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(field, "'" + text + "' is not a number");
  }
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, sep)) out.push_back(cur);
  return out;
}

std::pair<double, double> parse_range(const std::string& field, const std::string& text) {
  const auto parts = split(text, ':');
  if (parts.size() != 2) throw ConfigError(field, "expected A:B, got '" + text + "'");
  const double a = parse_number(field, parts[0]);
  const double b = parse_number(field, parts[1]);
  if (!(b >= a)) throw ConfigError(field, "range end must not precede its start");
  return {a, b};
}

/// "start:stop:count" (inclusive), a comma list, or a single number. Values
/// must lie in the open interval (lo, hi); grid endpoints that sit exactly on
/// lo or hi are moved inside by 1e-4 of the grid span.
std::vector<double> parse_grid(const std::string& field, const std::string& text, double lo, double hi) {
  if (text.empty()) throw ConfigError(field, "grid is required");
  std::vector<double> v;
  const auto parts = split(text, ':');
  if (parts.size() == 3) {
    const double a = parse_number(field, parts[0]);
    const double b = parse_number(field, parts[1]);
    const double c = parse_number(field, parts[2]);
    if (!(c >= 1.0) || c != std::floor(c)) throw ConfigError(field, "count must be a positive integer");
    const int count = static_cast<int>(c);
    if (count == 1 && a != b) throw ConfigError(field, "a single-point grid needs start == stop");
    for (int i = 0; i < count; ++i) v.push_back(count == 1 ? a : a + (b - a) * i / (count - 1));
    const double margin = 1e-4 * std::fabs(b - a);
    for (double* e : {&v.front(), &v.back()}) {
      if (*e == lo) *e += margin;
      if (*e == hi) *e -= margin;
    }
  } else if (parts.size() == 1) {
    for (const auto& item : split(text, ',')) v.push_back(parse_number(field, item));
  } else {
    throw ConfigError(field, "expected start:stop:count or a comma list");
  }
  if (v.empty()) throw ConfigError(field, "empty grid");
  for (double x : v)
    if (!(x > lo && x < hi))
      throw ConfigError(field, "value " + format_double(x) + " lies outside the admissible interval (" +
                                   format_double(lo) + ", " + format_double(hi) + ")");
  return v;
}

std::vector<int> parse_ints(const std::string& field, const std::string& text, int lo, int hi) {
  std::vector<int> out;
  for (const auto& item : split(text, ',')) {
    const double v = parse_number(field, item);
    if (v != std::floor(v) || v < lo || v > hi)
      throw ConfigError(field, "'" + item + "' must be an integer in [" + std::to_string(lo) + ", " +
                                   std::to_string(hi) + "]");
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw ConfigError(field, "empty list");
  return out;
}

NormOptions norm_options(const RunConfig& c) {
  NormOptions o;
  o.rel_tol = c.rel_tol;
  o.qmc.seed = c.seed;
  o.qmc.log2_points = c.qmc_log2;
  return o;
}

TestFunction make_function(const RunConfig& c, const std::string& field = "family") {
  if (c.n < 1 || c.n > 3) throw ConfigError("n", "dimension must be 1, 2 or 3");
  if (!(c.dilation > 0.0)) throw ConfigError("dilation", "must be positive");
  TestFunction u = TestFunction::zero(c.n);
  if (c.family == "gaussian") {
    u = TestFunction::gaussian(c.n, std::isnan(c.param) ? 1.0 : c.param);
  } else if (c.family == "bump") {
    u = TestFunction::bump(c.n, std::isnan(c.param) ? 1.0 : c.param);
  } else if (c.family == "bubble") {
    u = TestFunction::bubble(c.n, std::isnan(c.param) ? c.n - c.s : c.param);
  } else if (c.family == "xexp") {
    if (c.n != 1) throw ConfigError("n", "the xexp profile is one-dimensional");
    u = xexp_profile();
  } else if (c.family == "zero") {
    return u;
  } else {
    throw ConfigError(field, "unknown family '" + c.family + "' (gaussian, bump, bubble, xexp, zero)");
  }
  if (c.dilation != 1.0) u = u.dilated(c.dilation);
  if (c.centre != 0.0) u = u.shifted(c.centre);
  return u;
}

double resolve_p(const RunConfig& c) {
  if (c.p == "conformal") return conformal_p(c.n, c.s);
  return parse_number("p", c.p);
}

PsiFunction make_psi(const RunConfig& c, double default_lo, double default_hi) {
  if (c.psi.empty()) throw ConfigError("psi", "a psi specification is required");
  double lo = default_lo;
  double hi = default_hi;
  if (!c.psi_range.empty()) std::tie(lo, hi) = parse_range("psi-range", c.psi_range);
  try {
    if (c.psi.rfind("natural", 0) == 0) {
      RunConfig f = c;
      f.family = c.psi.size() > 8 ? c.psi.substr(8) : c.family;
      f.dilation = 1.0;
      f.centre = 0.0;
      return PsiFunction::natural(make_function(f, "psi"), lo, hi, norm_options(c));
    }
    return PsiFunction::parse(c.psi, lo, hi);
  } catch (const DomainError& e) {
    throw ConfigError("psi", e.what());
  }
}

ConvexDomain make_domain(const RunConfig& c) {
  if (c.domain == "half-line") return ConvexDomain::half_line();
  if (c.domain == "half-space") return ConvexDomain::half_space(c.n);
  if (c.domain == "ball") return ConvexDomain::unit_ball(c.n);
  throw ConfigError("domain", "unknown domain '" + c.domain + "' (half-line, half-space, ball)");
}

// ---------------------------------------------------------------------------
// Output

struct Outputs {
  fs::path dir;
  std::string tag;
  std::vector<std::string> files;

  fs::path path(const std::string& suffix) const { return dir / (tag + suffix); }

  void write_table(const std::string& suffix, const Table& t) {
    std::ofstream os(path(suffix), std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path(suffix).string());
    t.write(os);
    files.push_back(path(suffix).filename().string());
  }
  void write_svg(const std::string& suffix, const Plot& plot) {
    const std::string doc = render_svg(plot);
    std::ofstream os(path(suffix), std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path(suffix).string());
    os << doc;
    files.push_back(path(suffix).filename().string());
  }
};

const std::vector<std::string> kSlackColumns = {
    "inequality", "n",     "s",     "p",        "q",     "alpha",          "family",     "dilation", "lhs",
    "rhs",        "constant", "slack", "relative_slack", "confidence", "violated", "low_confidence", "asserted"};

void add_record(Table& t, const SlackRecord& r, bool asserted) {
  t.add({r.inequality, static_cast<long long>(r.n), r.s, r.p, r.q, r.alpha, r.family, r.dilation, r.lhs, r.rhs,
         r.constant, r.slack, r.relative_slack, r.confidence, r.violated(), r.low_confidence, asserted});
}

Plot slack_plot(const CsvData& d, const std::string& title) {
  Plot plot;
  plot.title = title;
  plot.xlabel = "p";
  plot.ylabel = "slack (rhs - lhs)";
  plot.hlines.push_back({0.0, "slack = 0"});
  std::map<std::string, Series> by;
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    const std::string key = d.rows[i][d.column("inequality")] + " " + d.rows[i][d.column("family")];
    Series& s = by[key];
    s.label = key;
    s.x.push_back(d.number(i, "p"));
    s.y.push_back(d.number(i, "slack"));
    const double n = d.number(i, "n");
    const double sv = d.number(i, "s");
    if (std::isfinite(sv) && std::fabs(d.number(i, "p") - 2.0 * n / (n + sv)) < 1e-12)
      plot.highlights.emplace_back(d.number(i, "p"), d.number(i, "slack"));
  }
  for (auto& [k, s] : by) {
    // Sort by p so the polyline reads left to right.
    std::vector<std::size_t> idx(s.x.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return s.x[a] < s.x[b]; });
    Series sorted = s;
    for (std::size_t j = 0; j < idx.size(); ++j) {
      sorted.x[j] = s.x[idx[j]];
      sorted.y[j] = s.y[idx[j]];
    }
    plot.series.push_back(sorted);
  }
  return plot;
}

Plot k_plot(const CsvData& d) {
  Plot plot;
  plot.title = "K(n, s)";
  plot.xlabel = "s";
  plot.ylabel = "K";
  plot.log_y = true;
  std::map<long long, std::pair<Series, Series>> by;
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    const auto n = static_cast<long long>(d.number(i, "n"));
    auto& [k, a] = by[n];
    k.label = "K, n=" + std::to_string(n);
    a.label = "asymptote, n=" + std::to_string(n);
    a.dashed = true;
    a.markers = false;
    k.x.push_back(d.number(i, "s"));
    k.y.push_back(d.number(i, "K"));
    a.x.push_back(d.number(i, "s"));
    a.y.push_back(d.number(i, "K_asymptote"));
  }
  for (auto& [n, pair] : by) {
    plot.series.push_back(pair.first);
    plot.series.push_back(pair.second);
  }
  plot.hlines.push_back({1.0, "K = 1"});
  return plot;
}

Plot l_plot(const CsvData& d) {
  Plot plot;
  plot.title = "L_alpha(p) and the case-C upper bound";
  plot.xlabel = "p";
  plot.ylabel = "L_alpha";
  plot.log_y = true;
  std::map<std::string, std::pair<Series, Series>> by;
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    const std::string a = d.rows[i][d.column("alpha")];
    auto& [l, u] = by[a];
    l.label = "L, alpha=" + a;
    u.label = "upper, alpha=" + a;
    u.dashed = true;
    u.markers = false;
    l.x.push_back(d.number(i, "p"));
    l.y.push_back(d.number(i, "L"));
    u.x.push_back(d.number(i, "p"));
    u.y.push_back(d.number(i, "case_C_upper"));
  }
  for (auto& [a, pair] : by) {
    plot.series.push_back(pair.first);
    plot.series.push_back(pair.second);
  }
  return plot;
}

Plot trend_plot(const CsvData& d) {
  Plot plot;
  plot.title = "sweep values along the endpoint schedule";
  plot.xlabel = "epsilon";
  plot.ylabel = "ratio";
  plot.log_x = true;
  std::map<std::string, Series> by;
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    const std::string side = d.rows[i][d.column("side")];
    Series& s = by[side];
    s.label = side + " endpoint";
    s.x.push_back(d.number(i, "eps"));
    s.y.push_back(d.number(i, "value"));
  }
  for (auto& [k, s] : by) plot.series.push_back(s);
  if (d.has("norm") && !d.rows.empty()) plot.hlines.push_back({d.number(0, "norm"), "sweep result"});
  return plot;
}

Plot plot_for(const std::string& kind, const CsvData& d) {
  if (d.rows.empty()) throw ConfigError("input", "no records to plot");
  if (kind == "slack-vs-p") return slack_plot(d, "slack against p");
  if (kind == "K-vs-s") return k_plot(d);
  if (kind == "L-vs-p") return l_plot(d);
  if (kind == "ratio-vs-epsilon") return trend_plot(d);
  throw ConfigError("kind", "unknown plot kind '" + kind + "' (slack-vs-p, K-vs-s, L-vs-p, ratio-vs-epsilon)");
}

CsvData as_csv(const Table& t) {
  std::stringstream ss;
  t.write(ss);
  return read_csv(ss);
}

// ---------------------------------------------------------------------------
// Subcommands. Each returns the number of violated asserted records.

int cmd_constants(const RunConfig& c, Outputs& out) {
  if (c.K + c.L + c.Z != 1) throw ConfigError("K", "choose exactly one of --K, --L, --Z");
  Table t;
  if (c.K) {
    t.header = {"n", "s", "K", "K_asymptote", "ratio"};
    for (int n : parse_ints("n", c.n_list, 1, 64))
      for (double s : parse_grid("s-grid", c.s_grid, 0.0, n)) {
        const double k = sharp_constant_K(n, s);
        const double a = K_asymptote(n, s);
        t.add({static_cast<long long>(n), s, k, a, k / a});
      }
    out.write_table(".csv", t);
    if (c.plot) out.write_svg(".svg", k_plot(as_csv(t)));
    return 0;
  }
  if (c.L) {
    t.header = {"alpha", "p", "L", "L_error", "case_A", "ratio_A", "case_B", "ratio_B", "case_C_upper",
                "case_C_lower_shape", "upper_dominates"};
    int bad = 0;
    for (double alpha : parse_grid("alpha", c.alpha_list, 1.0, kInf)) {
      std::vector<double> ps;
      if (!c.p_grid.empty()) ps = parse_grid("p-grid", c.p_grid, alpha, kInf);
      else
        for (double d : parse_grid("p-offsets", c.p_offsets, 0.0, kInf)) ps.push_back(alpha + d);
      for (double p : ps) {
        const QuadResult l = L_alpha(alpha, p);
        const double a = case_A_asymptote(alpha, p);
        const double b = case_B_asymptote(alpha, p);
        const CaseCBounds cb = case_C_bounds(alpha, p, c.delta);
        const bool dominates = cb.upper >= l.value - 3.0 * l.error_estimate;
        bad += !dominates;
        t.add({alpha, p, l.value, l.error_estimate, a, l.value / a, b, l.value / b, cb.upper, cb.lower_shape,
               dominates});
      }
    }
    out.write_table(".csv", t);
    if (c.plot) out.write_svg(".svg", l_plot(as_csv(t)));
    return bad;
  }
  t.header = {"n", "s", "p", "sp", "lower", "upper", "ratio", "attainment", "attainment_error", "attained"};
  int bad = 0;
  for (int n : parse_ints("n", c.n_list, 1, 64))
    for (double s : parse_grid("s-grid", c.s_grid, 0.0, 1.0))
      for (double p : parse_grid("p-grid", c.p_grid, 1.0 - 1e-15, kInf)) {
        const auto [lo, hi] = Z_bounds(n, s, p);
        const QuadResult a = Z_attainment(n, s, p);
        const bool attained = std::fabs(a.value - hi) <= 1e-6 * hi;
        bad += !attained;
        t.add({static_cast<long long>(n), s, p, s * p, lo, hi, hi / lo, a.value, a.error_estimate, attained});
      }
  out.write_table(".csv", t);
  return bad;
}

int cmd_norms(const RunConfig& c, Outputs& out) {
  const TestFunction u = make_function(c);
  const NormOptions o = norm_options(c);
  if (!c.psi.empty()) {
    const PsiFunction psi = make_psi(c, 1.0, c.n / c.s);
    const SweepResult r = sgl_norm(u, psi, c.s, {}, o);
    Table t;
    t.header = {"family", "n", "s", "psi", "norm", "error", "arg_p", "endpoint_lower", "endpoint_upper",
                "evaluations"};
    t.add({c.family, static_cast<long long>(c.n), c.s, psi.name(), r.value(), r.norm.error_estimate, r.arg,
           r.endpoint_lower, r.endpoint_upper, static_cast<long long>(r.evaluations)});
    out.write_table(".csv", t);
    Table tr;
    tr.header = {"side", "eps", "at", "value", "running", "norm"};
    for (const auto& p : r.lower_trend) tr.add({std::string("lower"), p.eps, p.at, p.value, p.running, r.value()});
    for (const auto& p : r.upper_trend) tr.add({std::string("upper"), p.eps, p.at, p.value, p.running, r.value()});
    out.write_table("_trend.csv", tr);
    if (c.plot) out.write_svg("_trend.svg", trend_plot(as_csv(tr)));
    return 0;
  }
  Table t;
  t.header = {"family", "n", "parameter", "dilation", "s", "p", "lp", "lp_error", "W", "W_error", "method",
              "low_confidence"};
  const std::string grid = c.p_grid.empty() ? c.p : c.p_grid;
  std::vector<double> ps = grid == "conformal" ? std::vector<double>{conformal_p(c.n, c.s)}
                                               : parse_grid("p-grid", grid, 1.0 - 1e-15, kInf);
  for (double p : ps) {
    const NormResult l = lp_norm(u, p, o);
    const NormResult w = frac_sobolev_norm(u, c.s, p, o);
    t.add({c.family, static_cast<long long>(c.n), u.parameter(), c.dilation, c.s, p, l.value, l.error_estimate,
           w.value, w.error_estimate, to_string(w.method), l.low_confidence || w.low_confidence});
  }
  out.write_table(".csv", t);
  return 0;
}

int cmd_verify(const RunConfig& c, Outputs& out) {
  const NormOptions o = norm_options(c);
  const TestFunction u = make_function(c);
  Table t;
  t.header = kSlackColumns;
  std::vector<std::pair<SlackRecord, bool>> rows;
  auto take = [&](const SlackRecord& r, bool asserted) { rows.emplace_back(r, asserted); };
  const bool interval_ok = c.s > 0.0 && c.s < c.n;
  if (!interval_ok && c.ineq != "weighted" && c.ineq != "theorem41") throw ConfigError("s", "need 0 < s < n");

  if (c.ineq == "sobolev") {
    std::vector<double> ps = c.p_grid.empty() ? std::vector<double>{resolve_p(c)}
                                              : parse_grid("p-grid", c.p_grid, 1.0, c.n / c.s);
    for (double p : ps) {
      if (!(p > 1.0 && c.s * p < c.n)) throw ConfigError("p", "need 1 < p < n/s");
      // Validity is asserted only at the conformal exponent.
      take(check_sobolev(u, c.s, p, o), std::fabs(p - conformal_p(c.n, c.s)) < 1e-12);
    }
  } else if (c.ineq == "dilation") {
    const double p = resolve_p(c);
    if (!(p > 1.0 && c.s * p < c.n)) throw ConfigError("p", "need 1 < p < n/s");
    std::optional<double> q;
    if (!std::isnan(c.q)) q = c.q;
    for (const SlackRecord& r : dilation_covariance(u, c.s, p, parse_grid("lambdas", c.lambdas, 0.0, kInf), q, o))
      take(r, !q && std::fabs(p - conformal_p(c.n, c.s)) < 1e-12);
  } else if (c.ineq == "theorem21") {
    const PsiFunction psi = make_psi(c, 1.0, c.n / c.s);
    const double qlo = psi.is_degenerate() ? 0.0 : c.n / (c.n - c.s);
    std::vector<double> qs;
    if (!psi.is_degenerate()) qs = parse_grid("q-grid", c.q_grid, qlo, kInf);
    const ChainReport rep = check_theorem21(u, psi, c.s, qs, {}, o);
    take(rep.global, true);
    for (const auto& r : rep.pointwise) take(r, true);
  } else if (c.ineq == "theorem31" || c.ineq == "corollary31") {
    if (c.tau_s_range.empty()) throw ConfigError("tau-s-range", "required");
    const auto [P1, P2] = parse_range("tau-p-range", c.tau_p_range);
    const auto [S1, S2] = parse_range("tau-s-range", c.tau_s_range);
    std::optional<TauFunction> tau;
    try {
      tau.emplace(TauFunction::constant(P1, P2, S1, S2));
    } catch (const DomainError& e) {
      throw ConfigError("tau-s-range", e.what());
    }
    if (c.ineq == "theorem31") {
      if (std::isnan(c.q)) throw ConfigError("q", "required");
      take(check_theorem31(u, *tau, c.q, {}, {}, o), true);
    } else {
      take(check_corollary31(u, *tau, parse_grid("q-grid", c.q_grid, 1.0, kInf), {}, {}, o), true);
    }
  } else if (c.ineq == "weighted") {
    const ConvexDomain dom = make_domain(c);
    std::vector<double> ps = c.p_grid.empty() ? std::vector<double>{parse_number("p", c.p)}
                                              : parse_grid("p-grid", c.p_grid, c.alpha, kInf);
    if (!(c.alpha > 1.0)) throw ConfigError("alpha", "must exceed 1");
    for (double p : ps) {
      if (!(p > c.alpha)) throw ConfigError("p", "must exceed alpha");
      take(check_weighted(u, dom, c.alpha, p, o), true);
    }
  } else if (c.ineq == "theorem41") {
    if (!(c.alpha > 1.0)) throw ConfigError("alpha", "must exceed 1");
    const PsiFunction psi = make_psi(c, c.alpha, kInf);
    if (psi.lower() < c.alpha) throw ConfigError("psi-range", "must lie inside (alpha, inf)");
    const ChainReport rep = check_theorem41(u, psi, make_domain(c), c.alpha, {}, o);
    take(rep.global, true);
    for (const auto& r : rep.pointwise) take(r, true);
  } else {
    throw ConfigError("ineq", "unknown inequality '" + c.ineq +
                                  "' (sobolev, dilation, theorem21, theorem31, corollary31, weighted, theorem41)");
  }

  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return record_less(a.first, b.first); });
  int bad = 0;
  for (const auto& [r, asserted] : rows) {
    add_record(t, r, asserted);
    bad += asserted && r.violated();
  }
  out.write_table(".csv", t);
  if (c.plot) out.write_svg(".svg", slack_plot(as_csv(t), "slack of " + c.ineq));
  return bad;
}

int cmd_probe(const RunConfig& c, Outputs& out) {
  if (!(c.s > 0.0 && c.s < c.n)) throw ConfigError("s", "need 0 < s < n");
  const double p = resolve_p(c);
  if (!(p > 1.0 && c.s * p < c.n)) throw ConfigError("p", "need 1 < p < n/s");
  std::vector<ProbeFamily> families;
  if (c.probe_family == "bubble" || c.probe_family == "both") families.push_back(ProbeFamily::conformal_bubble);
  if (c.probe_family == "gaussian" || c.probe_family == "both") families.push_back(ProbeFamily::gaussian_scale);
  if (families.empty()) throw ConfigError("probe-family", "expected bubble, gaussian or both");
  const NormOptions o = norm_options(c);
  Table t;
  t.header = {"family", "n", "s", "p", "q", "K", "max_ratio", "ratio_over_K", "arg_beta", "arg_dilation",
              "confidence", "excluded", "within_constant", "asserted"};
  Table pts;
  pts.header = {"family", "beta", "dilation", "ratio", "error", "excluded"};
  int bad = 0;
  const bool conformal = std::fabs(p - conformal_p(c.n, c.s)) < 1e-12;
  for (ProbeFamily f : families) {
    const ProbeReport r = sharpness_probe(c.n, c.s, f, p, o);
    t.add({to_string(f), static_cast<long long>(c.n), c.s, p, r.q, r.K, r.max_ratio, r.ratio_over_K, r.arg_beta,
           r.arg_dilation, r.confidence, static_cast<long long>(r.excluded), r.within_constant(), conformal});
    bad += conformal && !r.within_constant();
    for (const ProbePoint& q : r.points) pts.add({to_string(f), q.beta, q.dilation, q.ratio, q.error, q.excluded});
  }
  out.write_table(".csv", t);
  out.write_table("_points.csv", pts);
  return bad;
}

int cmd_report(const RunConfig& c, Outputs& out) {
  if (c.input.empty()) throw ConfigError("input", "required");
  std::ifstream is(c.input, std::ios::binary);
  if (!is) throw ConfigError("input", "cannot read '" + c.input + "'");
  CsvData d;
  try {
    d = read_csv(is);
  } catch (const std::runtime_error& e) {
    throw ConfigError("input", e.what());
  }
  Plot plot;
  try {
    plot = plot_for(c.kind, d);
  } catch (const std::runtime_error& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw ConfigError("input", e.what());
  }
  std::string doc;
  try {
    doc = render_svg(plot);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("input", e.what());
  }
  const fs::path target = c.output.empty() ? out.path(".svg") : fs::path(c.output);
  std::ofstream os(target, std::ios::binary);
  if (!os) throw ConfigError("output", "cannot write '" + target.string() + "'");
  os << doc;
  out.files.push_back(target.filename().string());
  return 0;
}

json config_echo(const RunConfig& c) {
  json j;
  j["subcommand"] = c.command;
  j["seed"] = c.seed;
  j["rel_tol"] = c.rel_tol;
  j["qmc_log2_points"] = c.qmc_log2;
  auto num = [](double v) { return std::isnan(v) ? json(nullptr) : json(v); };
  if (c.command == "constants") {
    j["mode"] = c.K ? "K" : c.L ? "L" : "Z";
    j["n"] = c.n_list;
    j["s_grid"] = c.s_grid;
    j["p_grid"] = c.p_grid;
    j["alpha"] = c.alpha_list;
    j["p_offsets"] = c.p_offsets;
    j["delta"] = c.delta;
  } else if (c.command == "report") {
    j["input"] = c.input;
    j["kind"] = c.kind;
  } else {
    j["family"] = c.family;
    j["n"] = c.n;
    j["parameter"] = num(c.param);
    j["dilation"] = c.dilation;
    j["centre"] = c.centre;
    j["s"] = c.s;
    j["p"] = c.p;
    j["p_grid"] = c.p_grid;
    j["q"] = num(c.q);
    j["q_grid"] = c.q_grid;
    j["psi"] = c.psi;
    j["psi_range"] = c.psi_range;
    j["ineq"] = c.ineq;
    j["alpha"] = c.alpha;
    j["lambdas"] = c.lambdas;
    j["tau_p_range"] = c.tau_p_range;
    j["tau_s_range"] = c.tau_s_range;
    j["domain"] = c.domain;
    j["probe_family"] = c.probe_family;
  }
  return j;
}

const char* const kColumnsHelp = R"(CSV columns
  constants --K : n,s,K,K_asymptote,ratio
  constants --L : alpha,p,L,L_error,case_A,ratio_A,case_B,ratio_B,case_C_upper,case_C_lower_shape,upper_dominates
  constants --Z : n,s,p,sp,lower,upper,ratio,attainment,attainment_error,attained
  norms         : family,n,parameter,dilation,s,p,lp,lp_error,W,W_error,method,low_confidence
  norms --psi   : family,n,s,psi,norm,error,arg_p,endpoint_lower,endpoint_upper,evaluations
                  plus <tag>_trend.csv: side,eps,at,value,running,norm
  verify        : inequality,n,s,p,q,alpha,family,dilation,lhs,rhs,constant,slack,relative_slack,
                  confidence,violated,low_confidence,asserted
  probe         : family,n,s,p,q,K,max_ratio,ratio_over_K,arg_beta,arg_dilation,confidence,excluded,
                  within_constant,asserted; plus <tag>_points.csv: family,beta,dilation,ratio,error,excluded
Exit codes: 0 no asserted violation, 1 violations found, 2 configuration error, 3 numerical failure.)";

}  // namespace

int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  RunConfig c;
  if (const char* env = std::getenv("FRACSOB_OUT_DIR")) c.out_dir = env;
  if (c.out_dir.empty()) c.out_dir = ".";

  CLI::App app{"Fractional Sobolev and Grand Lebesgue inequality checks", "fracsob"};
  app.footer(kColumnsHelp);
  app.require_subcommand(1);
  app.set_config("--config", "", "Read options from an INI or TOML file");
  auto common = [&](CLI::App* sub) {
    sub->add_option("--out", c.out_dir, "Output directory (default $FRACSOB_OUT_DIR or .)");
    sub->add_option("--tag", c.tag, "Base name of the output files (default: the subcommand)");
    sub->add_option("--seed", c.seed, "Seed of the randomized QMC shifts");
    sub->add_option("--rel-tol", c.rel_tol, "Relative tolerance of the norm quadratures")->check(CLI::PositiveNumber);
    sub->add_option("--qmc-log2", c.qmc_log2, "log2 of the QMC points per shift")->check(CLI::Range(6, 24));
    sub->add_flag("--plot", c.plot, "Also write an SVG plot");
  };
  auto function_opts = [&](CLI::App* sub) {
    sub->add_option("--family", c.family, "gaussian | bump | bubble | xexp | zero");
    sub->add_option("--n", c.n, "Dimension");
    sub->add_option("--param", c.param, "sigma, R or beta (default 1, 1, n - s)");
    sub->add_option("--dilation", c.dilation, "Dilation lambda, u(lambda x)");
    sub->add_option("--centre", c.centre, "Centre on the first axis");
    sub->add_option("--s", c.s, "Smoothness order s");
    sub->add_option("--p", c.p, "Exponent p, or 'conformal' for 2n/(n+s)");
  };

  auto* constants = app.add_subcommand("constants", "Tables of K(n,s), L_alpha(p) or the Z bounds");
  common(constants);
  constants->add_flag("--K", c.K, "Sharp constant table");
  constants->add_flag("--L", c.L, "L_alpha table with its asymptotes and bounds");
  constants->add_flag("--Z", c.Z, "Z bounds and the attainment quadrature");
  constants->add_option("--n", c.n_list, "Dimension list, e.g. 1,2,3");
  constants->add_option("--s-grid", c.s_grid, "start:stop:count or a comma list");
  constants->add_option("--p-grid", c.p_grid, "start:stop:count or a comma list");
  constants->add_option("--alpha", c.alpha_list, "alpha list (for --L)");
  constants->add_option("--p-offsets", c.p_offsets, "p - alpha list (for --L without --p-grid)");
  constants->add_option("--delta", c.delta, "Split point of the case-C bound");

  auto* norms = app.add_subcommand("norms", "L_p and W_p^s norms, or an SGL norm with --psi");
  common(norms);
  function_opts(norms);
  norms->add_option("--p-grid", c.p_grid, "start:stop:count or a comma list");
  norms->add_option("--psi", c.psi, "'const c' | 'power a' | 'degenerate r' | 'natural <family>'");
  norms->add_option("--psi-range", c.psi_range, "Support A:B of psi (default 1:n/s)");

  auto* verify = app.add_subcommand("verify", "Check an inequality and write slack records");
  common(verify);
  function_opts(verify);
  verify->add_option("--ineq", c.ineq,
                     "sobolev | dilation | theorem21 | theorem31 | corollary31 | weighted | theorem41");
  verify->add_option("--p-grid", c.p_grid, "Exponent grid (sobolev, weighted)");
  verify->add_option("--q", c.q, "Target exponent (theorem31; mismatched q for dilation)");
  verify->add_option("--q-grid", c.q_grid, "q grid (theorem21 chain, corollary31)");
  verify->add_option("--psi", c.psi, "psi specification (theorem21, theorem41)");
  verify->add_option("--psi-range", c.psi_range, "Support A:B of psi");
  verify->add_option("--alpha", c.alpha, "Boundary weight exponent (weighted, theorem41)");
  verify->add_option("--lambdas", c.lambdas, "Dilations (dilation)");
  verify->add_option("--tau-p-range", c.tau_p_range, "p-range of tau = 1 (theorem31, corollary31)");
  verify->add_option("--tau-s-range", c.tau_s_range, "s-range of tau = 1 (theorem31, corollary31)");
  verify->add_option("--domain", c.domain, "half-line | half-space | ball");

  auto* probe = app.add_subcommand("probe", "Sharpness probe: sup of |u|_q / ||u||W_p^s over a family");
  common(probe);
  probe->add_option("--n", c.n, "Dimension");
  probe->add_option("--s", c.s, "Smoothness order s");
  probe->add_option("--p", c.p, "Exponent p, or 'conformal'");
  probe->add_option("--probe-family", c.probe_family, "bubble | gaussian | both");

  auto* report = app.add_subcommand("report", "Render a CSV written by another subcommand as SVG");
  common(report);
  report->add_option("--input", c.input, "CSV file")->required();
  report->add_option("--kind", c.kind, "slack-vs-p | K-vs-s | L-vs-p | ratio-vs-epsilon")->required();
  report->add_option("--output", c.output, "SVG path (default <out>/<tag>.svg)");

  std::vector<std::string> args(argv.begin() + (argv.empty() ? 0 : 1), argv.end());
  std::reverse(args.begin(), args.end());  // CLI11 consumes a reversed vector
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "fracsob: " << e.what() << '\n';
    return kConfigError;
  }
  for (auto* sub : {constants, norms, verify, probe, report})
    if (sub->parsed()) c.command = sub->get_name();
  if (c.tag.empty()) c.tag = c.command;

  Outputs files;
  files.dir = c.out_dir;
  files.tag = c.tag;
  int violations = 0;
  try {
    std::error_code ec;
    fs::create_directories(files.dir, ec);
    if (ec) throw ConfigError("out", "cannot create '" + c.out_dir + "': " + ec.message());
    if (c.command == "constants") violations = cmd_constants(c, files);
    else if (c.command == "norms") violations = cmd_norms(c, files);
    else if (c.command == "verify") violations = cmd_verify(c, files);
    else if (c.command == "probe") violations = cmd_probe(c, files);
    else violations = cmd_report(c, files);
  } catch (const ConfigError& e) {
    err << "fracsob: " << e.what() << '\n';
    return kConfigError;
  } catch (const UnsupportedDimension& e) {
    err << "fracsob: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "fracsob: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    err << "fracsob: numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  }

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  json manifest;
  manifest["tool"] = "fracsob";
  manifest["version"] = FRACSOB_VERSION;
  manifest["compiler"] = __VERSION__;
  manifest["argv"] = argv;
  manifest["config"] = config_echo(c);
  manifest["seed"] = c.seed;
  manifest["outputs"] = files.files;
  manifest["violations"] = violations;
  manifest["wall_time_seconds"] = wall;
  {
    std::ofstream os(files.path(".manifest.json"), std::ios::binary);
    os << manifest.dump(2) << '\n';
  }
  out << c.command << ": wrote";
  for (const auto& f : files.files) out << ' ' << f;
  out << "; " << violations << " violation" << (violations == 1 ? "" : "s") << '\n';
  return violations ? kViolations : kOk;
}

}  // namespace fracsob::cli
