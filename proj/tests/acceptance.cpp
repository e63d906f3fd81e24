// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "fracsob/constants.hpp"
#include "fracsob/glspaces.hpp"
#include "fracsob/norms.hpp"
#include "fracsob/verify.hpp"

using namespace fracsob;

namespace {

double rel(double a, double b) { return std::fabs(a - b) / std::fabs(b); }

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      if (pass) detail = what;
      pass = false;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool holds(const SlackRecord& r) { return r.slack >= -3.0 * r.confidence; }

Outcome constant_endpoints() {
  Outcome o;
  for (int n = 1; n <= 5; ++n) {
    const double k = sharp_constant_K(n, 1e-8);
    o.require(std::fabs(k - 1.0) <= 1e-6, fmt("K(%g, 1e-8) = %.12g", n, k));
  }
  for (int n = 1; n <= 3; ++n) {
    const double s = n - 1e-3;
    const double scaled = (n - s) * sharp_constant_K(n, s);
    o.require(rel(scaled, sphere_area(n)) < 0.01, fmt("n=%g: (n-s)K = %.9g, omega_n = %.9g", n, scaled, sphere_area(n)));
  }
  if (o.pass) o.detail = "K(n,0+) = 1 and (n-s)K -> omega_n";
  return o;
}

Outcome exponent_algebra() {
  Outcome o;
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> dim(1, 6);
  std::uniform_real_distribution<double> u01(0.001, 0.999);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const int n = dim(rng);
    const double s = n * u01(rng);
    const double p = 1.0 + (n / s - 1.0) * u01(rng);
    worst = std::max(worst, rel(inverse_p(sobolev_q(p, n, s), n, s), p));
  }
  o.require(worst <= 1e-12, fmt("worst round-trip error %.3g", worst));
  if (o.pass) o.detail = fmt("1000 triples, worst relative error %.3g", worst);
  return o;
}

Outcome sobolev_conformal() {
  Outcome o;
  double worst = 0.0;
  auto run = [&](int n, double s) {
    for (const TestFunction& u : {TestFunction::gaussian(n), TestFunction::bump(n)}) {
      const SlackRecord r = check_sobolev(u, s, conformal_p(n, s));
      o.require(holds(r), fmt("n=%g s=%g slack %.6g", n, s, r.slack) + " " + u.key());
      o.require(r.confidence <= 1e-3 * r.rhs, fmt("n=%g s=%g confidence %.3g", n, s, r.confidence) + " " + u.key());
      worst = std::max(worst, r.confidence / r.rhs);
    }
  };
  for (double s : {0.3, 0.5, 0.7}) run(1, s);
  for (double s : {0.5, 1.0}) run(3, s);
  if (o.pass) o.detail = fmt("10 cases, worst confidence/rhs %.3g", worst);
  return o;
}

Outcome sharpness() {
  Outcome o;
  const ProbeReport b = sharpness_probe(1, 0.5, ProbeFamily::conformal_bubble, conformal_p(1, 0.5));
  const double conf = b.confidence / b.K;
  const std::string d = fmt("ratio/K = %.9g (arg beta %.4g, confidence/K %.3g)", b.ratio_over_K, b.arg_beta, conf);
  o.require(b.ratio_over_K >= 0.9, d);
  o.require(b.ratio_over_K <= 1.0 + 3.0 * conf, d);
  if (o.pass) o.detail = d;
  return o;
}

Outcome dilation() {
  Outcome o;
  const auto recs = dilation_covariance(TestFunction::gaussian(1), 0.5, conformal_p(1, 0.5), {0.5, 2.0, 4.0});
  double lo = recs.front().relative_slack, hi = lo;
  for (const SlackRecord& r : recs) {
    lo = std::min(lo, r.relative_slack);
    hi = std::max(hi, r.relative_slack);
  }
  o.require(hi - lo < 1e-3, fmt("drift %.3g", hi - lo));
  if (o.pass) o.detail = fmt("relative slack %.9g, drift %.3g", lo, hi - lo);
  return o;
}

Outcome degenerate_collapse() {
  Outcome o;
  std::mt19937 rng(20240917);
  std::uniform_real_distribution<double> u01(0.1, 0.9);
  double worst = 0.0;
  auto track = [&](double a, double b, int i, const char* what) {
    const double e = rel(a, b);
    worst = std::max(worst, e);
    o.require(e <= 1e-9, fmt("config %g: ", i) + what + fmt(" differs by %.3g", e));
  };
  for (int i = 0; i < 20; ++i) {
    const double s = 0.2 + 0.6 * u01(rng);
    const double r = 1.0 + (1.0 / s - 1.0) * u01(rng);
    const TestFunction u = i % 2 == 0 ? TestFunction::bump(1) : TestFunction::gaussian(1, 0.5 + u01(rng));
    const PsiFunction psi = PsiFunction::degenerate(r);

    const TestFunction g = TestFunction::gaussian(1, 0.5 + u01(rng));
    track(gls_norm([&](double p) { return lp_norm(g, p); }, psi).value(), lp_norm(g, r).value, i, "gls");
    track(sgl_norm(u, psi, s).value(), frac_sobolev_norm(u, s, r).value, i, "sgl");

    const ChainReport c = check_theorem21(u, psi, s, {});
    const SlackRecord d = check_sobolev(u, s, r);
    track(c.global.lhs, d.lhs, i, "theorem21 lhs");
    track(c.global.rhs, d.rhs, i, "theorem21 rhs");

    const double alpha = 1.1 + 0.8 * u01(rng);
    const double rw = alpha + 0.2 + 2.0 * u01(rng);
    const TestFunction f = i % 2 == 0 ? xexp_profile() : TestFunction::bump(1, 0.5).shifted(1.0 + u01(rng));
    const auto line = ConvexDomain::half_line();
    const ChainReport c4 = check_theorem41(f, PsiFunction::degenerate(rw), line, alpha);
    const SlackRecord w = check_weighted(f, line, alpha, rw);
    track(c4.global.lhs, w.lhs / w.constant, i, "theorem41 lhs");
    track(c4.global.rhs, w.rhs / w.constant, i, "theorem41 rhs");
    track(1.0 + c4.global.relative_slack, 1.0 + w.relative_slack, i, "theorem41 relative slack");
  }
  if (o.pass) o.detail = fmt("20 configurations, worst relative difference %.3g", worst);
  return o;
}

Outcome theorem21_chain() {
  Outcome o;
  std::vector<double> qs;
  for (int i = 0; i < 20; ++i) qs.push_back(2.1 + (12.0 - 2.1) * (i + 0.5) / 20.0);
  const ChainReport c = check_theorem21(TestFunction::bump(1), PsiFunction::constant(1.0, 1.0, 2.0), 0.5, qs);
  o.require(holds(c.global), fmt("global slack %.6g, confidence %.3g", c.global.slack, c.global.confidence));
  o.require(c.pointwise.size() == qs.size(), "pointwise chain incomplete");
  double min_rel = INFINITY;
  for (const SlackRecord& r : c.pointwise) {
    o.require(holds(r), fmt("q=%g slack %.6g", r.q, r.slack));
    min_rel = std::min(min_rel, r.relative_slack);
  }
  if (o.pass)
    o.detail = fmt("global relative slack %.6g, min pointwise relative slack %.6g", c.global.relative_slack, min_rel);
  return o;
}

Outcome l_alpha_machinery() {
  Outcome o;
  for (double alpha : {1.2, 1.5, 2.0}) {
    for (double off : {0.5, 1.0, 2.0, 4.0, 8.0}) {
      const double p = alpha + off;
      const double l = L_alpha(alpha, p).value;
      o.require(case_C_bounds(alpha, p, 0.5).upper >= l, fmt("case C below L at alpha=%g p=%g", alpha, p));
    }
    double prev = INFINITY;
    for (double off : {0.1, 0.01, 0.001}) {
      const double p = alpha + off;
      const double d = std::fabs(L_alpha(alpha, p).value / case_A_asymptote(alpha, p) - 1.0);
      o.require(d < prev, fmt("case A not approaching at alpha=%g p=%g", alpha, p));
      prev = d;
    }
    std::vector<double> ratios;
    for (double off : {4.0, 8.0, 16.0, 32.0}) {
      const double p = alpha + off;
      ratios.push_back(L_alpha(alpha, p).value / case_B_asymptote(alpha, p));
    }
    bool up = true, down = true;
    for (std::size_t k = 1; k < ratios.size(); ++k) {
      up = up && ratios[k] > ratios[k - 1];
      down = down && ratios[k] < ratios[k - 1];
    }
    o.require(up || down, fmt("case B ratio not monotone at alpha=%g", alpha));
  }
  if (o.pass) o.detail = "case C dominates, case A converges, case B trend monotone";
  return o;
}

Outcome z_bounds() {
  Outcome o;
  double worst = 0.0;
  for (int n = 1; n <= 3; ++n)
    for (double sp : {0.5, 1.0, 1.5}) {
      const double s = 0.5, p = sp / s;
      const auto [lo, hi] = Z_bounds(n, s, p);
      o.require(lo <= hi && rel(hi / lo, n) <= 1e-12, fmt("n=%g sp=%g ratio %.15g", n, sp, hi / lo));
      const double e = rel(Z_attainment(n, s, p).value, hi);
      worst = std::max(worst, e);
      o.require(e <= 1e-6, fmt("n=%g sp=%g attainment off by %.3g", n, sp, e));
    }
  if (o.pass) o.detail = fmt("ratio n everywhere, worst attainment error %.3g", worst);
  return o;
}

Outcome weighted() {
  Outcome o;
  const auto line = ConvexDomain::half_line();
  const TestFunction fs[] = {xexp_profile(), TestFunction::bump(1, 0.5).shifted(1.5)};
  const std::pair<double, double> aps[] = {{1.2, 2.0}, {1.5, 2.5}};
  double min_rel = INFINITY;
  for (const TestFunction& f : fs)
    for (const auto& [alpha, p] : aps) {
      const SlackRecord r = check_weighted(f, line, alpha, p);
      o.require(holds(r), fmt("alpha=%g p=%g slack %.6g ", alpha, p, r.slack) + f.key());
      min_rel = std::min(min_rel, r.relative_slack);
    }
  const ChainReport c = check_theorem41(xexp_profile(), PsiFunction::constant(1.0, 1.6, 4.0), line, 1.5);
  o.require(holds(c.global), fmt("G-level slack %.6g", c.global.slack));
  if (o.pass)
    o.detail = fmt("min relative slack %.6g, G-level relative slack %.6g", min_rel, c.global.relative_slack);
  return o;
}

Outcome reproducibility() {
  Outcome o;
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("fracsob_acceptance_" + std::to_string(std::random_device{}()));
  fs::create_directories(dir);
  auto run_once = [&](const std::string& tag) {
    std::ostringstream out, err;
    const int rc = cli::run({"fracsob", "verify", "--ineq", "weighted", "--domain", "half-space", "--n", "2",
                             "--family", "bump", "--centre", "1.5", "--param", "0.5", "--alpha", "1.5", "--p-grid",
                             "2,3", "--qmc-log2", "12", "--seed", "99", "--tag", tag, "--out", dir.string()},
                            out, err);
    o.require(rc == cli::kOk, "cli exit " + std::to_string(rc) + ": " + err.str());
    std::ifstream in(dir / (tag + ".csv"), std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  };
  const std::string a = run_once("first");
  const std::string b = run_once("second");
  fs::remove_all(dir);
  o.require(!a.empty() && a == b, "CSV outputs differ");
  if (o.pass) o.detail = fmt("%g identical bytes", static_cast<double>(a.size()));
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"constant endpoints", constant_endpoints}, {"exponent algebra", exponent_algebra},
      {"sobolev conformal", sobolev_conformal},   {"sharpness probe", sharpness},
      {"dilation covariance", dilation},          {"degenerate collapse", degenerate_collapse},
      {"theorem21 chain", theorem21_chain},     {"L_alpha machinery", l_alpha_machinery},
      {"Z bounds", z_bounds},                     {"weighted inequality", weighted},
      {"reproducibility", reproducibility},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2zu %-22s %7.2fs  %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), secs,
                o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
