#include "fracsob/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <random>
#include <sstream>

#include <boost/random/sobol.hpp>

namespace fracsob {

double gamma(double x) {
  if (!(x > 0.0)) throw DomainError("gamma: argument must be positive");
  const double g = std::tgamma(x);
  if (!std::isfinite(g)) throw std::overflow_error("gamma: result not representable");
  return g;
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
  return std::lgamma(x);
}

double sphere_area(int n) {
  if (n < 1) throw DomainError("sphere_area: dimension must be >= 1");
  const double half = 0.5 * n;
  return 2.0 * std::pow(std::numbers::pi, half) / gamma(half);
}

double bessel_j0(double x) { return std::cyl_bessel_j(0.0, std::fabs(x)); }

namespace {

// Gauss-Legendre 20-point nodes/weights on [-1, 1] (positive half).
constexpr double kGl20x[10] = {0.0765265211334973337546404, 0.2277858511416450780804962,
                               0.3737060887154195606725482, 0.5108670019508270980043641,
                               0.6360536807265150254528367, 0.7463319064601507926143051,
                               0.8391169718222188233945291, 0.9122344282513259058677524,
                               0.9639719272779137912676661, 0.9931285991850949247861224};
constexpr double kGl20w[10] = {0.1527533871307258506980843, 0.1491729864726037467878287,
                               0.1420961093183820513292983, 0.1316886384491766268984945,
                               0.1181945319615184173123774, 0.1019301198172404350367501,
                               0.0832767415767047487247581, 0.0626720483341090635695065,
                               0.0406014298003869413310400, 0.0176140071391521183118620};


// Kronrod 15-point abscissae (descending, last is the centre) and weights;
// odd indices are shared with the 7-point Gauss rule.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

double checked(const RealFunction& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y)) {
    std::ostringstream os;
    os << "integrand returned non-finite value " << y << " at x = " << x;
    throw QuadratureError(os.str(), {});
  }
  return y;
}

Panel gk15(const RealFunction& f, double a, double b) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = checked(f, centre);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  double abs_sum = std::fabs(kronrod);
  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    f1[j] = checked(f, centre - dx);
    f2[j] = checked(f, centre + dx);
    kronrod += kWgk[j] * (f1[j] + f2[j]);
    abs_sum += kWgk[j] * (std::fabs(f1[j]) + std::fabs(f2[j]));
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1[j] + f2[j]);
  }
  const double mean = 0.5 * kronrod;
  double asc = kWgk[7] * std::fabs(fc - mean);
  for (int j = 0; j < 7; ++j) asc += kWgk[j] * (std::fabs(f1[j] - mean) + std::fabs(f2[j] - mean));

  const double result = kronrod * half;
  const double resabs = abs_sum * std::fabs(half);
  const double resasc = asc * std::fabs(half);
  double err = std::fabs((kronrod - gauss) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);
  return {a, b, result, err};
}

QuadResult adaptive(const RealFunction& f, std::vector<double> cuts, const QuadOptions& opts) {
  std::priority_queue<Panel> heap;
  QuadResult out;
  double settled_value = 0.0;
  double settled_error = 0.0;
  double total_value = 0.0;
  double total_error = 0.0;
  std::size_t panels = 0;

  try {
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      if (!(cuts[i + 1] > cuts[i])) continue;
      Panel p = gk15(f, cuts[i], cuts[i + 1]);
      out.evaluations += 15;
      total_value += p.value;
      total_error += p.error;
      heap.push(p);
      ++panels;
    }
    while (!heap.empty()) {
      const double target = std::max(opts.abs_tol, opts.rel_tol * std::fabs(total_value));
      if (total_error <= target) break;
      if (panels >= opts.max_intervals) {
        out.value = total_value;
        out.error_estimate = total_error;
        throw QuadratureError("integrate_1d: interval budget exhausted before tolerance was met", out);
      }
      Panel worst = heap.top();
      heap.pop();
      const double mid = 0.5 * (worst.a + worst.b);
      constexpr double eps = std::numeric_limits<double>::epsilon();
      if (!(mid > worst.a && mid < worst.b) ||
          (worst.b - worst.a) < 64.0 * eps * std::max(std::fabs(worst.a), std::fabs(worst.b))) {
        // Cannot be resolved further in double precision.
        settled_value += worst.value;
        settled_error += worst.error;
        continue;
      }
      Panel left = gk15(f, worst.a, mid);
      Panel right = gk15(f, mid, worst.b);
      out.evaluations += 30;
      total_value += left.value + right.value - worst.value;
      total_error += left.error + right.error - worst.error;
      heap.push(left);
      heap.push(right);
      ++panels;
    }
  } catch (const QuadratureError& e) {
    if (e.partial().evaluations != 0) throw;
    QuadResult partial{total_value, total_error, out.evaluations};
    throw QuadratureError(e.what(), partial);
  }
  // Re-sum in a fixed order so the result does not depend on heap layout.
  std::vector<Panel> rest;
  rest.reserve(heap.size());
  while (!heap.empty()) {
    rest.push_back(heap.top());
    heap.pop();
  }
  std::sort(rest.begin(), rest.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
  double value = settled_value;
  double error = settled_error;
  for (const Panel& p : rest) {
    value += p.value;
    error += p.error;
  }
  out.value = value;
  out.error_estimate = error;
  const double target = std::max(opts.abs_tol, opts.rel_tol * std::fabs(value));
  if (error > target && settled_error > 0.0 && error > 10.0 * target) {
    throw QuadratureError("integrate_1d: roundoff prevents reaching the requested tolerance", out);
  }
  return out;
}

}  // namespace

double gauss_legendre20(const RealFunction& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double s = 0.0;
  for (int i = 0; i < 10; ++i) s += kGl20w[i] * (f(c - h * kGl20x[i]) + f(c + h * kGl20x[i]));
  return s * h;
}


QuadResult integrate_1d(const RealFunction& f, double a, double b, const QuadOptions& opts) {
  if (!(a < b)) throw DomainError("integrate_1d: requires a < b");
  if (opts.singularity && opts.singularity->power >= 1.0)
    throw DomainError("integrate_1d: endpoint singularity power must be < 1");

  std::vector<double> interior;
  for (double x : opts.breakpoints)
    if (x > a && x < b) interior.push_back(x);
  std::sort(interior.begin(), interior.end());
  interior.erase(std::unique(interior.begin(), interior.end()), interior.end());

  if (!opts.singularity || opts.singularity->power <= 0.0) {
    std::vector<double> cuts{a};
    cuts.insert(cuts.end(), interior.begin(), interior.end());
    cuts.push_back(b);
    return adaptive(f, std::move(cuts), opts);
  }

  // x = a + t^m (or b - t^m) with m = 1/(1 - power) makes the integrand bounded.
  const double m = 1.0 / (1.0 - opts.singularity->power);
  const bool lower = opts.singularity->at == Endpoint::lower;
  const double length = b - a;
  RealFunction g = [&](double t) {
    const double d = std::pow(t, m);
    const double x = lower ? a + d : b - d;
    if (d == 0.0) return 0.0;
    return f(x) * m * d / t;
  };
  std::vector<double> cuts{0.0};
  std::vector<double> mapped;
  for (double x : interior) mapped.push_back(std::pow(lower ? x - a : b - x, 1.0 / m));
  std::sort(mapped.begin(), mapped.end());
  cuts.insert(cuts.end(), mapped.begin(), mapped.end());
  cuts.push_back(std::pow(length, 1.0 / m));
  return adaptive(g, std::move(cuts), opts);
}

QuadResult integrate_1d(const RealFunction& f, double a, double b, double tol,
                        std::optional<EndpointSingularity> singularity) {
  QuadOptions opts;
  opts.rel_tol = tol;
  opts.abs_tol = tol;
  opts.singularity = singularity;
  return integrate_1d(f, a, b, opts);
}

QuadResult integrate_halfline(const RealFunction& f, double a, const HalflineOptions& opts) {
  if (!(opts.scale > 0.0)) throw DomainError("integrate_halfline: scale must be positive");
  QuadOptions q;
  q.rel_tol = opts.rel_tol;
  q.abs_tol = opts.abs_tol;
  q.max_intervals = opts.max_intervals;
  const double s = opts.scale;

  if (opts.decay_power) {
    const double k = *opts.decay_power;
    if (!(k > 1.0)) throw DomainError("integrate_halfline: decay power must exceed 1");
    const double e = 1.0 / (k - 1.0);
    RealFunction g = [&](double t) {
      const double w = std::pow(t, -e);
      const double r = a + s * (w - 1.0);
      if (!std::isfinite(r)) return 0.0;
      const double v = f(r);
      if (v == 0.0) return 0.0;
      return v * s * e * w / t;
    };
    q.breakpoints = {std::pow(2.0, -1.0 / e), std::pow(11.0, -1.0 / e), std::pow(101.0, -1.0 / e)};
    return integrate_1d(g, 0.0, 1.0, q);
  }

  RealFunction g = [&](double t) {
    const double om = 1.0 - t;
    const double r = a + s * t / om;
    if (!std::isfinite(r)) return 0.0;
    const double v = f(r);
    if (v == 0.0) return 0.0;
    return v * s / (om * om);
  };
  // No decay: g(t)(1-t) must vanish as t -> 1 for the tail to be negligible.
  const double near = std::fabs(g(1.0 - 1e-3)) * 1e-3;
  const double far = std::fabs(g(1.0 - 1e-7)) * 1e-7;
  if (far > 0.0 && far > 0.5 * near && far > std::max(opts.abs_tol, 1e-300)) {
    std::ostringstream os;
    os << "integrate_halfline: integrand does not decay (tail mass ~" << far << " at r ~ " << a + s * 1e7
       << ")";
    throw QuadratureError(os.str(), {});
  }
  q.breakpoints = {0.5, 0.9, 0.99};
  return integrate_1d(g, 0.0, 1.0, q);
}

QuadResult integrate_halfline(const RealFunction& f, double a, double tol) {
  HalflineOptions opts;
  opts.rel_tol = tol;
  opts.abs_tol = tol;
  return integrate_halfline(f, a, opts);
}

QuadResult integrate_qmc(const MultiFunction& f, std::span<const Interval> box, const QmcOptions& opts) {
  const std::size_t dim = box.size();
  if (dim < 1 || dim > 6) throw DomainError("integrate_qmc: dimension must be between 1 and 6");
  if (opts.shifts < 2) throw DomainError("integrate_qmc: need at least two random shifts");
  if (opts.log2_points > 30) throw DomainError("integrate_qmc: too many points per shift");
  double volume = 1.0;
  for (const auto& [lo, hi] : box) {
    if (!(hi > lo)) throw DomainError("integrate_qmc: empty box side");
    volume *= hi - lo;
  }

  const std::size_t points = std::size_t{1} << opts.log2_points;
  constexpr double scale = 0x1p-64;
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  std::vector<double> shift(dim);
  std::vector<double> x(dim);
  std::vector<double> replicate(opts.shifts);
  for (unsigned k = 0; k < opts.shifts; ++k) {
    for (auto& u : shift) u = unit(rng);
    boost::random::sobol seq(dim);
    double sum = 0.0;
    for (std::size_t i = 0; i < points; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        double y = static_cast<double>(seq()) * scale + shift[j];
        if (y >= 1.0) y -= 1.0;
        x[j] = box[j].first + y * (box[j].second - box[j].first);
      }
      const double v = f(x);
      if (!std::isfinite(v)) {
        std::ostringstream os;
        os << "integrate_qmc: non-finite integrand at (";
        for (std::size_t j = 0; j < dim; ++j) os << (j ? ", " : "") << x[j];
        os << ")";
        throw QuadratureError(os.str(), {});
      }
      sum += v;
    }
    replicate[k] = volume * sum / static_cast<double>(points);
  }

  double mean = 0.0;
  for (double r : replicate) mean += r;
  mean /= opts.shifts;
  double var = 0.0;
  for (double r : replicate) var += (r - mean) * (r - mean);
  var /= (opts.shifts - 1);
  return {mean, std::sqrt(var / opts.shifts), points * opts.shifts};
}

}  // namespace fracsob
