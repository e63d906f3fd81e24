#include "svg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace fracsob::cli {

namespace {

constexpr double kWidth = 720;
constexpr double kHeight = 480;
constexpr double kLeft = 80;
constexpr double kRight = 180;
constexpr double kTop = 40;
constexpr double kBottom = 60;

const char* const kColours[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

struct Axis {
  double lo = 0.0;
  double hi = 1.0;
  bool log = false;

  double t(double v) const {
    const double a = log ? std::log10(v) : v;
    return (a - lo) / (hi - lo);
  }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }

  void fit(const std::vector<double>& values) {
    double mn = INFINITY;
    double mx = -INFINITY;
    for (double v : values) {
      if (!usable(v)) continue;
      const double a = log ? std::log10(v) : v;
      mn = std::min(mn, a);
      mx = std::max(mx, a);
    }
    if (!std::isfinite(mn)) throw std::invalid_argument("plot: no finite data");
    if (mx - mn < 1e-12 * std::max(1.0, std::fabs(mx))) {
      const double pad = log ? 0.5 : std::max(0.5, 0.1 * std::fabs(mx));
      mn -= pad;
      mx += pad;
    } else {
      const double pad = 0.05 * (mx - mn);
      mn -= pad;
      mx += pad;
    }
    lo = mn;
    hi = mx;
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (double e = std::ceil(lo); e <= hi; e += std::max(1.0, std::floor((hi - lo) / 6.0)))
        out.push_back(std::pow(10.0, e));
      return out;
    }
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0})
      if (raw <= m * mag) {
        step = m * mag;
        break;
      }
    for (double v = std::ceil(lo / step) * step; v <= hi; v += step) out.push_back(std::fabs(v) < 1e-12 * step ? 0.0 : v);
    return out;
  }
};

}  // namespace

std::string render_svg(const Plot& plot) {
  Axis ax{0, 1, plot.log_x};
  Axis ay{0, 1, plot.log_y};
  std::vector<double> xs;
  std::vector<double> ys;
  for (const Series& s : plot.series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (ax.usable(s.x[i]) && ay.usable(s.y[i])) {
        xs.push_back(s.x[i]);
        ys.push_back(s.y[i]);
      }
  if (xs.empty()) throw std::invalid_argument("plot: no finite data");
  for (const HLine& h : plot.hlines) ys.push_back(h.y);
  ax.fit(xs);
  ay.fit(ys);

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto X = [&](double v) { return kLeft + pw * ax.t(v); };
  auto Y = [&](double v) { return kTop + ph * (1.0 - ay.t(v)); };

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
     << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << kLeft + pw / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << escape(plot.title)
     << "</text>\n";

  // Frame, ticks and labels.
  os << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (double t : ax.ticks()) {
    const double x = X(t);
    os << "<line x1=\"" << x << "\" y1=\"" << kTop + ph << "\" x2=\"" << x << "\" y2=\"" << kTop + ph + 5
       << "\" stroke=\"black\"/><text x=\"" << x << "\" y=\"" << kTop + ph + 18 << "\" text-anchor=\"middle\">"
       << num(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = Y(t);
    os << "<line x1=\"" << kLeft - 5 << "\" y1=\"" << y << "\" x2=\"" << kLeft << "\" y2=\"" << y
       << "\" stroke=\"black\"/><text x=\"" << kLeft - 8 << "\" y=\"" << y + 4 << "\" text-anchor=\"end\">"
       << num(t) << "</text>\n";
  }
  os << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">"
     << escape(plot.xlabel) << "</text>\n"
     << "<text x=\"18\" y=\"" << kTop + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 "
     << kTop + ph / 2 << ")\">" << escape(plot.ylabel) << "</text>\n";

  for (const HLine& h : plot.hlines) {
    if (!ay.usable(h.y)) continue;
    const double y = Y(h.y);
    os << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\"" << kLeft + pw << "\" y2=\"" << y
       << "\" stroke=\"gray\" stroke-dasharray=\"6 4\"/><text x=\"" << kLeft + pw - 4 << "\" y=\"" << y - 4
       << "\" text-anchor=\"end\" fill=\"gray\">" << escape(h.label) << "</text>\n";
  }

  std::size_t colour = 0;
  double legend_y = kTop + 10;
  for (const Series& s : plot.series) {
    const char* c = kColours[colour++ % std::size(kColours)];
    std::ostringstream pts;
    std::size_t count = 0;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!ax.usable(s.x[i]) || !ay.usable(s.y[i])) continue;
      pts << (count++ ? " " : "") << X(s.x[i]) << ',' << Y(s.y[i]);
    }
    if (count == 0) continue;
    if (s.line && count > 1)
      os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\""
         << (s.dashed ? " stroke-dasharray=\"5 3\"" : "") << " points=\"" << pts.str() << "\"/>\n";
    if (s.markers || count == 1)
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
        if (ax.usable(s.x[i]) && ay.usable(s.y[i]))
          os << "<circle cx=\"" << X(s.x[i]) << "\" cy=\"" << Y(s.y[i]) << "\" r=\"3\" fill=\"" << c << "\"/>\n";
    os << "<line x1=\"" << kWidth - kRight + 15 << "\" y1=\"" << legend_y << "\" x2=\"" << kWidth - kRight + 35
       << "\" y2=\"" << legend_y << "\" stroke=\"" << c << "\" stroke-width=\"2\"/><text x=\""
       << kWidth - kRight + 40 << "\" y=\"" << legend_y + 4 << "\">" << escape(s.label) << "</text>\n";
    legend_y += 18;
  }
  for (auto [hx, hy] : plot.highlights)
    if (ax.usable(hx) && ay.usable(hy))
      os << "<circle cx=\"" << X(hx) << "\" cy=\"" << Y(hy) << "\" r=\"7\" fill=\"none\" stroke=\"black\" "
         << "stroke-width=\"2\"/>\n";
  os << "</svg>\n";
  return os.str();
}

}  // namespace fracsob::cli
