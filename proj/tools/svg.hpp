#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fracsob::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool line = true;
  bool markers = true;
  bool dashed = false;
};

struct HLine {
  double y;
  std::string label;
};

struct Plot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_x = false;
  bool log_y = false;
  std::vector<Series> series;
  std::vector<HLine> hlines;
  /// Points drawn as highlighted rings on top of everything else.
  std::vector<std::pair<double, double>> highlights;
};

/// Self-contained SVG document with axes, ticks, labels and a legend.
/// Throws std::invalid_argument when there is nothing finite to draw.
std::string render_svg(const Plot& plot);

}  // namespace fracsob::cli
