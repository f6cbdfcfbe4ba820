#pragma once

#include <string>
#include <vector>

namespace ophydro {

struct SvgSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;  // empty -> palette by index
  bool dashed = false;
  bool points = false;  // draw markers instead of a connecting line
};

// Minimal self-contained line chart; no external plotting dependency.
struct SvgChart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;  // nonpositive values are skipped
  int width = 860;
  int height = 540;
  std::vector<SvgSeries> series;
};

std::string render_svg(const SvgChart& chart);

}  // namespace ophydro
