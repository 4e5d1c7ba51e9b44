#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace modsig {

struct SvgSeries {
  std::vector<double> y;  // evenly spaced over [x0, x1)
  std::string color = "#3465a4";
  bool bars = true;
  std::string label;
};

struct SvgChart {
  std::string title;
  double x0 = 0, x1 = 1;
  std::vector<SvgSeries> series;
  std::vector<std::pair<double, double>> shaded;  // x intervals drawn behind the data
  double y_reference = -1;                        // horizontal dashed line when >= 0
};

// Static bar/line chart, 640x400, fixed number formatting so output is reproducible.
void write_svg(std::ostream& out, const SvgChart& chart);

}  // namespace modsig
