#pragma once

#include <string>
#include <vector>

namespace irsnoma {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Writes a static SVG line plot (one polyline with markers per series,
/// linear axes, legend). Series without finite points are skipped with a
/// warning on stderr; returns false when nothing could be plotted.
bool write_line_plot_svg(const std::string& path, const std::string& title,
                         const std::string& x_label, const std::string& y_label,
                         const std::vector<PlotSeries>& series);

}  // namespace irsnoma
