#include "irsnoma/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>

namespace irsnoma {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 440;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 55;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// Round tick spacing to a 1/2/5 decade multiple.
double nice_step(double span, int target_ticks) {
  const double raw = span / std::max(target_ticks, 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  double step = 10.0;
  if (frac <= 1.0) step = 1.0;
  else if (frac <= 2.0) step = 2.0;
  else if (frac <= 5.0) step = 5.0;
  return step * mag;
}

}  // namespace

bool write_line_plot_svg(const std::string& path, const std::string& title,
                         const std::string& x_label, const std::string& y_label,
                         const std::vector<PlotSeries>& series) {
  std::vector<const PlotSeries*> usable;
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  for (const auto& s : series) {
    bool any = false;
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      any = true;
      x_min = std::min(x_min, s.x[i]);
      x_max = std::max(x_max, s.x[i]);
      y_min = std::min(y_min, s.y[i]);
      y_max = std::max(y_max, s.y[i]);
    }
    if (any) {
      usable.push_back(&s);
    } else {
      std::cerr << "plot: series '" << s.label << "' has no finite points, omitted\n";
    }
  }
  if (usable.empty()) {
    std::cerr << "plot: nothing to draw for " << path << "\n";
    return false;
  }
  if (x_max == x_min) { x_max += 1.0; x_min -= 1.0; }
  if (y_max == y_min) { y_max += 1.0; y_min -= 1.0; }
  const double y_pad = 0.05 * (y_max - y_min);
  y_min -= y_pad;
  y_max += y_pad;

  const double plot_w = kWidth - kMarginLeft - kMarginRight;
  const double plot_h = kHeight - kMarginTop - kMarginBottom;
  auto sx = [&](double x) { return kMarginLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto sy = [&](double y) { return kMarginTop + (y_max - y) / (y_max - y_min) * plot_h; };

  std::ofstream os(path);
  if (!os) {
    std::cerr << "plot: cannot open " << path << "\n";
    return false;
  }
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
     << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
     << title << "</text>\n";

  const double x_step = nice_step(x_max - x_min, 6);
  for (double t = std::ceil(x_min / x_step) * x_step; t <= x_max + 1e-9; t += x_step) {
    os << "<line x1=\"" << fmt(sx(t)) << "\" y1=\"" << kMarginTop << "\" x2=\""
       << fmt(sx(t)) << "\" y2=\"" << kMarginTop + plot_h
       << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << fmt(sx(t)) << "\" y=\"" << kMarginTop + plot_h + 18
       << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(t) << "</text>\n";
  }
  const double y_step = nice_step(y_max - y_min, 6);
  for (double t = std::ceil(y_min / y_step) * y_step; t <= y_max + 1e-9; t += y_step) {
    os << "<line x1=\"" << kMarginLeft << "\" y1=\"" << fmt(sy(t)) << "\" x2=\""
       << kMarginLeft + plot_w << "\" y2=\"" << fmt(sy(t))
       << "\" stroke=\"#dddddd\"/>\n";
    os << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << fmt(sy(t) + 4)
       << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(t) << "</text>\n";
  }
  os << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
     << plot_w << "\" height=\"" << plot_h
     << "\" fill=\"none\" stroke=\"black\"/>\n";
  os << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
     << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
  os << "<text x=\"18\" y=\"" << kMarginTop + plot_h / 2
     << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 18 "
     << kMarginTop + plot_h / 2 << ")\">" << y_label << "</text>\n";

  for (std::size_t s = 0; s < usable.size(); ++s) {
    const auto& ser = *usable[s];
    const char* color = kColors[s % (sizeof(kColors) / sizeof(kColors[0]))];
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
      os << fmt(sx(ser.x[i])) << ',' << fmt(sy(ser.y[i])) << ' ';
    }
    os << "\"/>\n";
    for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
      if (!std::isfinite(ser.x[i]) || !std::isfinite(ser.y[i])) continue;
      os << "<circle cx=\"" << fmt(sx(ser.x[i])) << "\" cy=\"" << fmt(sy(ser.y[i]))
         << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
    const double ly = kMarginTop + 16 + 18 * static_cast<double>(s);
    os << "<line x1=\"" << kMarginLeft + plot_w - 130 << "\" y1=\"" << fmt(ly - 4)
       << "\" x2=\"" << kMarginLeft + plot_w - 105 << "\" y2=\"" << fmt(ly - 4)
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    os << "<text x=\"" << kMarginLeft + plot_w - 100 << "\" y=\"" << fmt(ly)
       << "\" font-size=\"12\">" << ser.label << "</text>\n";
  }
  os << "</svg>\n";
  return true;
}

}  // namespace irsnoma
