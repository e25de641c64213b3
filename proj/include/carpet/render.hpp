#pragma once

#include <string>
#include <utility>
#include <vector>

#include "carpet/fractal.hpp"

namespace carpet {

/// SVG of the retained level-n cells as filled squares; planar specs only,
/// level <= 5. Output is deterministic.
std::string render_cells_svg(const FractalSpec& spec, int level,
                             std::size_t budget = kDefaultCellBudget);

struct PlotSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

/// Minimal line plot (axes, ticks, legend) used for scan reports.
std::string line_plot_svg(const std::string& x_label,
                          const std::string& y_label,
                          const std::vector<PlotSeries>& series);

}  // namespace carpet
