#include "carpet/render.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace carpet {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string render_cells_svg(const FractalSpec& spec, int level,
                             std::size_t budget) {
  if (spec.dimension() != 2)
    throw std::invalid_argument("render supports planar specs only");
  if (level < 0 || level > 5)
    throw std::invalid_argument("render level must be in [0, 5]");

  const double size = 500.0;
  const Index n = pow5(level);
  const double cell = size / static_cast<double>(n);
  const CellSet cells = cells_at_level(spec, level, budget);

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size
     << "\" height=\"" << size << "\" viewBox=\"0 0 " << size << ' ' << size
     << "\">\n";
  os << "<rect width=\"" << size << "\" height=\"" << size
     << "\" fill=\"#ffffff\"/>\n";
  for (std::size_t i = 0; i < cells.size(); ++i) {
    auto c = cells.coords(i);
    // SVG y axis points down; the lattice y axis points up.
    const double x = static_cast<double>(c[0] - 1) * cell;
    const double y = static_cast<double>(n - c[1]) * cell;
    os << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\""
       << fmt(cell) << "\" height=\"" << fmt(cell)
       << "\" fill=\"#1f3557\" shape-rendering=\"crispEdges\"/>\n";
  }
  os << "</svg>\n";
  return os.str();
}

std::string line_plot_svg(const std::string& x_label,
                          const std::string& y_label,
                          const std::vector<PlotSeries>& series) {
  const double w = 640, h = 480;
  const double ml = 70, mr = 140, mt = 30, mb = 50;
  static const char* kPalette[] = {"#1b6ca8", "#c23b22", "#2e8540",
                                   "#8031a7", "#b8860b", "#007c91"};

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& s : series)
    for (auto [x, y] : s.points) {
      xmin = std::min(xmin, x);
      xmax = std::max(xmax, x);
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  if (!(xmin <= xmax)) {
    xmin = 0;
    xmax = 1;
    ymin = 0;
    ymax = 1;
  }
  if (xmax == xmin) xmax = xmin + 1;
  if (ymax == ymin) {
    ymax += 0.5;
    ymin -= 0.5;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  auto sx = [&](double x) {
    return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr);
  };
  auto sy = [&](double y) {
    return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb);
  };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
     << "\" height=\"" << h << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"" << w << "\" height=\"" << h
     << "\" fill=\"#ffffff\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << h - mb << "\" x2=\"" << w - mr
     << "\" y2=\"" << h - mb << "\" stroke=\"#333\"/>\n";
  os << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml
     << "\" y2=\"" << h - mb << "\" stroke=\"#333\"/>\n";

  const int ticks = 5;
  for (int i = 0; i <= ticks; ++i) {
    const double x = xmin + (xmax - xmin) * i / ticks;
    const double y = ymin + (ymax - ymin) * i / ticks;
    os << "<line x1=\"" << fmt(sx(x)) << "\" y1=\"" << h - mb << "\" x2=\""
       << fmt(sx(x)) << "\" y2=\"" << h - mb + 5 << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << fmt(sx(x)) << "\" y=\"" << h - mb + 18
       << "\" text-anchor=\"middle\">" << fmt(x) << "</text>\n";
    os << "<line x1=\"" << ml - 5 << "\" y1=\"" << fmt(sy(y)) << "\" x2=\""
       << ml << "\" y2=\"" << fmt(sy(y)) << "\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << ml - 8 << "\" y=\"" << fmt(sy(y) + 4)
       << "\" text-anchor=\"end\">" << fmt(y) << "</text>\n";
  }
  os << "<text x=\"" << (ml + w - mr) / 2 << "\" y=\"" << h - 12
     << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
  os << "<text x=\"16\" y=\"" << (mt + h - mb) / 2
     << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (mt + h - mb) / 2 << ")\">" << y_label << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % 6];
    os << "<polyline fill=\"none\" stroke=\"" << color
       << "\" stroke-width=\"1.5\" points=\"";
    for (auto [x, y] : series[k].points)
      os << fmt(sx(x)) << ',' << fmt(sy(y)) << ' ';
    os << "\"/>\n";
    for (auto [x, y] : series[k].points)
      os << "<circle cx=\"" << fmt(sx(x)) << "\" cy=\"" << fmt(sy(y))
         << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
    const double ly = mt + 16.0 * static_cast<double>(k);
    os << "<line x1=\"" << w - mr + 10 << "\" y1=\"" << fmt(ly) << "\" x2=\""
       << w - mr + 30 << "\" y2=\"" << fmt(ly) << "\" stroke=\"" << color
       << "\" stroke-width=\"1.5\"/>\n";
    os << "<text x=\"" << w - mr + 35 << "\" y=\"" << fmt(ly + 4) << "\">"
       << series[k].label << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace carpet
