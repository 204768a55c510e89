#include "gradbench/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace gradbench {

namespace {

constexpr double kWidth = 780.0;
constexpr double kHeight = 600.0;
constexpr double kPlotLeft = 55.0;
constexpr double kPlotRight = 610.0;
constexpr double kPlotTop = 40.0;
constexpr double kPlotBottom = 560.0;

const char* const kPalette[] = {
    "#c0392b", "#2980b9", "#27ae60", "#8e44ad", "#e67e22",
    "#16a085", "#d35400", "#2c3e50", "#7f8c8d", "#f39c12",
};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3f", v);
  return buf;
}

std::string fmt_sig(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
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

struct Mapper {
  double x_min, x_max, y_min, y_max;
  double sx(double x) const {
    return kPlotLeft + (x - x_min) / (x_max - x_min) * (kPlotRight - kPlotLeft);
  }
  double sy(double y) const {
    // Screen y grows downward.
    return kPlotBottom - (y - y_min) / (y_max - y_min) * (kPlotBottom - kPlotTop);
  }
};

// Linear interpolation of the level crossing between two grid corners.
double crossing(double va, double vb, double a, double b, double level) {
  const double denom = vb - va;
  if (denom == 0.0) return 0.5 * (a + b);
  double t = (level - va) / denom;
  t = std::clamp(t, 0.0, 1.0);
  return a + t * (b - a);
}

}  // namespace

std::string render_contour_svg(const AnalyticSurface& surface,
                               const ContourSpec& spec,
                               const std::vector<Trajectory>& trajectories,
                               const std::string& metadata) {
  if (spec.resolution < 16) {
    throw ConfigError("contour resolution must be at least 16");
  }
  if (spec.levels < 3) throw ConfigError("contour level count must be >= 3");

  const AnalyticSurface::Box& def = surface.plot_box();
  Mapper map{spec.x_min == spec.x_max ? def.x_min : spec.x_min,
             spec.x_min == spec.x_max ? def.x_max : spec.x_max,
             spec.y_min == spec.y_max ? def.y_min : spec.y_min,
             spec.y_min == spec.y_max ? def.y_max : spec.y_max};
  if (!(map.x_max > map.x_min) || !(map.y_max > map.y_min)) {
    throw ConfigError("contour domain box is degenerate");
  }

  // Sample the surface on the grid.
  const int res = spec.resolution;
  std::vector<double> grid(static_cast<std::size_t>(res) * res);
  std::vector<double> xs(res), ys(res);
  for (int i = 0; i < res; ++i) {
    xs[i] = map.x_min + (map.x_max - map.x_min) * i / (res - 1);
    ys[i] = map.y_min + (map.y_max - map.y_min) * i / (res - 1);
  }
  double v_min = std::numeric_limits<double>::infinity();
  double v_max = -std::numeric_limits<double>::infinity();
  for (int j = 0; j < res; ++j) {
    for (int i = 0; i < res; ++i) {
      const double v = surface.value({xs[i], ys[j]});
      grid[static_cast<std::size_t>(j) * res + i] = v;
      v_min = std::min(v_min, v);
      v_max = std::max(v_max, v);
    }
  }

  // Level values: log-spaced for surfaces spanning orders of magnitude,
  // linear otherwise. Interior levels only.
  std::vector<double> levels;
  levels.reserve(static_cast<std::size_t>(spec.levels));
  if (spec.log_levels) {
    const double hi = v_max;
    double lo = v_min;
    if (!(lo > 0.0)) lo = std::max(1e-3, hi * 1e-7);
    if (!(hi > lo)) throw ConfigError("log contour levels need positive range");
    const double llo = std::log(lo), lhi = std::log(hi);
    for (int k = 1; k <= spec.levels; ++k) {
      levels.push_back(
          std::exp(llo + (lhi - llo) * k / (spec.levels + 1)));
    }
  } else {
    for (int k = 1; k <= spec.levels; ++k) {
      levels.push_back(v_min + (v_max - v_min) * k / (spec.levels + 1));
    }
  }

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " "
      << kHeight << "\">\n";
  if (!metadata.empty()) {
    std::string safe = metadata;
    // "--" terminates XML comments early; keep the comment well-formed.
    std::size_t pos = 0;
    while ((pos = safe.find("--", pos)) != std::string::npos) {
      safe.replace(pos, 2, "- -");
    }
    svg << "<!-- " << safe << " -->\n";
  }
  svg << "<title>" << xml_escape(surface.surface_name()) << "</title>\n";
  svg << "<defs><clipPath id=\"plot\"><rect x=\"" << fmt(kPlotLeft)
      << "\" y=\"" << fmt(kPlotTop) << "\" width=\""
      << fmt(kPlotRight - kPlotLeft) << "\" height=\""
      << fmt(kPlotBottom - kPlotTop) << "\"/></clipPath></defs>\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\""
      << kHeight << "\" fill=\"white\"/>\n";

  // Contour layer: marching squares, one <path> per level. Corner order of a
  // cell (i,j): a=(i,j) b=(i+1,j) c=(i+1,j+1) d=(i,j+1); bit k set means the
  // corner value exceeds the level.
  svg << "<g stroke=\"#b5b5b5\" stroke-width=\"1\" fill=\"none\" "
         "clip-path=\"url(#plot)\">\n";
  for (const double level : levels) {
    std::ostringstream d;
    for (int j = 0; j + 1 < res; ++j) {
      for (int i = 0; i + 1 < res; ++i) {
        const double va = grid[static_cast<std::size_t>(j) * res + i];
        const double vb = grid[static_cast<std::size_t>(j) * res + i + 1];
        const double vc = grid[static_cast<std::size_t>(j + 1) * res + i + 1];
        const double vd = grid[static_cast<std::size_t>(j + 1) * res + i];
        const int code = (va > level ? 1 : 0) | (vb > level ? 2 : 0) |
                         (vc > level ? 4 : 0) | (vd > level ? 8 : 0);
        if (code == 0 || code == 15) continue;
        const double x0 = xs[i], x1 = xs[i + 1];
        const double y0 = ys[j], y1 = ys[j + 1];
        // Edge midpoints with interpolated crossings.
        const double ex_b = crossing(va, vb, x0, x1, level);  // bottom edge
        const double ex_t = crossing(vd, vc, x0, x1, level);  // top edge
        const double ey_l = crossing(va, vd, y0, y1, level);  // left edge
        const double ey_r = crossing(vb, vc, y0, y1, level);  // right edge
        auto seg = [&](double ax, double ay, double bx, double by) {
          d << "M" << fmt(map.sx(ax)) << " " << fmt(map.sy(ay)) << "L"
            << fmt(map.sx(bx)) << " " << fmt(map.sy(by));
        };
        switch (code) {
          case 1: case 14: seg(ex_b, y0, x0, ey_l); break;
          case 2: case 13: seg(ex_b, y0, x1, ey_r); break;
          case 3: case 12: seg(x0, ey_l, x1, ey_r); break;
          case 4: case 11: seg(ex_t, y1, x1, ey_r); break;
          case 6: case 9:  seg(ex_b, y0, ex_t, y1); break;
          case 7: case 8:  seg(x0, ey_l, ex_t, y1); break;
          case 5:
            // Ambiguous saddle cell; split consistently.
            seg(ex_b, y0, x1, ey_r);
            seg(x0, ey_l, ex_t, y1);
            break;
          case 10:
            seg(ex_b, y0, x0, ey_l);
            seg(ex_t, y1, x1, ey_r);
            break;
          default: break;
        }
      }
    }
    const std::string path = d.str();
    if (!path.empty()) {
      svg << "<path d=\"" << path << "\"/>\n";
    }
  }
  svg << "</g>\n";

  // Frame and axis labels.
  svg << "<rect x=\"" << fmt(kPlotLeft) << "\" y=\"" << fmt(kPlotTop)
      << "\" width=\"" << fmt(kPlotRight - kPlotLeft) << "\" height=\""
      << fmt(kPlotBottom - kPlotTop)
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  svg << "<text x=\"" << fmt(kPlotLeft) << "\" y=\"" << fmt(kPlotBottom + 18)
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << fmt_sig(map.x_min)
      << "</text>\n";
  svg << "<text x=\"" << fmt(kPlotRight - 30) << "\" y=\""
      << fmt(kPlotBottom + 18)
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << fmt_sig(map.x_max)
      << "</text>\n";
  svg << "<text x=\"" << fmt(kPlotLeft - 45) << "\" y=\"" << fmt(kPlotBottom)
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << fmt_sig(map.y_min)
      << "</text>\n";
  svg << "<text x=\"" << fmt(kPlotLeft - 45) << "\" y=\"" << fmt(kPlotTop + 10)
      << "\" font-family=\"sans-serif\" font-size=\"12\">" << fmt_sig(map.y_max)
      << "</text>\n";
  svg << "<text x=\"" << fmt(kPlotLeft) << "\" y=\"" << fmt(kPlotTop - 14)
      << "\" font-family=\"sans-serif\" font-size=\"15\">"
      << xml_escape(surface.surface_name()) << "</text>\n";

  // Trajectories: exactly one polyline per trajectory, every recorded point.
  svg << "<g fill=\"none\" stroke-width=\"1.6\" clip-path=\"url(#plot)\">\n";
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    const Trajectory& traj = trajectories[k];
    svg << "<polyline stroke=\"" << kPalette[k % kPaletteSize]
        << "\" points=\"";
    bool first = true;
    for (const TrajectoryEntry& e : traj.entries) {
      if (!first) svg << ' ';
      first = false;
      svg << fmt(map.sx(e.theta[0])) << ',' << fmt(map.sy(e.theta[1]));
    }
    svg << "\"/>\n";
  }
  svg << "</g>\n";

  // Legend.
  for (std::size_t k = 0; k < trajectories.size(); ++k) {
    const double ly = kPlotTop + 10 + 22.0 * static_cast<double>(k);
    svg << "<rect x=\"" << fmt(kPlotRight + 18) << "\" y=\"" << fmt(ly)
        << "\" width=\"14\" height=\"14\" fill=\"" << kPalette[k % kPaletteSize]
        << "\"/>\n";
    svg << "<text x=\"" << fmt(kPlotRight + 38) << "\" y=\"" << fmt(ly + 12)
        << "\" font-family=\"sans-serif\" font-size=\"13\">"
        << xml_escape(trajectories[k].optimizer_name) << "</text>\n";
  }

  svg << "</svg>\n";
  return svg.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open for writing: " + path);
  os << content;
  os.flush();
  if (!os) throw IoError("write failed: " + path);
}

}  // namespace gradbench
