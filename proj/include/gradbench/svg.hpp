#pragma once

#include <string>
#include <vector>

#include "gradbench/problems.hpp"
#include "gradbench/types.hpp"

namespace gradbench {

// Contour rendering knobs. Leaving a box axis degenerate (min == max) falls
// back to the surface's own plotting box.
struct ContourSpec {
  double x_min = 0.0, x_max = 0.0;
  double y_min = 0.0, y_max = 0.0;
  int resolution = 121;  // grid points per axis, >= 16
  int levels = 12;       // contour level count, >= 3
  bool log_levels = false;
};

// Renders a marching-squares contour layer plus one <polyline> per
// trajectory with a legend. Output is deterministic for fixed inputs, and
// the only <polyline> elements in it are trajectories. metadata, when
// nonempty, is embedded as an XML comment (seed, start point, resolved
// hyperparameters).
std::string render_contour_svg(const AnalyticSurface& surface,
                               const ContourSpec& spec,
                               const std::vector<Trajectory>& trajectories,
                               const std::string& metadata = "");

// Writes content to path, throwing IoError with path context on failure.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace gradbench
