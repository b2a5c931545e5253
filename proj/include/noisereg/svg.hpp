#pragma once

#include <string>

#include "noisereg/experiments.hpp"

namespace noisereg {

/// Chart annotations replicated from the reference figures: vertical marks
/// at n0 and d0 and the null-model horizontal line.
struct CurveSvgOptions {
  Eigen::Index n0_mark = -1;   // grey vertical line; < 0 disables
  Eigen::Index d0_mark = -1;   // black vertical line; < 0 disables
  double null_rmse = 0.0;      // horizontal line at sqrt(|beta0|^2 + sigma2); 0 disables
  std::string x_label = "d";
  std::string title;
  int light_curves = 20;       // per-trial conditional RMSE curves to draw
};

/// Static SVG error-curve plot with a log-scaled y axis.  Infinite analytic
/// values are clipped to the top edge and flagged with a marker.
void render_curve_svg(const ErrorCurve& curve, const CurveSvgOptions& options,
                      const std::string& path);

/// Heatmap with a diverging palette centered at zero (purple-blue positive,
/// orange-red negative).
void render_heatmap_svg(const HeatmapResult& hm, const std::string& path);

} // namespace noisereg
