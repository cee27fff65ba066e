#pragma once

#include <string>

#include "wcomp/hermite.hpp"

namespace wcomp {

struct PlotOptions {
  double x_lo = 0.0;
  double x_hi = 0.0;   // lo == hi -> full knot range
  int samples = 600;   // per panel
  int zoom_knots = 10; // bottom row covers the first iterates up to this knot
};

/// Six-panel figure (2x3): value, first and second derivative over the knot
/// range on top, over the first iterates below, with dotted +-eps guides on
/// the top derivative panel. Output is deterministic (fixed viewbox, fixed
/// number formatting, no timestamps).
std::string render_objective_figure(const PiecewiseObjective& obj, const PlotOptions& opts = {});

void plot_objective(const PiecewiseObjective& obj, const std::string& path,
                    const PlotOptions& opts = {});

}  // namespace wcomp
