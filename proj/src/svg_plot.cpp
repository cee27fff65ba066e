#include "wcomp/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace wcomp {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

struct Panel {
  double x0 = 0, y0 = 0, w = 0, h = 0;  // pixel box
  double lo = 0, hi = 1;                // data x range
  double ymin = 0, ymax = 1;            // data y range
};

void draw_panel(std::ostringstream& svg, const PiecewiseObjective& obj, Panel p, int order,
                const char* label, double eps_guides, int samples) {
  const int n = std::max(16, samples);
  std::vector<double> xs(n + 1), ys(n + 1);
  p.ymin = 1e300;
  p.ymax = -1e300;
  for (int i = 0; i <= n; ++i) {
    xs[i] = p.lo + (p.hi - p.lo) * i / n;
    ys[i] = obj.axis_eval(xs[i], order);
    p.ymin = std::min(p.ymin, ys[i]);
    p.ymax = std::max(p.ymax, ys[i]);
  }
  if (eps_guides > 0) {
    p.ymin = std::min(p.ymin, -1.2 * eps_guides);
    p.ymax = std::max(p.ymax, 1.2 * eps_guides);
  }
  double pad = 0.05 * (p.ymax - p.ymin);
  if (pad == 0) pad = 1.0;
  p.ymin -= pad;
  p.ymax += pad;

  auto px = [&](double x) { return p.x0 + (x - p.lo) / (p.hi - p.lo) * p.w; };
  auto py = [&](double y) { return p.y0 + p.h - (y - p.ymin) / (p.ymax - p.ymin) * p.h; };

  svg << "<rect x=\"" << fmt(p.x0) << "\" y=\"" << fmt(p.y0) << "\" width=\"" << fmt(p.w)
      << "\" height=\"" << fmt(p.h) << "\" fill=\"none\" stroke=\"#888\" stroke-width=\"1\"/>\n";
  svg << "<text x=\"" << fmt(p.x0 + 4) << "\" y=\"" << fmt(p.y0 + 14)
      << "\" font-family=\"monospace\" font-size=\"11\">" << label << "</text>\n";

  if (p.ymin < 0 && p.ymax > 0) {
    svg << "<line x1=\"" << fmt(p.x0) << "\" y1=\"" << fmt(py(0)) << "\" x2=\"" << fmt(p.x0 + p.w)
        << "\" y2=\"" << fmt(py(0)) << "\" stroke=\"#ccc\" stroke-width=\"0.5\"/>\n";
  }
  if (eps_guides > 0) {
    for (double v : {eps_guides, -eps_guides}) {
      svg << "<line x1=\"" << fmt(p.x0) << "\" y1=\"" << fmt(py(v)) << "\" x2=\""
          << fmt(p.x0 + p.w) << "\" y2=\"" << fmt(py(v))
          << "\" stroke=\"#444\" stroke-width=\"0.8\" stroke-dasharray=\"2,3\"/>\n";
    }
  }

  svg << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.2\" points=\"";
  for (int i = 0; i <= n; ++i) {
    if (i) svg << ' ';
    svg << fmt(px(xs[i])) << ',' << fmt(py(ys[i]));
  }
  svg << "\"/>\n";
}

}  // namespace

std::string render_objective_figure(const PiecewiseObjective& obj, const PlotOptions& opts) {
  obj.validate();
  // first/last interior knots bound the iterate range; knots[0] is prolongation
  const size_t nk = obj.knots.size();
  const double x_first = obj.knots[1].x;
  const double x_last = obj.knots[nk - 2].x;
  double lo = opts.x_lo, hi = opts.x_hi;
  if (!(hi > lo)) {
    lo = x_first;
    hi = x_last;
  }
  const size_t zoom_idx =
      std::min(nk - 2, static_cast<size_t>(1 + std::max(1, opts.zoom_knots)));
  const double zoom_hi = obj.knots[zoom_idx].x;
  // eps of the construction: g_0 = -2 eps f_0 with f_0 = 1
  const double eps = 0.5 * std::abs(obj.knots[1].g);

  const double W = 960, H = 640, mx = 30, my = 30;
  const double pw = (W - 4 * mx) / 3, ph = (H - 3 * my) / 2;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << W << ' ' << H << "\">\n";
  svg << "<rect width=\"" << W << "\" height=\"" << H << "\" fill=\"white\"/>\n";
  const char* labels[3] = {"f", "f'", "f''"};
  for (int row = 0; row < 2; ++row) {
    for (int col = 0; col < 3; ++col) {
      Panel p;
      p.x0 = mx + col * (pw + mx);
      p.y0 = my + row * (ph + my);
      p.w = pw;
      p.h = ph;
      p.lo = row == 0 ? lo : std::max(lo, x_first);
      p.hi = row == 0 ? hi : zoom_hi;
      const double guides = (row == 0 && col == 1) ? eps : 0.0;
      draw_panel(svg, obj, p, col, labels[col], guides, opts.samples);
    }
  }
  svg << "</svg>\n";
  return svg.str();
}

void plot_objective(const PiecewiseObjective& obj, const std::string& path,
                    const PlotOptions& opts) {
  atomic_write(path, render_objective_figure(obj, opts));
}

}  // namespace wcomp
