#pragma once

#include <memory>
#include <string>
#include <vector>

#include "wcomp/common.hpp"

namespace wcomp {

/// Prescribed (value, gradient, Hessian) triple at an abscissa.
struct Knot {
  double x = 0, f = 0, g = 0, H = 0;
};

/// End data for one side of a Hermite segment (a Knot without its abscissa).
struct EndData {
  double f = 0, g = 0, H = 0;
};

/// Quintic p(s) = c0 + c1 s + ... + c5 s^5 on [0, length]; the objective on
/// the segment is p(x - x_left) + base_offset with base_offset = f_right.
struct QuinticSegment {
  double c0 = 0, c1 = 0, c2 = 0, c3 = 0, c4 = 0, c5 = 0;
  double length = 0;
  double base_offset = 0;

  double eval(double s, int order) const;
};

/// Interpolant matching value/gradient/Hessian at both ends:
///   p(0) = f_l - f_r, p(length) = 0,
///   p'(0) = g_l,      p'(length) = g_r,
///   p''(0) = H_l,     p''(length) = H_r.
QuinticSegment solve_hermite(const EndData& left, const EndData& right, double length);

class PiecewiseObjective {
 public:
  std::vector<Knot> knots;               // strictly increasing x, size >= 2
  std::vector<QuinticSegment> segments;  // one per consecutive knot pair
  double left_tail_value = 0;            // constant for x <= knots.front().x
  double right_tail_value = 0;           // constant for x >= knots.back().x
  int dim = 1;
  std::shared_ptr<const PiecewiseObjective> partner;  // y part when dim == 2

  // Derivative of this coordinate's 1-D piece; order in 0..3. The third
  // derivative is piecewise and returns the right-limit at a knot.
  double axis_eval(double x, int order) const;

  void validate() const;  // structural invariants; throws InvalidInput
};

/// Prepend/append the flat prolongation segments of length one
/// (end data f = nearest interior value, g = H = 0) and set the tails.
PiecewiseObjective build_objective(const std::vector<Knot>& interior_knots);

double value_at(const PiecewiseObjective& f, const Vec& p);
Vec gradient_at(const PiecewiseObjective& f, const Vec& p);
SymMat hessian_at(const PiecewiseObjective& f, const Vec& p);
/// Per-coordinate third-derivative components of the separable sum.
Vec third_derivative_at(const PiecewiseObjective& f, const Vec& p);

/// Spec'd entry point: order 0 returns the value in component 0; orders 1..3
/// return the per-coordinate derivative components.
Vec eval(const PiecewiseObjective& f, const Vec& p, int order);

struct ContinuityReport {
  double max_value_gap = 0, max_grad_gap = 0, max_hess_gap = 0;  // relative
  int worst_knot = -1;  // knot index of the largest relative mismatch
  bool pass = false;
};

/// Left/right limits of value, first and second derivative compared at every
/// knot (tails included); relative gaps measured against max(1, |limit|).
ContinuityReport check_knot_continuity(const PiecewiseObjective& f, double tol);

/// Triangle-inequality bound on sup |f''| over the knot range,
/// max_k [ 2|c2| + 6|c3| L + 12|c4| L^2 + 20|c5| L^3 ].
double second_derivative_bound(const PiecewiseObjective& f);

// --- serialization ---------------------------------------------------------

/// Canonical JSON document with hex-float doubles; round-trips bit-exactly.
std::string objective_to_json(const PiecewiseObjective& f);
PiecewiseObjective objective_from_json(const std::string& text);

void save_objective(const std::string& path, const PiecewiseObjective& f);
PiecewiseObjective load_objective(const std::string& path);

/// temp + rename so partially written files are never observed
void atomic_write(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

}  // namespace wcomp
