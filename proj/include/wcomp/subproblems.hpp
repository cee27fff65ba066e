#pragma once

#include "wcomp/common.hpp"

namespace wcomp {

struct SubproblemResult {
  Vec step;
  double multiplier = 0;  // sigma*||s||^alpha for regularization, TRS lambda
  bool hard_case = false;
};

/// Global minimizer of g's + 1/2 s'Hs + sigma/(2+alpha) ||s||^{2+alpha}.
/// Stationarity (H + sigma||s||^alpha I)s = -g with the shifted matrix
/// positive semidefinite. alpha = 0 with an indefinite H + sigma I has no
/// admissible multiplier and raises HardCase.
SubproblemResult solve_reg_subproblem(const Vec& g, const SymMat& H, double sigma, double alpha);

/// Global minimizer of g's + 1/2 s'Hs on ||s|| <= delta (More-Sorensen at
/// 2x2 scale): (H + lambda I)s = -g, lambda >= max(0, -lambda_min(H)),
/// lambda (delta - ||s||) = 0, including the eigenvector hard case.
SubproblemResult solve_trs(const Vec& g, const SymMat& H, double delta);

/// Scalar root of (H + sigma t^alpha) t = b, b >= 0, on t >= max-of-admissible;
/// shared by the 1-D subproblem and the generator's sigma-consistent rule.
double reg_scalar_root(double b, double H, double sigma, double alpha);

}  // namespace wcomp
