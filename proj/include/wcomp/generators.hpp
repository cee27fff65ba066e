#pragma once

#include <functional>
#include <string>
#include <vector>

#include "wcomp/hermite.hpp"

namespace wcomp {

/// Per-iterate state handed to the multiplier/step rules.
struct KnotState {
  long k = 0;
  double f = 0, g = 0, H = 0;
};

/// lambda_rule(state) -> lambda_k; theta_rule(state, lambda_k) -> theta_k.
/// Both must be deterministic.
using LambdaRule = std::function<double(const KnotState&)>;
using ThetaRule = std::function<double(const KnotState&, double lambda)>;

struct MAlphaConfig {
  double eps = 0.1;           // target gradient accuracy, in (0,1)
  double alpha = 1.0;         // Hessian Hoelder exponent, in [0,1]
  double kappa_rg = 0.0;      // relative residual allowance, in [0,1)
  double kappa_lambda = 2.0;  // multiplier bound constant, > 1
  LambdaRule lambda_rule;     // default: 0
  ThetaRule theta_rule;       // default: exact solve, theta = H/(H+lambda)

  void validate() const;
};

LambdaRule zero_lambda_rule();
/// lambda_k = |g_k|^{alpha/(1+alpha)} / 10, the rule used for the figures.
LambdaRule figure_lambda_rule(double alpha);
/// lambda_k = sigma * t^alpha with (H + sigma t^alpha) t = |g|: the multiplier
/// a (2+alpha)-regularization step with constant weight sigma would produce.
LambdaRule reg_consistent_lambda_rule(double sigma, double alpha);
ThetaRule exact_solve_theta_rule();
ThetaRule constant_theta_rule(double theta);

struct TraceRow {
  long k = 0;
  double x = 0, f = 0, g = 0, H = 0;
  double lambda = 0;  // multiplier of the step leaving this iterate
  double theta = 0;   // step parameter (theta; nu for the 2-D y part; mu for sd)
  double s = 0;       // step length; 0 on the terminal row
};

struct GroundTruthTrace {
  std::vector<TraceRow> rows;  // k = 0 .. k_target
  long k_target = 0;
};

struct Generated {
  PiecewiseObjective objective;
  GroundTruthTrace trace;
};

struct Generated2D {
  PiecewiseObjective objective;  // dim 2; x part with partner = y part
  GroundTruthTrace x_part;
  GroundTruthTrace y_part;
};

/// Predicted termination index ceil(eps^{-(2+alpha)/(1+alpha)}).
long predict_iterations(double eps, double alpha);

/// Slow objective for the general second-order class; the trace is the exact
/// iterate sequence any admissible method of the class follows on it.
Generated gen_malpha(const MAlphaConfig& cfg);

/// Separable 2-D objective on which Newton needs ceil(eps^-2) iterations
/// despite a Lipschitz continuous Hessian along the iterate path.
using NuRule = std::function<double(const KnotState&)>;
Generated2D gen_newton2d(double eps, NuRule nu_rule = {}, double kappa_rg = 0.0);

/// Steepest-descent example with a Goldstein linesearch (flat Hessian knots).
Generated gen_sd(double eps);

struct CrsConfig {
  double eps = 0.1;
  double sigma_bar = 1.0;
  double kappa_rg = 0.0;
  double eta = 0.5;  // acceptance threshold; needs 2 eta (1+kappa_rg)^3 <= 1

  void validate() const;
};

/// Slow objective for the accurate Curtis-Robinson-Samadi subclass.
Generated gen_crs(const CrsConfig& cfg);

/// Ground-truth trace CSV: k, x, f, g, H, lambda, theta, s.
std::string trace_to_csv(const GroundTruthTrace& t);
GroundTruthTrace trace_from_csv(const std::string& text);

}  // namespace wcomp
