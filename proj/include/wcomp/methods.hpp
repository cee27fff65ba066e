#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wcomp/hermite.hpp"
#include "wcomp/subproblems.hpp"

namespace wcomp {

enum class Method { newton, reg2alpha, gqt, trust_region, sd_goldstein, royer_wright };

Method method_from_name(const std::string& name);
std::string method_name(Method m);

struct MethodConfig {
  Method method = Method::newton;
  double eps = 1e-3;   // gradient tolerance
  long budget = 200000;

  // (2+alpha)-regularization
  double alpha = 1.0;
  double sigma0 = 1.0;
  double sigma_min = 1e-8;
  double eta1 = 0.01;
  double gamma_inc = 2.0;
  double gamma_dec = 2.0;
  std::vector<double> sigma_schedule;  // when nonempty, pins sigma_k per iteration

  // GQT
  double omega0 = 1.0;
  double omega_min = 1e-8;
  double gamma1 = 2.0;  // omega growth on rejection (> 1)

  // trust region
  double delta0 = 1.0;
  double delta_max = 1e6;
  double tr_eta = 0.1;
  double tr_grow = 2.0;    // radius growth on boundary successes
  double tr_shrink = 0.5;  // radius shrink on rejections, in (0,1)

  // Goldstein linesearch
  double mu1 = 0.75;
  double mu2 = 0.25;

  // Royer-Wright
  double eps_H = 0.0;           // 0 -> default sqrt(eps)
  double rw_eta = 1.0;          // cubic decrease constant in (0,3]
  double backtrack = 0.5;       // steplength reduction factor
  bool relax_eps_h = false;     // lift the eps_H <= sqrt(eps) requirement

  double kappa_rg = 0.0;  // admissible inexactness (solves here are exact)

  void validate() const;
  double rw_eps_h() const;
};

struct IterateRecord {
  long k = 0;
  Vec x;
  double f = 0;
  Vec g;
  SymMat H;
  double lambda = 0;   // multiplier of M_k = lambda I as claimed by the method
  double control = 0;  // sigma / delta / omega / mu / linesearch alpha
  Vec step;
  Vec residual;        // r_k the method claims for (H + M) s = -g + r
  double model_decrease = 0;
  double actual_decrease = 0;
  double rho = 0;
  bool success = false;
  bool neg_curvature = false;  // Royer-Wright eigen-direction iterations
};

enum class StopReason { gradient_tolerance, budget, failure };

struct IterateTrace {
  std::vector<IterateRecord> records;  // one per attempted iteration
  long termination_index = 0;          // iterations performed before the tolerance fired
  StopReason reason = StopReason::budget;
  long evaluations = 0;        // one per iteration, the paper's accounting
  long objective_calls = 0;    // raw f evaluations including linesearch trials
  Vec final_x;
  double final_f = 0;
  double final_gnorm = 0;
};

const char* stop_reason_name(StopReason r);

/// Drive the configured method on the objective from x0 until the gradient
/// tolerance, the budget, or an unrecoverable linesearch failure.
IterateTrace run(const MethodConfig& cfg, const PiecewiseObjective& obj, const Vec& x0);

/// Newton step -H^{-1} g; requires positive definite H.
Vec newton_step(const Vec& g, const SymMat& H);

/// GQT multiplier for the current state: 0 if lambda_min(H) is already
/// >= omega ||g||^{alpha/(1+alpha)}, the centered shift otherwise.
double gqt_multiplier(const Vec& g, const SymMat& H, double omega, double alpha);

/// Method trace CSV: k, x (one or two columns), f, gnorm, lambda,
/// sigma_or_delta_or_omega, step_norm, rho, success.
std::string iterate_trace_to_csv(const IterateTrace& t, int dim);
IterateTrace iterate_trace_from_csv(const std::string& text, int* dim_out = nullptr);

}  // namespace wcomp
