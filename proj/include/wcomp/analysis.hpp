#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "wcomp/generators.hpp"
#include "wcomp/methods.hpp"

namespace wcomp {

struct ConditionReport {
  std::vector<bool> per_iteration;
  long first_violation = -1;  // -1 when clean
  bool pass = true;
};

struct MembershipKappas {
  double kappa_rg = 0.0;
  double kappa_rs = 1.0;
  std::optional<double> kappa_lambda;  // default: derived from the measured
                                       // sup of lambda_k/||s_k||^alpha
  double kappa_s = 1.0;                // family-specific; 1 on the slow examples
};

struct MembershipReport {
  ConditionReport residual;    // both parts of the perturbed-Newton system bound
  ConditionReport psd;         // M >= 0 and H + M >= 0
  ConditionReport multiplier;  // lambda_min(H) + lambda <= kappa_lambda * max(...)
  ConditionReport step_bound;  // ||s|| <= kappa_s
  double kappa_lambda_used = 0;
  bool config_ok = true;  // CRS only: 2 eta (1+kappa_rg)^3 <= 1
  bool pass = false;
  long first_violation = -1;
};

/// Literal per-iteration evaluation of the second-order class conditions on a
/// recorded trace (M_k = lambda_k I). Rows whose multiplier is NaN raise
/// IncompleteTrace.
MembershipReport check_malpha_membership(const IterateTrace& trace, double alpha,
                                         const MembershipKappas& kappas);

struct CrsParams {
  double sigma_bar = 1.0;
  double kappa1 = 1.0;
  double kappa2 = 1.0;
  double kappa_rg = 0.0;
  double eta = 0.5;
};

/// CRS_a conditions: multiplier within [0, sigma_bar ||s||], slope condition,
/// strengthened residual rule, per-iteration acceptance ratio, eta condition.
MembershipReport check_crs_membership(const IterateTrace& trace, const CrsParams& params);

struct GridSpec {
  int points_per_segment = 64;
};

struct SmoothnessReport {
  double holder_quotient_sampled = 0;  // sup |H(x)-H(y)| / |x-y|^alpha
  double holder_bound_analytic = 0;    // max_k of the per-segment bound below
  std::vector<double> segment_third_deriv_bounds;  // (6|c3|s^2+24|c4|s^3+60|c5|s^4)/s^{1+alpha}
  double hessian_sup_sampled = 0;
  double hessian_sup_analytic = 0;
  double f_min = 0, f_max = 0;  // observed range over the grid
};

/// Sampled Hoelder quotients (within-segment and adjacent-segment pairs) plus
/// the analytic per-segment certificates. 2-D separable objectives are
/// measured per part and merged (range adds, bounds take the max).
SmoothnessReport estimate_smoothness(const PiecewiseObjective& obj, double alpha,
                                     const GridSpec& grid = {});

/// Directional third-derivative bound along the iterate path of the 2-D
/// Newton example; finite and epsilon-stable by construction.
double path_lipschitz_bound(const PiecewiseObjective& obj2d, double kappa_rg = 0.0);

struct SlopeFit {
  double slope = 0;
  double intercept = 0;
  double max_count_ratio = 0;  // max over cells of count / ceil(eps^{-(2+a)/(1+a)})
};

/// Least-squares fit of log(count) against log(1/eps); needs >= 3 distinct eps.
SlopeFit fit_complexity_slope(const std::vector<std::pair<double, long>>& counts, double alpha);

enum class Family { malpha, newton2d, sd, crs };
Family family_from_name(const std::string& name);
std::string family_name(Family f);

struct VerifyOptions {
  bool figure_lambda_preset = false;  // malpha: lambda_k = |g_k|^{a/(1+a)}/10
  bool matched_sigma = false;         // reg2alpha: pin sigma_k to the trace
  double kappa_rg = 0.0;
  double crs_sigma_bar = 1.0;
  double crs_eta = 0.5;
  double rw_eps_h = 0.0;  // 0 -> method default
  double rw_eta = 1.0;
};

struct LowerBoundCheck {
  bool pass = false;
  long expected = 0;
  long actual = 0;
  double final_gnorm = 0;
  bool prior_gnorms_above = false;
  std::string detail;
};

/// Exact-count comparison of a finished run against the predicted index, with
/// the terminal gradient at tolerance and all earlier ones above it.
LowerBoundCheck check_exact_termination(const IterateTrace& trace, long expected, double eps_used);

/// Build the family's slow objective, run the method on it, and require the
/// exact predicted termination index (no tolerance on the integer) with the
/// terminal gradient at tolerance and all earlier ones above it.
LowerBoundCheck verify_lower_bound_run(Family family, Method method, double eps, double alpha,
                                       const VerifyOptions& opts = {});

/// Ratio (f_k - f_{k+1}) / (f_k - m_k(s_k)) with the full model Hessian
/// (beta = 1); defined for every row of a ground-truth trace but the last.
std::vector<double> decrease_ratios(const GroundTruthTrace& trace);

/// Adapt a generator trace to the record format the checkers consume.
IterateTrace ground_truth_to_iterate_trace(const GroundTruthTrace& trace, Family family);

/// Reconstruct checker-ready records from an objective plus a method trace
/// CSV (gradients and Hessians re-evaluated at the recorded iterates).
IterateTrace reconstruct_trace(const PiecewiseObjective& obj, const std::string& csv_text);

std::string membership_report_to_json(const MembershipReport& r);
std::string smoothness_report_to_json(const SmoothnessReport& r);
std::string lower_bound_check_to_json(const LowerBoundCheck& r);

}  // namespace wcomp
