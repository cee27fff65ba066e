#include "wcomp/generators.hpp"

#include <cmath>
#include <sstream>

#include "wcomp/subproblems.hpp"

namespace wcomp {

void MAlphaConfig::validate() const {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidConfig("eps must be in (0,1)");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidConfig("alpha must be in [0,1]");
  if (!(kappa_rg >= 0.0 && kappa_rg < 1.0)) throw InvalidConfig("kappa_rg must be in [0,1)");
  if (!(kappa_lambda > 1.0)) throw InvalidConfig("kappa_lambda must exceed 1");
}

LambdaRule zero_lambda_rule() {
  return [](const KnotState&) { return 0.0; };
}

LambdaRule figure_lambda_rule(double alpha) {
  const double p = alpha / (1.0 + alpha);
  return [p](const KnotState& st) { return 0.1 * std::pow(std::abs(st.g), p); };
}

LambdaRule reg_consistent_lambda_rule(double sigma, double alpha) {
  return [sigma, alpha](const KnotState& st) {
    const double t = reg_scalar_root(std::abs(st.g), st.H, sigma, alpha);
    return sigma * std::pow(t, alpha);
  };
}

ThetaRule exact_solve_theta_rule() {
  return [](const KnotState& st, double lambda) { return st.H / (st.H + lambda); };
}

ThetaRule constant_theta_rule(double theta) {
  return [theta](const KnotState&, double) { return theta; };
}

long predict_iterations(double eps, double alpha) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidConfig("eps must be in (0,1)");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidConfig("alpha must be in [0,1]");
  return ceil_snapped(std::pow(eps, -(2.0 + alpha) / (1.0 + alpha)));
}

namespace {

std::vector<Knot> rows_to_knots(const std::vector<TraceRow>& rows) {
  std::vector<Knot> ks;
  ks.reserve(rows.size());
  for (const TraceRow& r : rows) ks.push_back({r.x, r.f, r.g, r.H});
  return ks;
}

void check_termination_ladder(const std::vector<TraceRow>& rows, double eps) {
  const TraceRow& last = rows.back();
  if (!meets_grad_tol(std::abs(last.g), eps))
    throw GeneratorInconsistency("terminal gradient above eps");
  for (size_t i = 0; i + 1 < rows.size(); ++i)
    if (std::abs(rows[i].g) <= eps * (1.0 + kGradTolSlack))
      throw GeneratorInconsistency("pre-terminal gradient already below eps");
}

}  // namespace

Generated gen_malpha(const MAlphaConfig& cfg_in) {
  MAlphaConfig cfg = cfg_in;
  cfg.validate();
  if (!cfg.lambda_rule) cfg.lambda_rule = zero_lambda_rule();
  if (!cfg.theta_rule) cfg.theta_rule = exact_solve_theta_rule();

  const long K = predict_iterations(cfg.eps, cfg.alpha);
  const double drop = std::pow(cfg.eps, (2.0 + cfg.alpha) / (1.0 + cfg.alpha));
  const double step_scale = std::pow(cfg.eps, 1.0 / (1.0 + cfg.alpha));
  const double hess_scale = std::pow(cfg.eps, cfg.alpha / (1.0 + cfg.alpha));

  const double theta_lo = (1.0 - cfg.kappa_rg) / cfg.kappa_lambda;
  const double theta_hi = 1.0 + cfg.kappa_rg;

  GroundTruthTrace trace;
  trace.k_target = K;
  double x = 0.0;
  for (long k = 0; k <= K; ++k) {
    TraceRow row;
    row.k = k;
    row.x = x;
    row.f = 1.0 - 0.5 * static_cast<double>(k) * drop;
    row.g = -2.0 * cfg.eps * row.f;
    row.H = 4.0 * hess_scale * row.f * row.f;
    if (k < K) {
      const KnotState st{k, row.f, row.g, row.H};
      row.lambda = cfg.lambda_rule(st);
      const double lambda_cap = 4.0 * (cfg.kappa_lambda - 1.0) * hess_scale * row.f * row.f;
      if (!(row.lambda >= 0.0) || row.lambda > lambda_cap * (1.0 + 1e-12))
        throw GeneratorInconsistency("lambda rule left its admissible interval at k=" +
                                     std::to_string(k));
      row.theta = cfg.theta_rule(st, row.lambda);
      if (!(row.theta >= theta_lo * (1.0 - 1e-12)) || !(row.theta <= theta_hi * (1.0 + 1e-12)))
        throw GeneratorInconsistency("theta rule left its admissible interval at k=" +
                                     std::to_string(k));
      row.s = row.theta * step_scale / (2.0 * row.f);
      x += row.s;
    }
    trace.rows.push_back(row);
  }
  check_termination_ladder(trace.rows, cfg.eps);

  Generated out{build_objective(rows_to_knots(trace.rows)), std::move(trace)};
  return out;
}

Generated2D gen_newton2d(double eps, NuRule nu_rule, double kappa_rg) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidConfig("eps must be in (0,1)");
  if (!(kappa_rg >= 0.0 && kappa_rg < 1.0)) throw InvalidConfig("kappa_rg must be in [0,1)");
  if (!nu_rule) nu_rule = [](const KnotState&) { return 1.0; };

  MAlphaConfig xcfg;
  xcfg.eps = eps;
  xcfg.alpha = 0.0;
  xcfg.kappa_rg = kappa_rg;
  Generated xpart = gen_malpha(xcfg);
  const long K = xpart.trace.k_target;

  GroundTruthTrace ytrace;
  ytrace.k_target = K;
  double y = 0.0;
  for (long k = 0; k <= K; ++k) {
    TraceRow row;
    row.k = k;
    row.x = y;
    row.f = 1.0 - 0.5 * static_cast<double>(k) * eps * eps;
    row.g = -2.0 * eps * eps * row.f;
    row.H = 2.0 * std::abs(row.g) * row.f;
    if (k < K) {
      const KnotState st{k, row.f, row.g, row.H};
      const double nu = nu_rule(st);
      if (!(nu >= (1.0 - kappa_rg) * (1.0 - 1e-12)) || !(nu <= (1.0 + kappa_rg) * (1.0 + 1e-12)))
        throw GeneratorInconsistency("nu rule left [1-kappa_rg, 1+kappa_rg] at k=" +
                                     std::to_string(k));
      row.theta = nu;
      row.s = nu / (2.0 * row.f);
      y += row.s;
    }
    ytrace.rows.push_back(row);
  }

  PiecewiseObjective ypart_obj = build_objective(rows_to_knots(ytrace.rows));

  Generated2D out;
  out.objective = std::move(xpart.objective);
  out.objective.dim = 2;
  out.objective.partner = std::make_shared<PiecewiseObjective>(std::move(ypart_obj));
  out.x_part = std::move(xpart.trace);
  out.y_part = std::move(ytrace);
  return out;
}

Generated gen_sd(double eps) {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidConfig("eps must be in (0,1)");
  const long K = ceil_snapped(std::pow(eps, -2.0));

  GroundTruthTrace trace;
  trace.k_target = K;
  double x = 0.0;
  for (long k = 0; k <= K; ++k) {
    TraceRow row;
    row.k = k;
    row.x = x;
    row.f = 1.0 - 0.5 * static_cast<double>(k) * eps * eps;
    row.g = -2.0 * eps * row.f;
    row.H = 0.0;
    if (k < K) {
      const double mu = 1.0 / (4.0 * row.f * row.f);
      row.theta = mu;  // Goldstein stepsize of the construction
      row.s = mu * std::abs(row.g);
      x += row.s;
    }
    trace.rows.push_back(row);
  }
  check_termination_ladder(trace.rows, eps);

  return {build_objective(rows_to_knots(trace.rows)), std::move(trace)};
}

void CrsConfig::validate() const {
  if (!(eps > 0.0 && eps < 1.0)) throw InvalidConfig("eps must be in (0,1)");
  if (!(sigma_bar > 0.0)) throw InvalidConfig("sigma_bar must be positive");
  if (!(kappa_rg >= 0.0 && kappa_rg < 1.0)) throw InvalidConfig("kappa_rg must be in [0,1)");
  const double c = 1.0 + kappa_rg;
  if (!(eta > 0.0) || 2.0 * eta * c * c * c > 1.0)
    throw InvalidConfig("eta violates 2*eta*(1+kappa_rg)^3 <= 1");
}

Generated gen_crs(const CrsConfig& cfg) {
  cfg.validate();
  MAlphaConfig base;
  base.eps = cfg.eps;
  base.alpha = 1.0;
  base.kappa_rg = cfg.kappa_rg;
  // theta interval of the CRS construction, kappa_lambda = 1 + sigma_bar (1 + kappa_rg)
  base.kappa_lambda = 1.0 + cfg.sigma_bar * (1.0 + cfg.kappa_rg);
  Generated out = gen_malpha(base);
  // acceptance ratio rho = 4 f^3 / theta^3 must clear eta on every iteration
  for (size_t i = 0; i + 1 < out.trace.rows.size(); ++i) {
    const TraceRow& r = out.trace.rows[i];
    const double rho = 4.0 * r.f * r.f * r.f / (r.theta * r.theta * r.theta);
    if (rho < cfg.eta)
      throw GeneratorInconsistency("CRS acceptance ratio fell below eta at k=" +
                                   std::to_string(r.k));
  }
  return out;
}

std::string trace_to_csv(const GroundTruthTrace& t) {
  std::ostringstream out;
  out << "k,x,f,g,H,lambda,theta,s\n";
  for (const TraceRow& r : t.rows) {
    out << r.k << ',' << format_double(r.x) << ',' << format_double(r.f) << ','
        << format_double(r.g) << ',' << format_double(r.H) << ',' << format_double(r.lambda)
        << ',' << format_double(r.theta) << ',' << format_double(r.s) << '\n';
  }
  return out.str();
}

GroundTruthTrace trace_from_csv(const std::string& text) {
  GroundTruthTrace t;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("k,x,f,g,H", 0) != 0)
    throw InvalidInput("not a ground-truth trace CSV");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    TraceRow r;
    std::istringstream ls(line);
    std::string cell;
    auto next = [&]() {
      if (!std::getline(ls, cell, ',')) throw InvalidInput("short trace row");
      return cell;
    };
    r.k = std::stol(next());
    r.x = std::stod(next());
    r.f = std::stod(next());
    r.g = std::stod(next());
    r.H = std::stod(next());
    r.lambda = std::stod(next());
    r.theta = std::stod(next());
    r.s = std::stod(next());
    t.rows.push_back(r);
  }
  if (t.rows.empty()) throw InvalidInput("empty trace CSV");
  t.k_target = t.rows.back().k;
  return t;
}

}  // namespace wcomp
