#include "wcomp/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

namespace wcomp {

namespace {

constexpr double kSlack = 1e-12;

void note(ConditionReport& rep, bool ok, long k) {
  rep.per_iteration.push_back(ok);
  if (!ok && rep.pass) {
    rep.pass = false;
    rep.first_violation = k;
  }
}

void fold(MembershipReport& rep, const ConditionReport& c) {
  if (!c.pass && (rep.first_violation < 0 || c.first_violation < rep.first_violation))
    rep.first_violation = c.first_violation;
}

double derived_kappa_lambda(const IterateTrace& trace, double alpha, double kappa_rg) {
  // Lemma-style constant from the measured sup of lambda_k / ||s_k||^alpha.
  double kappa_bar = 1.0 + 1e-9;
  for (const IterateRecord& r : trace.records) {
    const double sn = norm(r.step);
    if (sn > 0.0 && r.lambda > 0.0)
      kappa_bar = std::max(kappa_bar, r.lambda / std::pow(sn, alpha));
  }
  return 2.0 * std::pow(kappa_bar, 1.0 / (1.0 + alpha)) * (1.0 + kappa_rg);
}

}  // namespace

MembershipReport check_malpha_membership(const IterateTrace& trace, double alpha,
                                         const MembershipKappas& kappas) {
  MembershipReport rep;
  rep.kappa_lambda_used = kappas.kappa_lambda
                              ? *kappas.kappa_lambda
                              : derived_kappa_lambda(trace, alpha, kappas.kappa_rg);
  for (const IterateRecord& r : trace.records) {
    if (std::isnan(r.lambda)) throw IncompleteTrace("trace record without multiplier");
    const double gnorm = norm(r.g);
    const double snorm = norm(r.step);
    const double rnorm = norm(r.residual);
    const double lmin = eig_min(r.H);
    const double slack = kSlack * (1.0 + gnorm);

    const double res_cap =
        std::min(kappas.kappa_rg * gnorm, kappas.kappa_rs * std::abs(r.lambda) * snorm);
    note(rep.residual, rnorm <= res_cap + slack, r.k);
    note(rep.psd, r.lambda >= -kSlack && lmin + r.lambda >= -kSlack * (1.0 + std::abs(lmin)), r.k);
    const double mult_cap =
        rep.kappa_lambda_used * std::max(std::abs(lmin), std::pow(gnorm, alpha / (1.0 + alpha)));
    note(rep.multiplier, lmin + r.lambda <= mult_cap * (1.0 + kSlack) + kSlack, r.k);
    note(rep.step_bound, snorm <= kappas.kappa_s * (1.0 + kSlack), r.k);
  }
  rep.pass = rep.residual.pass && rep.psd.pass && rep.multiplier.pass && rep.step_bound.pass;
  for (const ConditionReport* c : {&rep.residual, &rep.psd, &rep.multiplier, &rep.step_bound})
    fold(rep, *c);
  return rep;
}

MembershipReport check_crs_membership(const IterateTrace& trace, const CrsParams& p) {
  MembershipReport rep;
  const double c = 1.0 + p.kappa_rg;
  rep.config_ok = 2.0 * p.eta * c * c * c <= 1.0 + kSlack;
  for (const IterateRecord& r : trace.records) {
    if (std::isnan(r.lambda)) throw IncompleteTrace("trace record without multiplier");
    const double gnorm = norm(r.g);
    const double snorm = norm(r.step);
    const double rnorm = norm(r.residual);
    const double slack = kSlack * (1.0 + gnorm);

    // multiplier window with the thresholds at their reset values (every
    // iteration of the slow example is successful)
    note(rep.multiplier, r.lambda >= -kSlack && r.lambda <= p.sigma_bar * snorm + slack, r.k);
    // slope condition s'r <= 1/2 s'(H + lambda I)s + 1/2 kappa1 ||s||^3
    const double lhs = dot(r.step, r.residual);
    const double rhs = 0.5 * (dot(r.step, mul(r.H, r.step)) + r.lambda * snorm * snorm) +
                       0.5 * p.kappa1 * snorm * snorm * snorm;
    note(rep.psd, lhs <= rhs + slack, r.k);
    // strengthened residual rule
    const double cap = std::min(p.kappa_rg * gnorm, r.lambda * snorm + p.kappa2 * snorm * snorm);
    note(rep.residual, rnorm <= cap + slack, r.k);
    // acceptance ratio
    const double rho_crs = snorm > 0.0 ? r.actual_decrease / (snorm * snorm * snorm) : 0.0;
    note(rep.step_bound, rho_crs >= p.eta - kSlack, r.k);
  }
  rep.pass = rep.config_ok && rep.multiplier.pass && rep.psd.pass && rep.residual.pass &&
             rep.step_bound.pass;
  for (const ConditionReport* cr : {&rep.residual, &rep.psd, &rep.multiplier, &rep.step_bound})
    fold(rep, *cr);
  return rep;
}

namespace {

struct AxisSmoothness {
  double quotient = 0, sup_h = 0, f_min = 0, f_max = 0, sup_h_analytic = 0;
  std::vector<double> bounds;
};

AxisSmoothness axis_smoothness(const PiecewiseObjective& f, double alpha, const GridSpec& grid) {
  AxisSmoothness out;
  out.f_min = out.f_max = f.left_tail_value;
  const int m = std::max(2, grid.points_per_segment);

  std::vector<std::vector<std::pair<double, double>>> samples;  // (x, H) per segment
  samples.reserve(f.segments.size());
  for (size_t j = 0; j < f.segments.size(); ++j) {
    const double x0 = f.knots[j].x;
    const double L = f.segments[j].length;
    std::vector<std::pair<double, double>> seg;
    seg.reserve(static_cast<size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) {
      const double x = x0 + L * i / m;
      const double val = f.axis_eval(x, 0);
      const double hess = f.axis_eval(x, 2);
      out.f_min = std::min(out.f_min, val);
      out.f_max = std::max(out.f_max, val);
      out.sup_h = std::max(out.sup_h, std::abs(hess));
      seg.emplace_back(x, hess);
    }
    samples.push_back(std::move(seg));
  }

  auto pair_quotient = [&](const std::pair<double, double>& a, const std::pair<double, double>& b) {
    const double dx = std::abs(a.first - b.first);
    if (dx == 0.0) return 0.0;
    return std::abs(a.second - b.second) / std::pow(dx, alpha);
  };
  for (size_t j = 0; j < samples.size(); ++j) {
    const auto& seg = samples[j];
    for (size_t i = 0; i < seg.size(); ++i)
      for (size_t l = i + 1; l < seg.size(); ++l)
        out.quotient = std::max(out.quotient, pair_quotient(seg[i], seg[l]));
    if (j + 1 < samples.size()) {
      const auto& nxt = samples[j + 1];
      for (const auto& a : seg)
        for (const auto& b : nxt) out.quotient = std::max(out.quotient, pair_quotient(a, b));
    }
  }

  for (const QuinticSegment& s : f.segments) {
    const double L = s.length;
    const double third = 6 * std::abs(s.c3) * L * L + 24 * std::abs(s.c4) * L * L * L +
                         60 * std::abs(s.c5) * L * L * L * L;
    out.bounds.push_back(third / std::pow(L, 1.0 + alpha));
    out.sup_h_analytic =
        std::max(out.sup_h_analytic, 2 * std::abs(s.c2) + 6 * std::abs(s.c3) * L +
                                         12 * std::abs(s.c4) * L * L + 20 * std::abs(s.c5) * L * L * L);
  }
  return out;
}

}  // namespace

SmoothnessReport estimate_smoothness(const PiecewiseObjective& obj, double alpha,
                                     const GridSpec& grid) {
  obj.validate();
  AxisSmoothness a = axis_smoothness(obj, alpha, grid);
  SmoothnessReport rep;
  rep.segment_third_deriv_bounds = a.bounds;
  if (obj.dim == 2) {
    const AxisSmoothness b = axis_smoothness(*obj.partner, alpha, grid);
    rep.holder_quotient_sampled = std::max(a.quotient, b.quotient);
    rep.hessian_sup_sampled = std::max(a.sup_h, b.sup_h);
    rep.hessian_sup_analytic = std::max(a.sup_h_analytic, b.sup_h_analytic);
    rep.f_min = a.f_min + b.f_min;
    rep.f_max = a.f_max + b.f_max;
    rep.segment_third_deriv_bounds.insert(rep.segment_third_deriv_bounds.end(), b.bounds.begin(),
                                          b.bounds.end());
  } else {
    rep.holder_quotient_sampled = a.quotient;
    rep.hessian_sup_sampled = a.sup_h;
    rep.hessian_sup_analytic = a.sup_h_analytic;
    rep.f_min = a.f_min;
    rep.f_max = a.f_max;
  }
  rep.holder_bound_analytic = 0;
  for (double b : rep.segment_third_deriv_bounds)
    rep.holder_bound_analytic = std::max(rep.holder_bound_analytic, b);
  return rep;
}

double path_lipschitz_bound(const PiecewiseObjective& obj2d, double kappa_rg) {
  if (obj2d.dim != 2 || !obj2d.partner) throw InvalidInput("needs a separable 2-D objective");
  const PiecewiseObjective& fx = obj2d;
  const PiecewiseObjective& fy = *obj2d.partner;
  const size_t n = std::min(fx.segments.size(), fy.segments.size());
  double bound = 0;
  for (size_t j = 0; j < n; ++j) {
    const QuinticSegment& cx = fx.segments[j];
    const QuinticSegment& cy = fy.segments[j];
    const double sx = cx.length, sy = cy.length;
    const double tx = (6 * std::abs(cx.c3) * sx * sx + 24 * std::abs(cx.c4) * sx * sx * sx +
                       60 * std::abs(cx.c5) * sx * sx * sx * sx) *
                      sx;
    const double ty = 6 * std::abs(cy.c3) * sy * sy * sy + 24 * std::abs(cy.c4) * sy * sy * sy * sy +
                      60 * std::abs(cy.c5) * sy * sy * sy * sy * sy;
    bound = std::max(bound, (tx + ty) / (1.0 - kappa_rg));
  }
  return bound;
}

SlopeFit fit_complexity_slope(const std::vector<std::pair<double, long>>& counts, double alpha) {
  std::vector<double> xs, ys;
  for (const auto& [eps, count] : counts) {
    if (!(eps > 0.0 && eps < 1.0)) throw InvalidInput("eps must be in (0,1)");
    xs.push_back(std::log(1.0 / eps));
    ys.push_back(std::log(static_cast<double>(count)));
  }
  std::vector<double> distinct = xs;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 3) throw InvalidInput("slope fit needs at least 3 distinct eps values");

  const size_t n = xs.size();
  double mx = 0, my = 0;
  for (size_t i = 0; i < n; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  SlopeFit fit;
  fit.slope = sxx > 0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  for (const auto& [eps, count] : counts) {
    const double predicted = static_cast<double>(predict_iterations(eps, alpha));
    fit.max_count_ratio = std::max(fit.max_count_ratio, static_cast<double>(count) / predicted);
  }
  return fit;
}

Family family_from_name(const std::string& name) {
  if (name == "malpha") return Family::malpha;
  if (name == "newton2d") return Family::newton2d;
  if (name == "sd") return Family::sd;
  if (name == "crs") return Family::crs;
  throw InvalidConfig("unknown family: " + name);
}

std::string family_name(Family f) {
  switch (f) {
    case Family::malpha: return "malpha";
    case Family::newton2d: return "newton2d";
    case Family::sd: return "sd";
    case Family::crs: return "crs";
  }
  return "?";
}

IterateTrace ground_truth_to_iterate_trace(const GroundTruthTrace& trace, Family family) {
  IterateTrace out;
  for (size_t i = 0; i + 1 < trace.rows.size(); ++i) {
    const TraceRow& r = trace.rows[i];
    const TraceRow& nxt = trace.rows[i + 1];
    IterateRecord rec;
    rec.k = r.k;
    rec.x = Vec(r.x);
    rec.f = r.f;
    rec.g = Vec(r.g);
    rec.H = SymMat(r.H);
    rec.step = Vec(r.s);
    if (family == Family::sd) {
      rec.lambda = r.theta > 0 ? 1.0 / r.theta : 0.0;  // M = (1/mu) I, H = 0
      rec.residual = Vec(r.g + (r.H + rec.lambda) * r.s);
    } else {
      rec.lambda = r.lambda;
      rec.residual = Vec(r.g + (r.H + r.lambda) * r.s);
    }
    rec.control = r.theta;
    rec.actual_decrease = r.f - nxt.f;
    rec.model_decrease = -(r.g * r.s) - 0.5 * (r.H + rec.lambda) * r.s * r.s;
    rec.rho = rec.model_decrease != 0 ? rec.actual_decrease / rec.model_decrease : 0.0;
    rec.success = true;
    out.records.push_back(rec);
  }
  out.termination_index = trace.k_target;
  out.evaluations = trace.k_target;
  if (!trace.rows.empty()) {
    const TraceRow& last = trace.rows.back();
    out.final_x = Vec(last.x);
    out.final_f = last.f;
    out.final_gnorm = std::abs(last.g);
  }
  out.reason = StopReason::gradient_tolerance;
  return out;
}

std::vector<double> decrease_ratios(const GroundTruthTrace& trace) {
  std::vector<double> ratios;
  for (size_t i = 0; i + 1 < trace.rows.size(); ++i) {
    const TraceRow& r = trace.rows[i];
    const TraceRow& nxt = trace.rows[i + 1];
    const double model_dec = -(r.g * r.s) - 0.5 * (r.H + r.lambda) * r.s * r.s;
    ratios.push_back((r.f - nxt.f) / model_dec);
  }
  return ratios;
}

IterateTrace reconstruct_trace(const PiecewiseObjective& obj, const std::string& csv_text) {
  int dim = 1;
  IterateTrace parsed = iterate_trace_from_csv(csv_text, &dim);
  if (dim != obj.dim) throw InvalidInput("trace dimension does not match objective");
  IterateTrace out;
  const auto& rows = parsed.records;
  for (size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].success) continue;  // rejected trials carry no signed step
    // locate the next accepted iterate to recover the signed step
    size_t j = i + 1;
    IterateRecord rec;
    rec.k = rows[i].k;
    rec.x = rows[i].x;
    rec.f = value_at(obj, rec.x);
    rec.g = gradient_at(obj, rec.x);
    rec.H = hessian_at(obj, rec.x);
    rec.lambda = rows[i].lambda;
    rec.control = rows[i].control;
    if (j < rows.size()) {
      rec.step = rows[j].x - rows[i].x;
    } else {
      rec.step = zero_vec(obj.dim);
      rec.step[0] = norm(rows[i].step);  // last row: only the norm is known
      if (obj.dim == 1 && rec.g[0] > 0) rec.step[0] = -rec.step[0];
    }
    rec.residual = rec.g + mul(rec.H, rec.step) + rec.lambda * rec.step;
    rec.actual_decrease = rec.f - value_at(obj, rec.x + rec.step);
    rec.model_decrease = -(dot(rec.g, rec.step)) -
                         0.5 * (dot(rec.step, mul(rec.H, rec.step)) +
                                rec.lambda * dot(rec.step, rec.step));
    rec.rho = rows[i].rho;
    rec.success = true;
    out.records.push_back(rec);
  }
  out.termination_index = parsed.termination_index;
  out.evaluations = parsed.evaluations;
  return out;
}

LowerBoundCheck verify_lower_bound_run(Family family, Method method, double eps, double alpha,
                                       const VerifyOptions& opts) {
  MethodConfig cfg;
  cfg.method = method;
  cfg.eps = eps;
  cfg.alpha = alpha;
  cfg.kappa_rg = opts.kappa_rg;

  LowerBoundCheck out;
  PiecewiseObjective obj;
  Vec x0;
  switch (family) {
    case Family::malpha: {
      MAlphaConfig gen;
      gen.eps = eps;
      gen.alpha = alpha;
      gen.kappa_rg = opts.kappa_rg;
      if (opts.figure_lambda_preset) gen.lambda_rule = figure_lambda_rule(alpha);
      Generated g = gen_malpha(gen);
      out.expected = g.trace.k_target;
      if (method == Method::reg2alpha && opts.matched_sigma) {
        for (size_t i = 0; i + 1 < g.trace.rows.size(); ++i) {
          const TraceRow& r = g.trace.rows[i];
          const double lam = r.lambda;
          cfg.sigma_schedule.push_back(lam > 0 ? lam / std::pow(std::abs(r.s), alpha)
                                               : cfg.sigma_min);
        }
        cfg.sigma_min = 1e-300;  // schedule governs; keep the floor out of the way
        cfg.gamma_dec = 1.0;
      }
      obj = std::move(g.objective);
      x0 = Vec(0.0);
      break;
    }
    case Family::newton2d: {
      Generated2D g = gen_newton2d(eps, {}, opts.kappa_rg);
      out.expected = g.x_part.k_target;
      obj = std::move(g.objective);
      x0 = Vec(0.0, 0.0);
      // Theorem slowN terminates at gradient norm eps*sqrt(1+eps^2)
      cfg.eps = eps * std::sqrt(1.0 + eps * eps);
      break;
    }
    case Family::sd: {
      Generated g = gen_sd(eps);
      out.expected = g.trace.k_target;
      obj = std::move(g.objective);
      x0 = Vec(0.0);
      break;
    }
    case Family::crs: {
      CrsConfig gen;
      gen.eps = eps;
      gen.kappa_rg = opts.kappa_rg;
      gen.sigma_bar = opts.crs_sigma_bar;
      gen.eta = opts.crs_eta;
      Generated g = gen_crs(gen);
      out.expected = g.trace.k_target;
      obj = std::move(g.objective);
      x0 = Vec(0.0);
      break;
    }
  }
  if (method == Method::royer_wright) {
    cfg.eps_H = opts.rw_eps_h;
    cfg.rw_eta = opts.rw_eta;
  }

  const IterateTrace trace = run(cfg, obj, x0);
  LowerBoundCheck checked = check_exact_termination(trace, out.expected, cfg.eps);
  return checked;
}

LowerBoundCheck check_exact_termination(const IterateTrace& trace, long expected,
                                        double eps_used) {
  LowerBoundCheck out;
  out.expected = expected;
  out.actual = trace.termination_index;
  out.final_gnorm = trace.final_gnorm;
  out.prior_gnorms_above = true;
  for (const IterateRecord& r : trace.records)
    if (!(norm(r.g) > eps_used * (1.0 + kGradTolSlack))) out.prior_gnorms_above = false;
  out.pass = trace.reason == StopReason::gradient_tolerance && out.actual == out.expected &&
             meets_grad_tol(out.final_gnorm, eps_used) && out.prior_gnorms_above;
  if (!out.pass)
    out.detail = "expected " + std::to_string(out.expected) + ", got " +
                 std::to_string(out.actual) + " (" + stop_reason_name(trace.reason) + ")";
  return out;
}

// --- JSON report emission ---------------------------------------------------

using nlohmann::json;

static json condition_to_json(const ConditionReport& c) {
  return json{{"pass", c.pass}, {"first_violation", c.first_violation}};
}

std::string membership_report_to_json(const MembershipReport& r) {
  json j;
  j["pass"] = r.pass;
  j["first_violation"] = r.first_violation;
  j["config_ok"] = r.config_ok;
  j["kappa_lambda_used"] = r.kappa_lambda_used;
  j["residual"] = condition_to_json(r.residual);
  j["psd_or_slope"] = condition_to_json(r.psd);
  j["multiplier"] = condition_to_json(r.multiplier);
  j["step_or_rho"] = condition_to_json(r.step_bound);
  return j.dump(2) + "\n";
}

std::string smoothness_report_to_json(const SmoothnessReport& r) {
  json j;
  j["holder_quotient_sampled"] = r.holder_quotient_sampled;
  j["holder_bound_analytic"] = r.holder_bound_analytic;
  j["hessian_sup_sampled"] = r.hessian_sup_sampled;
  j["hessian_sup_analytic"] = r.hessian_sup_analytic;
  j["f_min"] = r.f_min;
  j["f_max"] = r.f_max;
  j["certificate_dominates"] = r.holder_bound_analytic >= r.holder_quotient_sampled;
  return j.dump(2) + "\n";
}

std::string lower_bound_check_to_json(const LowerBoundCheck& r) {
  json j;
  j["pass"] = r.pass;
  j["expected"] = r.expected;
  j["actual"] = r.actual;
  j["final_gnorm"] = r.final_gnorm;
  j["prior_gnorms_above"] = r.prior_gnorms_above;
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j.dump(2) + "\n";
}

}  // namespace wcomp
