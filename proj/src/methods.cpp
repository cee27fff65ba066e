#include "wcomp/methods.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wcomp {

Method method_from_name(const std::string& name) {
  if (name == "newton") return Method::newton;
  if (name == "reg2alpha") return Method::reg2alpha;
  if (name == "gqt") return Method::gqt;
  if (name == "trust_region") return Method::trust_region;
  if (name == "sd_goldstein") return Method::sd_goldstein;
  if (name == "royer_wright") return Method::royer_wright;
  throw InvalidConfig("unknown method: " + name);
}

std::string method_name(Method m) {
  switch (m) {
    case Method::newton: return "newton";
    case Method::reg2alpha: return "reg2alpha";
    case Method::gqt: return "gqt";
    case Method::trust_region: return "trust_region";
    case Method::sd_goldstein: return "sd_goldstein";
    case Method::royer_wright: return "royer_wright";
  }
  return "?";
}

const char* stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::gradient_tolerance: return "gradient-tolerance";
    case StopReason::budget: return "budget";
    case StopReason::failure: return "failure";
  }
  return "?";
}

double MethodConfig::rw_eps_h() const { return eps_H > 0.0 ? eps_H : std::sqrt(eps); }

void MethodConfig::validate() const {
  if (!(eps > 0.0)) throw InvalidConfig("eps must be positive");
  if (budget < 1) throw InvalidConfig("budget must be at least 1");
  switch (method) {
    case Method::reg2alpha:
      if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidConfig("alpha must be in [0,1]");
      if (!(sigma_min > 0.0)) throw InvalidConfig("sigma_min must be positive");
      if (!(sigma0 >= sigma_min)) throw InvalidConfig("sigma0 must be at least sigma_min");
      if (!(eta1 > 0.0 && eta1 < 1.0)) throw InvalidConfig("eta1 must be in (0,1)");
      if (!(gamma_inc > 1.0) || !(gamma_dec >= 1.0))
        throw InvalidConfig("gamma_inc > 1 and gamma_dec >= 1 required");
      break;
    case Method::gqt:
      if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidConfig("GQT needs alpha in (0,1]");
      if (!(omega_min > 0.0) || !(omega0 >= omega_min))
        throw InvalidConfig("omega0 >= omega_min > 0 required");
      if (!(gamma1 > 1.0)) throw InvalidConfig("gamma1 must exceed 1");
      if (!(eta1 > 0.0 && eta1 < 1.0)) throw InvalidConfig("eta1 must be in (0,1)");
      break;
    case Method::trust_region:
      if (!(delta0 > 0.0) || !(delta_max >= delta0))
        throw InvalidConfig("need 0 < delta0 <= delta_max");
      if (!(tr_eta > 0.0 && tr_eta < 1.0)) throw InvalidConfig("tr_eta must be in (0,1)");
      if (!(tr_grow > 1.0) || !(tr_shrink > 0.0 && tr_shrink < 1.0))
        throw InvalidConfig("tr_grow > 1 and tr_shrink in (0,1) required");
      break;
    case Method::sd_goldstein:
      if (!(0.0 < mu2 && mu2 < 0.5 && 0.5 < mu1 && mu1 < 1.0))
        throw InvalidConfig("Goldstein constants need 0 < mu2 < 1/2 < mu1 < 1");
      break;
    case Method::royer_wright:
      if (!(rw_eta > 0.0 && rw_eta <= 3.0)) throw InvalidConfig("rw_eta must be in (0,3]");
      if (!(backtrack > 0.0 && backtrack < 1.0)) throw InvalidConfig("backtrack must be in (0,1)");
      if (!relax_eps_h && rw_eps_h() > std::sqrt(eps) * (1.0 + 1e-12))
        throw InvalidConfig("eps_H must not exceed sqrt(eps)");
      if (!(rw_eps_h() > 0.0)) throw InvalidConfig("eps_H must be positive");
      break;
    case Method::newton:
      break;
  }
}

Vec newton_step(const Vec& g, const SymMat& H) {
  if (eig_min(H) <= 0.0)
    throw MethodInapplicable("Newton step needs a positive definite Hessian");
  return solve_shifted(H, 0.0, -g);
}

double gqt_multiplier(const Vec& g, const SymMat& H, double omega, double alpha) {
  const double threshold = omega * std::pow(norm(g), alpha / (1.0 + alpha));
  const double lmin = eig_min(H);
  return lmin >= threshold ? 0.0 : -lmin + threshold;
}

namespace {

double quadratic_model_decrease(const Vec& g, const SymMat& H, const Vec& s) {
  return -(dot(g, s) + 0.5 * dot(s, mul(H, s)));
}

struct ControlState {
  double sigma = 0, delta = 0, omega = 0;
  double hessian_sup = 0;  // measured sup |f''|, stands in for L_g
};

// Upper bound on the regularization step implied by global model decrease;
// violating it means the subproblem solve is broken, so it is a tripwire.
void check_reg_step_bound(const MethodConfig& cfg, const ControlState& st, double gnorm,
                          const Vec& s) {
  const double c = 3.0 * (2.0 + cfg.alpha);
  double bound = std::pow(c * gnorm / st.sigma, 1.0 / (1.0 + cfg.alpha));
  if (cfg.alpha > 0.0)
    bound = std::max(bound, std::pow(c * st.hessian_sup / (4.0 * st.sigma), 1.0 / cfg.alpha));
  if (norm(s) > bound * (1.0 + 1e-9))
    throw Error("regularization step exceeded its theoretical bound");
}

}  // namespace

IterateTrace run(const MethodConfig& cfg, const PiecewiseObjective& obj, const Vec& x0) {
  cfg.validate();
  obj.validate();
  if (x0.dim != obj.dim) throw InvalidInput("x0 dimension does not match objective");

  ControlState st;
  st.sigma = cfg.sigma0;
  st.delta = cfg.delta0;
  st.omega = cfg.omega0;
  if (cfg.method == Method::reg2alpha) st.hessian_sup = second_derivative_bound(obj);

  IterateTrace trace;
  Vec x = x0;
  double f = value_at(obj, x);
  Vec g = gradient_at(obj, x);
  SymMat H = hessian_at(obj, x);
  trace.objective_calls = 1;

  for (long k = 0;; ++k) {
    const double gnorm = norm(g);
    if (meets_grad_tol(gnorm, cfg.eps)) {
      trace.reason = StopReason::gradient_tolerance;
      trace.termination_index = k;
      break;
    }
    if (k >= cfg.budget) {
      trace.reason = StopReason::budget;
      trace.termination_index = k;
      break;
    }

    IterateRecord rec;
    rec.k = k;
    rec.x = x;
    rec.f = f;
    rec.g = g;
    rec.H = H;
    rec.step = zero_vec(x.dim);
    rec.residual = zero_vec(x.dim);
    bool advance = false;
    bool fatal = false;

    switch (cfg.method) {
      case Method::newton: {
        rec.step = newton_step(g, H);
        rec.lambda = 0.0;
        rec.model_decrease = quadratic_model_decrease(g, H, rec.step);
        const double f_trial = value_at(obj, x + rec.step);
        ++trace.objective_calls;
        rec.actual_decrease = f - f_trial;
        rec.rho = rec.model_decrease != 0.0 ? rec.actual_decrease / rec.model_decrease : 0.0;
        rec.success = rec.actual_decrease > 0.0;
        advance = rec.success;
        fatal = !rec.success;
        break;
      }
      case Method::reg2alpha: {
        if (!cfg.sigma_schedule.empty()) {
          const size_t i = std::min<size_t>(static_cast<size_t>(k), cfg.sigma_schedule.size() - 1);
          st.sigma = std::max(cfg.sigma_min, cfg.sigma_schedule[i]);
        }
        const SubproblemResult sub = solve_reg_subproblem(g, H, st.sigma, cfg.alpha);
        rec.step = sub.step;
        rec.lambda = sub.multiplier;
        rec.control = st.sigma;
        rec.residual = g + mul(H, rec.step) + sub.multiplier * rec.step;
        check_reg_step_bound(cfg, st, gnorm, rec.step);
        const double snorm = norm(rec.step);
        rec.model_decrease = quadratic_model_decrease(g, H, rec.step) -
                             st.sigma / (2.0 + cfg.alpha) * std::pow(snorm, 2.0 + cfg.alpha);
        const double f_trial = value_at(obj, x + rec.step);
        ++trace.objective_calls;
        rec.actual_decrease = f - f_trial;
        rec.rho = rec.actual_decrease / rec.model_decrease;
        rec.success = rec.rho >= cfg.eta1;
        advance = rec.success;
        if (cfg.sigma_schedule.empty())
          st.sigma = rec.success ? std::max(cfg.sigma_min, st.sigma / cfg.gamma_dec)
                                 : st.sigma * cfg.gamma_inc;
        break;
      }
      case Method::gqt: {
        rec.lambda = gqt_multiplier(g, H, st.omega, cfg.alpha);
        rec.control = st.omega;
        rec.step = solve_shifted(H, rec.lambda, -g);
        rec.model_decrease = quadratic_model_decrease(g, H, rec.step);
        const double f_trial = value_at(obj, x + rec.step);
        ++trace.objective_calls;
        rec.actual_decrease = f - f_trial;
        rec.rho = rec.actual_decrease / rec.model_decrease;
        rec.success = rec.rho > cfg.eta1;
        advance = rec.success;
        st.omega = rec.success ? std::max(cfg.omega_min, st.omega / cfg.gamma1)
                               : st.omega * cfg.gamma1;
        break;
      }
      case Method::trust_region: {
        const SubproblemResult sub = solve_trs(g, H, st.delta);
        rec.step = sub.step;
        rec.lambda = sub.multiplier;
        rec.control = st.delta;
        rec.model_decrease = quadratic_model_decrease(g, H, rec.step);
        const double f_trial = value_at(obj, x + rec.step);
        ++trace.objective_calls;
        rec.actual_decrease = f - f_trial;
        rec.rho = rec.actual_decrease / rec.model_decrease;
        rec.success = rec.rho >= cfg.tr_eta;
        advance = rec.success;
        if (rec.success) {
          if (norm(rec.step) >= st.delta * (1.0 - 1e-12))
            st.delta = std::min(cfg.delta_max, st.delta * cfg.tr_grow);
        } else {
          st.delta *= cfg.tr_shrink;
        }
        break;
      }
      case Method::sd_goldstein: {
        const Vec d = -g;
        const double slope = dot(g, d);  // -||g||^2
        // initial trial: the curvature surrogate 1/(4 f^2), capped at one;
        // on the slow steepest-descent family this is the exact Goldstein
        // midpoint step, and it equals one whenever |f| <= 1/2.
        double mu = (4.0 * f * f > 1.0) ? 1.0 / (4.0 * f * f) : 1.0;
        double lo = 0.0, hi = 0.0;
        bool accepted = false;
        for (int trial = 0; trial < 60; ++trial) {
          const double f_trial = value_at(obj, x + mu * d);
          ++trace.objective_calls;
          const bool decrease_ok = f_trial <= f + cfg.mu2 * mu * slope;
          const bool length_ok = f_trial >= f + cfg.mu1 * mu * slope;
          if (decrease_ok && length_ok) {
            rec.step = mu * d;
            rec.control = mu;
            rec.lambda = 1.0 / mu;  // M = (1/mu) I reproduces s = -mu g exactly
            rec.actual_decrease = f - f_trial;
            rec.model_decrease = -0.5 * mu * slope;
            rec.rho = rec.actual_decrease / (-mu * slope);
            accepted = true;
            break;
          }
          if (!decrease_ok) {
            hi = mu;
            mu = lo > 0.0 ? 0.5 * (lo + hi) : 0.5 * mu;
          } else {
            lo = mu;
            mu = hi > 0.0 ? 0.5 * (lo + hi) : 2.0 * mu;
          }
        }
        rec.success = accepted && rec.actual_decrease > 0.0;
        advance = rec.success;
        fatal = !rec.success;
        break;
      }
      case Method::royer_wright: {
        const EigenPair e = eig_sym(H);
        const double eps_h = cfg.rw_eps_h();
        Vec d;
        if (e.lambda_min >= eps_h && dot(g, mul(H, g)) / (gnorm * gnorm) > cfg.eps) {
          d = solve_shifted(H, 0.0, -g);
        } else if (e.lambda_min < -eps_h) {
          d = std::abs(e.lambda_min) * e.v_min;
          if (dot(g, d) > 0.0) d = -d;
          rec.neg_curvature = true;
        } else {
          // near-singular middle case (never hit on the adversarial families)
          const double shift = eps_h + std::max(0.0, -e.lambda_min);
          d = solve_shifted(H, shift, -g);
          rec.lambda = shift;
        }
        const double dnorm = norm(d);
        double a = 1.0;
        bool accepted = false;
        for (int trial = 0; trial < 60; ++trial) {
          const double f_trial = value_at(obj, x + a * d);
          ++trace.objective_calls;
          if (f_trial <= f - cfg.rw_eta / 6.0 * a * a * a * dnorm * dnorm * dnorm) {
            rec.step = a * d;
            rec.control = a;
            rec.actual_decrease = f - f_trial;
            accepted = true;
            break;
          }
          a *= cfg.backtrack;
        }
        rec.model_decrease = quadratic_model_decrease(g, H, rec.step);
        rec.rho = rec.model_decrease != 0.0 ? rec.actual_decrease / rec.model_decrease : 0.0;
        rec.success = accepted && rec.actual_decrease > 0.0;
        advance = rec.success;
        fatal = !rec.success;
        break;
      }
    }

    ++trace.evaluations;
    trace.records.push_back(rec);
    if (advance) {
      x = x + rec.step;
      f = value_at(obj, x);
      g = gradient_at(obj, x);
      H = hessian_at(obj, x);
      ++trace.objective_calls;
    }
    if (fatal) {
      trace.reason = StopReason::failure;
      trace.termination_index = k + 1;
      break;
    }
  }

  trace.final_x = x;
  trace.final_f = f;
  trace.final_gnorm = norm(g);
  return trace;
}

std::string iterate_trace_to_csv(const IterateTrace& t, int dim) {
  std::ostringstream out;
  out << (dim == 2 ? "k,x,y,f,gnorm,lambda,control,step_norm,rho,success\n"
                   : "k,x,f,gnorm,lambda,control,step_norm,rho,success\n");
  for (const IterateRecord& r : t.records) {
    out << r.k << ',' << format_double(r.x[0]);
    if (dim == 2) out << ',' << format_double(r.x[1]);
    out << ',' << format_double(r.f) << ',' << format_double(norm(r.g)) << ','
        << format_double(r.lambda) << ',' << format_double(r.control) << ','
        << format_double(norm(r.step)) << ',' << format_double(r.rho) << ','
        << (r.success ? 1 : 0) << '\n';
  }
  return out.str();
}

IterateTrace iterate_trace_from_csv(const std::string& text, int* dim_out) {
  IterateTrace t;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("empty trace CSV");
  int dim;
  if (line == "k,x,y,f,gnorm,lambda,control,step_norm,rho,success")
    dim = 2;
  else if (line == "k,x,f,gnorm,lambda,control,step_norm,rho,success")
    dim = 1;
  else
    throw InvalidInput("not a method trace CSV");
  if (dim_out) *dim_out = dim;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    auto next = [&]() {
      if (!std::getline(ls, cell, ',')) throw InvalidInput("short trace row");
      return cell;
    };
    IterateRecord r;
    r.k = std::stol(next());
    const double x0 = std::stod(next());
    r.x = dim == 2 ? Vec(x0, std::stod(next())) : Vec(x0);
    r.f = std::stod(next());
    r.g = zero_vec(dim);
    r.g[0] = std::stod(next());  // only the norm survives the CSV round trip
    r.lambda = std::stod(next());
    r.control = std::stod(next());
    r.step = zero_vec(dim);
    r.step[0] = std::stod(next());  // ditto
    r.rho = std::stod(next());
    r.success = next() == "1";
    t.records.push_back(r);
  }
  t.termination_index = static_cast<long>(t.records.size());
  t.evaluations = t.termination_index;
  return t;
}

}  // namespace wcomp
