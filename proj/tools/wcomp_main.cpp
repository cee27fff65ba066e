// Command-line front end: generate the slow objectives, run the methods on
// them, verify class membership and smoothness, sweep (eps, alpha) grids and
// emit the six-panel figures.
//
// Exit codes: 0 all verifications pass, 1 verification mismatch,
//             2 usage/config error, 3 I/O error.

#include <cmath>
#include <future>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "wcomp/analysis.hpp"
#include "wcomp/svg_plot.hpp"

using namespace wcomp;
using nlohmann::json;

namespace {

struct GenFlags {
  std::string family = "malpha";
  double eps = 0.1;
  double alpha = 1.0;
  double kappa_rg = 0.0;
  double kappa_lambda = 2.0;
  bool figure_lambda = false;
  double sigma_bar = 1.0;
  double crs_eta = 0.5;
};

void add_gen_flags(CLI::App* cmd, GenFlags& g) {
  cmd->add_option("--family", g.family, "malpha|newton2d|sd|crs")->capture_default_str();
  cmd->add_option("--eps", g.eps, "target gradient accuracy in (0,1)")->capture_default_str();
  cmd->add_option("--alpha", g.alpha, "Hessian Hoelder exponent in [0,1]")->capture_default_str();
  cmd->add_option("--kappa-rg", g.kappa_rg, "relative residual allowance")->capture_default_str();
  cmd->add_option("--kappa-lambda", g.kappa_lambda, "multiplier bound constant")
      ->capture_default_str();
  cmd->add_flag("--lambda-preset", g.figure_lambda, "use lambda_k = |g_k|^{a/(1+a)}/10");
  cmd->add_option("--sigma-bar", g.sigma_bar, "CRS regularization cap")->capture_default_str();
  cmd->add_option("--crs-eta", g.crs_eta, "CRS acceptance threshold")->capture_default_str();
}

struct GeneratedAny {
  PiecewiseObjective objective;
  GroundTruthTrace trace;    // x part for newton2d
  GroundTruthTrace y_trace;  // newton2d only
  long k_target = 0;
};

GeneratedAny generate_family(const GenFlags& g) {
  GeneratedAny out;
  switch (family_from_name(g.family)) {
    case Family::malpha: {
      MAlphaConfig cfg;
      cfg.eps = g.eps;
      cfg.alpha = g.alpha;
      cfg.kappa_rg = g.kappa_rg;
      cfg.kappa_lambda = g.kappa_lambda;
      if (g.figure_lambda) cfg.lambda_rule = figure_lambda_rule(g.alpha);
      Generated r = gen_malpha(cfg);
      out.objective = std::move(r.objective);
      out.trace = std::move(r.trace);
      break;
    }
    case Family::newton2d: {
      Generated2D r = gen_newton2d(g.eps, {}, g.kappa_rg);
      out.objective = std::move(r.objective);
      out.trace = std::move(r.x_part);
      out.y_trace = std::move(r.y_part);
      break;
    }
    case Family::sd: {
      Generated r = gen_sd(g.eps);
      out.objective = std::move(r.objective);
      out.trace = std::move(r.trace);
      break;
    }
    case Family::crs: {
      CrsConfig cfg;
      cfg.eps = g.eps;
      cfg.sigma_bar = g.sigma_bar;
      cfg.kappa_rg = g.kappa_rg;
      cfg.eta = g.crs_eta;
      Generated r = gen_crs(cfg);
      out.objective = std::move(r.objective);
      out.trace = std::move(r.trace);
      break;
    }
  }
  out.k_target = out.trace.k_target;
  return out;
}

struct MethodFlags {
  std::string method = "newton";
  double eps_h = 0.0;
  double rw_eta = 1.0;
  double eta1 = 0.01;
  double sigma0 = 1.0;
  double sigma_min = 1e-8;
  double delta0 = 1.0;
  double mu1 = 0.75;
  double mu2 = 0.25;
  long budget = 200000;
  bool matched_sigma = false;
};

void add_method_flags(CLI::App* cmd, MethodFlags& m) {
  cmd->add_option("--method", m.method,
                  "newton|reg2alpha|gqt|trust_region|sd_goldstein|royer_wright")
      ->capture_default_str();
  cmd->add_option("--eps-h", m.eps_h, "Royer-Wright curvature threshold (default sqrt(eps))");
  cmd->add_option("--rw-eta", m.rw_eta, "Royer-Wright decrease constant")->capture_default_str();
  cmd->add_option("--eta1", m.eta1, "acceptance ratio threshold")->capture_default_str();
  cmd->add_option("--sigma0", m.sigma0, "initial regularization weight")->capture_default_str();
  cmd->add_option("--sigma-min", m.sigma_min, "regularization floor")->capture_default_str();
  cmd->add_option("--delta0", m.delta0, "initial trust radius")->capture_default_str();
  cmd->add_option("--mu1", m.mu1, "Goldstein lower constant")->capture_default_str();
  cmd->add_option("--mu2", m.mu2, "Goldstein upper constant")->capture_default_str();
  cmd->add_option("--budget", m.budget, "iteration budget")->capture_default_str();
  cmd->add_flag("--matched-sigma", m.matched_sigma,
                "pin reg2alpha sigma_k to the generated trace");
}

MethodConfig make_method_config(const MethodFlags& m, const GenFlags& g,
                                const GeneratedAny& gen) {
  MethodConfig cfg;
  cfg.method = method_from_name(m.method);
  cfg.eps = g.eps;
  if (family_from_name(g.family) == Family::newton2d)
    cfg.eps = g.eps * std::sqrt(1.0 + g.eps * g.eps);
  cfg.alpha = g.alpha;
  cfg.eps_H = m.eps_h;
  cfg.rw_eta = m.rw_eta;
  cfg.eta1 = m.eta1;
  cfg.sigma0 = m.sigma0;
  cfg.sigma_min = m.sigma_min;
  cfg.delta0 = m.delta0;
  cfg.mu1 = m.mu1;
  cfg.mu2 = m.mu2;
  cfg.budget = m.budget;
  cfg.kappa_rg = g.kappa_rg;
  if (cfg.method == Method::reg2alpha && m.matched_sigma) {
    for (size_t i = 0; i + 1 < gen.trace.rows.size(); ++i) {
      const TraceRow& r = gen.trace.rows[i];
      cfg.sigma_schedule.push_back(
          r.lambda > 0 ? r.lambda / std::pow(std::abs(r.s), g.alpha) : cfg.sigma_min);
    }
    cfg.sigma_min = 1e-300;
    cfg.gamma_dec = 1.0;
  }
  return cfg;
}

int cmd_generate(const GenFlags& g, const std::string& out, const std::string& trace_path) {
  GeneratedAny gen = generate_family(g);
  save_objective(out, gen.objective);
  std::string csv = trace_to_csv(gen.trace);
  if (family_from_name(g.family) == Family::newton2d)
    csv += trace_to_csv(gen.y_trace);  // second block: y part
  atomic_write(trace_path, csv);
  std::cout << "wrote " << out << " (" << gen.objective.segments.size() << " segments"
            << (gen.objective.dim == 2 ? " per part" : "") << ", k_target " << gen.k_target
            << ") and " << trace_path << "\n";
  return 0;
}

int cmd_run(const GenFlags& g, const MethodFlags& m, const std::string& report_path,
            const std::string& trace_path) {
  GeneratedAny gen = generate_family(g);
  MethodConfig cfg = make_method_config(m, g, gen);
  const Vec x0 = gen.objective.dim == 2 ? Vec(0.0, 0.0) : Vec(0.0);
  const IterateTrace trace = run(cfg, gen.objective, x0);
  if (!trace_path.empty()) atomic_write(trace_path, iterate_trace_to_csv(trace, gen.objective.dim));

  const LowerBoundCheck check = check_exact_termination(trace, gen.k_target, cfg.eps);
  json rep;
  rep["family"] = g.family;
  rep["method"] = m.method;
  rep["eps"] = g.eps;
  rep["alpha"] = g.alpha;
  rep["iterations"] = trace.termination_index;
  rep["predicted"] = gen.k_target;
  rep["evaluations"] = trace.evaluations;
  rep["objective_calls"] = trace.objective_calls;
  rep["final_gnorm"] = trace.final_gnorm;
  rep["reason"] = stop_reason_name(trace.reason);
  rep["pass"] = check.pass;
  if (!report_path.empty()) atomic_write(report_path, rep.dump(2) + "\n");
  std::cout << rep.dump(2) << "\n";
  return check.pass ? 0 : 1;
}

int cmd_verify(const std::string& fn_path, const std::string& trace_path,
               const std::string& klass, double alpha, const MembershipKappas& kappas,
               const CrsParams& crs, const std::string& out_path) {
  const PiecewiseObjective obj = load_objective(fn_path);
  const std::string csv = read_file(trace_path);

  IterateTrace trace;
  if (csv.rfind("k,x,f,g,H", 0) == 0) {
    const GroundTruthTrace gt = trace_from_csv(csv);
    trace = ground_truth_to_iterate_trace(
        gt, klass == "crs" ? Family::crs : Family::malpha);
  } else {
    trace = reconstruct_trace(obj, csv);
  }

  MembershipReport membership = klass == "crs" ? check_crs_membership(trace, crs)
                                               : check_malpha_membership(trace, alpha, kappas);
  const SmoothnessReport smooth = estimate_smoothness(obj, alpha);

  json rep;
  rep["class"] = klass;
  rep["membership"] = json::parse(membership_report_to_json(membership));
  rep["smoothness"] = json::parse(smoothness_report_to_json(smooth));
  if (!out_path.empty()) atomic_write(out_path, rep.dump(2) + "\n");
  std::cout << rep.dump(2) << "\n";
  return membership.pass ? 0 : 1;
}

int cmd_sweep(const GenFlags& base, const MethodFlags& m, std::vector<double> eps_list,
              std::vector<double> alpha_list, const std::string& out_path) {
  if (eps_list.size() < 3) throw InvalidConfig("sweep needs at least 3 eps values");
  if (alpha_list.empty()) throw InvalidConfig("sweep needs at least one alpha");
  std::sort(eps_list.rbegin(), eps_list.rend());
  std::sort(alpha_list.begin(), alpha_list.end());

  struct Cell {
    long count = 0, predicted = 0;
    bool pass = false;
  };
  std::map<std::pair<double, double>, Cell> cells;
  std::map<std::pair<double, double>, std::future<Cell>> futures;
  for (double a : alpha_list)
    for (double e : eps_list)
      futures[{a, e}] = std::async(std::launch::async, [&, a, e]() {
        GenFlags g = base;
        g.eps = e;
        g.alpha = a;
        GeneratedAny gen = generate_family(g);
        MethodConfig cfg = make_method_config(m, g, gen);
        const Vec x0 = gen.objective.dim == 2 ? Vec(0.0, 0.0) : Vec(0.0);
        const IterateTrace trace = run(cfg, gen.objective, x0);
        Cell c;
        c.count = trace.termination_index;
        c.predicted = gen.k_target;
        c.pass = check_exact_termination(trace, gen.k_target, cfg.eps).pass;
        return c;
      });
  for (auto& [key, fut] : futures) cells[key] = fut.get();

  bool all_pass = true;
  std::ostringstream csv;
  csv << "alpha,eps,count,predicted,ratio,slope_fit\n";
  for (double a : alpha_list) {
    std::vector<std::pair<double, long>> counts;
    for (double e : eps_list) counts.push_back({e, cells[{a, e}].count});
    const SlopeFit fit = fit_complexity_slope(counts, a);
    const double target = (2.0 + a) / (1.0 + a);
    if (std::abs(fit.slope - target) > 0.1) all_pass = false;
    for (double e : eps_list) {
      const Cell& c = cells[{a, e}];
      if (!c.pass || c.count != c.predicted) all_pass = false;
      csv << format_double(a) << ',' << format_double(e) << ',' << c.count << ',' << c.predicted
          << ',' << format_double(static_cast<double>(c.count) / static_cast<double>(c.predicted))
          << ',' << format_double(fit.slope) << '\n';
    }
  }
  atomic_write(out_path, csv.str());
  std::cout << csv.str();
  return all_pass ? 0 : 1;
}

int cmd_plot(const std::string& fn_path, const std::string& svg_path, double lo, double hi,
             int samples) {
  const PiecewiseObjective obj = load_objective(fn_path);
  PlotOptions opts;
  opts.x_lo = lo;
  opts.x_hi = hi;
  opts.samples = samples;
  plot_objective(obj, svg_path, opts);
  std::cout << "wrote " << svg_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slow-convergence objective constructions and method harness"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value option file");

  GenFlags g;
  MethodFlags m;
  std::string out = "fn.json", trace_path = "trace.csv", report_path = "report.json";
  std::string fn_path, svg_path = "fn.svg", klass = "malpha", verify_out;
  MembershipKappas kappas;
  double kappa_lambda_flag = 0.0;
  CrsParams crs;
  std::vector<double> eps_list, alpha_list;
  double range_lo = 0.0, range_hi = 0.0;
  int samples = 600;

  CLI::App* cg = app.add_subcommand("generate", "emit objective JSON + ground-truth trace CSV");
  add_gen_flags(cg, g);
  cg->add_option("--out", out, "objective JSON path")->capture_default_str();
  cg->add_option("--trace", trace_path, "trace CSV path")->capture_default_str();

  CLI::App* cr = app.add_subcommand("run", "run a method on a generated objective");
  add_gen_flags(cr, g);
  add_method_flags(cr, m);
  cr->add_option("--out", report_path, "report JSON path")->capture_default_str();
  cr->add_option("--trace", trace_path, "trace CSV path")->capture_default_str();

  CLI::App* cv = app.add_subcommand("verify", "membership + smoothness checks");
  cv->add_option("--fn", fn_path, "objective JSON")->required();
  cv->add_option("--trace", trace_path, "trace CSV")->required();
  cv->add_option("--class", klass, "malpha|crs")->capture_default_str();
  cv->add_option("--alpha", g.alpha, "Hoelder exponent")->capture_default_str();
  cv->add_option("--kappa-rg", kappas.kappa_rg, "residual allowance")->capture_default_str();
  cv->add_option("--kappa-rs", kappas.kappa_rs, "residual-vs-Ms allowance")->capture_default_str();
  cv->add_option("--kappa-lambda", kappa_lambda_flag, "multiplier constant (0 = derive)");
  cv->add_option("--kappa-s", kappas.kappa_s, "step bound")->capture_default_str();
  cv->add_option("--sigma-bar", crs.sigma_bar, "CRS cap")->capture_default_str();
  cv->add_option("--kappa1", crs.kappa1, "CRS slope constant")->capture_default_str();
  cv->add_option("--kappa2", crs.kappa2, "CRS residual constant")->capture_default_str();
  cv->add_option("--crs-eta", crs.eta, "CRS acceptance threshold")->capture_default_str();
  cv->add_option("--out", verify_out, "report JSON path");

  CLI::App* cs = app.add_subcommand("sweep", "exact-count sweep over (eps, alpha)");
  add_gen_flags(cs, g);
  add_method_flags(cs, m);
  cs->add_option("--eps-list", eps_list, "eps grid (>= 3 values)")->required();
  cs->add_option("--alpha-list", alpha_list, "alpha grid")->required();
  cs->add_option("--out", out, "aggregate CSV path")->capture_default_str();

  CLI::App* cp = app.add_subcommand("plot", "six-panel SVG of f, f', f''");
  cp->add_option("--fn", fn_path, "objective JSON")->required();
  cp->add_option("--svg", svg_path, "output SVG path")->capture_default_str();
  cp->add_option("--range", range_lo, "plot range lower end");
  cp->add_option("--range-hi", range_hi, "plot range upper end");
  cp->add_option("--samples", samples, "samples per panel")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (cg->parsed()) return cmd_generate(g, out, trace_path);
    if (cr->parsed()) return cmd_run(g, m, report_path, trace_path);
    if (cv->parsed()) {
      if (kappa_lambda_flag > 0) kappas.kappa_lambda = kappa_lambda_flag;
      crs.kappa_rg = kappas.kappa_rg;
      return cmd_verify(fn_path, trace_path, klass, g.alpha, kappas, crs, verify_out);
    }
    if (cs->parsed()) return cmd_sweep(g, m, eps_list, alpha_list, out);
    if (cp->parsed()) return cmd_plot(fn_path, svg_path, range_lo, range_hi, samples);
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
