#include "appc/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>

#include "appc/oracle.hpp"
#include "appc/parallel.hpp"
#include "appc/trace_io.hpp"

namespace appc {

using nlohmann::json;

namespace {

// JSON has no infinities; absent or infinite values become null.
json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json opt(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

json column_json(const Mat& m) { return json(std::vector<double>(m.data().begin(), m.data().end())); }

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  f << j.dump(2) << '\n';
}

std::optional<StructuralConstants> structural_for(const Scenario& s) {
  try {
    return structural_constants(s.plant, solve_ideal(s.plant, s.modal), s.modal.Gamma);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

AnalysisOptions analysis_options(const Scenario& s) {
  AnalysisOptions o;
  if (const auto c = structural_for(s)) o.log10_abs_C = c->log_abs_C / std::log(10.0);
  o.sigma = s.estimator.sigma;
  return o;
}

json final_errors(const SimulationTrace& trace) {
  const TraceSample& last = trace.samples.back();
  json j = {{"t", last.t}, {"theta_hat", last.theta}, {"u", last.u}};
  if (trace.has_oracle) {
    double err_inf = 0.0, star_inf = 0.0, eref = 0.0;
    for (std::size_t i = 0; i < last.theta_err.size(); ++i) {
      err_inf = std::max(err_inf, std::abs(last.theta_err[i]));
      star_inf = std::max(star_inf, std::abs(trace.theta_star[i]));
    }
    for (double v : last.eref) eref += v * v;
    j["theta_err_norm"] = num(last.theta_err_norm());
    j["theta_err_inf_rel"] = num(star_inf > 0.0 ? err_inf / star_inf : err_inf);
    j["eref_norm"] = num(std::sqrt(eref));
    j["u_star"] = last.u_star;
  }
  return j;
}

Scenario load_or_report(const std::string& path, std::ostream& log) {
  Scenario s = load_scenario(path);
  for (const auto& w : s.warnings) log << "warning: " << w << '\n';
  return s;
}

}  // namespace

json oracle_json(const Scenario& s) {
  const IdealSolution ideal = solve_ideal(s.plant, s.modal);
  const OracleResiduals r = residuals(ideal, s.plant, s.modal);
  json j = {
      {"M", mat_to_json(ideal.M)},
      {"A_sigma", mat_to_json(ideal.A_sigma)},
      {"K_x", column_json(ideal.K_x)},
      {"K_r", ideal.K_r},
      {"theta_star", column_json(ideal.theta_star)},
      {"B_ref", column_json(ideal.B_ref)},
      {"char_poly_A_sigma", char_poly(ideal.A_sigma)},
      {"char_poly_Gamma", char_poly(s.modal.Gamma)},
      {"residuals",
       {{"sylvester", r.sylvester},
        {"output_map", r.output_map},
        {"char_poly_gap", r.char_poly_gap},
        {"dc_gain_gap", r.dc_gain_gap}}},
  };
  try {
    const StructuralConstants c = structural_constants(s.plant, ideal, s.modal.Gamma);
    j["structural"] = {{"C1", c.C1},         {"C2", c.C2}, {"C3", c.C3},
                       {"log10_abs_C", c.log_abs_C / std::log(10.0)},
                       {"sign_C", c.sign_C}, {"q", c.q}};
  } catch (const std::exception& e) {
    j["structural"] = {{"error", e.what()}};
  }
  if (!s.warnings.empty()) j["warnings"] = s.warnings;
  return j;
}

json rate_json(const RateFit& f) {
  return {{"slope", num(f.slope)},  {"intercept", num(f.intercept)}, {"samples", f.samples},
          {"t_from", num(f.t_from)}, {"t_to", num(f.t_to)},         {"floor", num(f.floor)},
          {"degenerate", f.degenerate}, {"window", f.window}};
}

json verdict_json(const ConvergenceVerdict& v) {
  return {{"monotone", v.monotonicity.monotone},
          {"max_violation", v.monotonicity.max_violation},
          {"per_component_violation", v.monotonicity.per_component},
          {"sup_xi", num(v.sup_xi)},
          {"bounded", v.bounded},
          {"theta_err_rate", rate_json(v.theta_rate)},
          {"xi_rate", rate_json(v.xi_rate)},
          {"converging", v.converging}};
}

json excitation_json(const ExcitationReport& rep) {
  json signals = json::array();
  for (const auto& s : rep.signals) {
    signals.push_back({{"name", s.name}, {"dim", s.dim}, {s.log10 ? "log10_alpha" : "alpha", num(s.alpha)}});
  }
  json bound = nullptr;
  if (rep.integral_bound) {
    const IntegralBoundCheck& c = *rep.integral_bound;
    bound = {{"t_peak", c.t_peak},
           {"beta", c.beta},
           {"t_a", c.t_a},
           {"t_b", c.t_b},
           {"alpha", c.alpha},
           {"log10_lhs_subinterval", num(c.log10_lhs_sub)},
           {"log10_lhs_window", num(c.log10_lhs_full)},
           {"log10_bound", num(c.log10_bound)},
           {"holds", c.holds},
           {"log10_bound_sharp", num(c.log10_bound_sharp)},
           {"holds_sharp", c.holds_sharp}};
  }
  return {
      {"t_r_plus", rep.t_r_plus},
      {"t_e", opt(rep.t_e)},
      {"t_onset", opt(rep.t_onset)},
      {"fe_satisfied", rep.fe_satisfied},
      {"alpha", num(rep.alpha)},
      {"signals", signals},
      {"omega",
       {{"starts_at_zero", rep.omega.starts_at_zero},
        {"nondecreasing", rep.omega.nondecreasing},
        {"max_relative_drop", rep.omega.max_relative_drop},
        {"bounded", rep.omega.bounded},
        {"log10_lower", opt(rep.omega.log10_lower)},
        {"log10_upper", opt(rep.omega.log10_upper)}}},
      {"growth",
       {{"available", rep.growth.available},
        {"log10_c1", num(rep.growth.log10_c1)},
        {"c2", num(rep.growth.c2)},
        {"condition_met", rep.growth.condition_met}}},
      {"integral_bound", bound},
      {"bound_skipped", rep.bound_skipped.empty() ? json(nullptr) : json(rep.bound_skipped)},
      {"log10_abs_C", opt(rep.log10_C)},
      {"log10_abs_C_source", rep.log10_C_source},
      {"q", rep.q},
      {"pe",
       {{"window", rep.pe_window},
        {"alpha_min", num(rep.pe_alpha_min)},
        {"alpha_max", num(rep.pe_alpha_max)},
        {"alpha_last", num(rep.pe_alpha_last)}}},
      {"drem_residual_max", num(rep.drem_residual_max)},
      {"warnings", rep.warnings},
  };
}

json run_report(const Scenario& s, const SimulationTrace& trace) {
  const ExcitationReport rep = analyze_excitation(trace, analysis_options(s));
  json j = {
      {"scenario", s.name},
      {"law", to_string(trace.law)},
      {"dt", s.sim.dt},
      {"t_end", s.sim.t_end},
      {"samples", trace.samples.size()},
      {"final", final_errors(trace)},
      {"excitation", excitation_json(rep)},
      {"warnings", trace.warnings},
  };
  try {
    j["oracle"] = oracle_json(s);
  } catch (const std::exception& e) {
    j["oracle"] = {{"error", e.what()}};
  }
  if (trace.has_oracle) {
    j["convergence"] = verdict_json(convergence_verdict(trace, rep.t_e));
    // The gradient law is only a point of comparison; it carries no convergence guarantee.
    j["convergence"]["guaranteed"] = trace.law == AdaptiveLaw::memory;
  }
  return j;
}

int cmd_simulate(const SimulateOptions& opts, std::ostream& log) {
  std::optional<Scenario> loaded;
  try {
    loaded = load_or_report(opts.scenario_path, log);
    if (opts.dt) loaded->sim.dt = *opts.dt;
    if (opts.t_end) loaded->sim.t_end = *opts.t_end;
    if (opts.law) loaded->law = *opts.law;
    loaded->sim.validate();
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  const Scenario& s = *loaded;
  const std::filesystem::path out(opts.out_dir);
  std::filesystem::create_directories(out);

  std::vector<AdaptiveLaw> laws;
  if (s.law != LawSelection::baseline) laws.push_back(AdaptiveLaw::memory);
  if (s.law != LawSelection::memory) laws.push_back(AdaptiveLaw::baseline);

  int status = kExitOk;
  json combined = json::object();
  for (AdaptiveLaw law : laws) {
    // With a single law the files are trace.csv / report.json.
    const std::string suffix = laws.size() > 1 ? "_" + to_string(law) : "";
    try {
      const SimulationTrace trace = run_closed_loop(s.problem(law), s.sim);
      write_trace_csv((out / ("trace" + suffix + ".csv")).string(), trace);
      const json report = run_report(s, trace);
      combined[to_string(law)] = report;
      log << to_string(law) << ": " << trace.samples.size() << " samples, final |theta_err| = "
          << (trace.has_oracle ? format_double(trace.samples.back().theta_err_norm()) : "n/a") << '\n';
    } catch (const DivergenceError& e) {
      log << "error: " << to_string(law) << " run diverged at t = " << e.time() << ": " << e.what() << '\n';
      combined[to_string(law)] = {{"diverged", true}, {"time", e.time()}, {"message", e.what()}};
      status = kExitDiverged;
    }
  }
  write_json(out / "report.json", laws.size() > 1 ? combined : combined.begin().value());
  return status;
}

int cmd_oracle(const std::string& scenario_path, std::ostream& out, std::ostream& log) {
  try {
    const Scenario s = load_or_report(scenario_path, log);
    out << oracle_json(s).dump(2) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

int cmd_check_fe(const std::string& trace_path, const std::optional<std::string>& scenario_path,
                 std::ostream& out, std::ostream& log) {
  try {
    const SimulationTrace trace = read_trace_csv(trace_path);
    AnalysisOptions o;
    if (scenario_path) o = analysis_options(load_or_report(*scenario_path, log));
    out << excitation_json(analyze_excitation(trace, o)).dump(2) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  }
}

int cmd_compare_laws(const std::string& scenario_path, const std::string& out_dir, std::ostream& log) {
  std::optional<Scenario> loaded;
  try {
    loaded = load_or_report(scenario_path, log);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  const Scenario& s = *loaded;
  const std::filesystem::path out(out_dir);
  std::filesystem::create_directories(out);

  const std::vector<AdaptiveLaw> laws{AdaptiveLaw::memory, AdaptiveLaw::baseline};
  std::vector<ClosedLoopProblem> problems;
  for (AdaptiveLaw law : laws) problems.push_back(s.problem(law));
  const std::vector<BatchResult> results = run_batch(problems, s.sim);

  json cmp = {{"scenario", s.name}, {"dt", s.sim.dt}, {"t_end", s.sim.t_end}};
  std::size_t failures = 0;
  for (std::size_t i = 0; i < laws.size(); ++i) {
    const std::string name = to_string(laws[i]);
    const BatchResult& r = results[i];
    if (!r.trace) {
      ++failures;
      cmp[name] = {{"diverged", true}, {"message", r.error_message}};
      log << name << ": diverged: " << r.error_message << '\n';
      continue;
    }
    const SimulationTrace& trace = *r.trace;
    write_trace_csv((out / ("trace_" + name + ".csv")).string(), trace);
    json entry = {{"diverged", false}, {"final", final_errors(trace)}};
    if (trace.has_oracle) {
      const auto t_e = detect_excitation_end(trace);
      const ConvergenceVerdict v = convergence_verdict(trace, t_e);
      entry["t_e"] = opt(t_e);
      entry["theta_err_rate"] = rate_json(v.theta_rate);
      entry["xi_rate"] = rate_json(v.xi_rate);
      entry["monotone"] = v.monotonicity.monotone;
    }
    cmp[name] = entry;
    log << name << ": final |theta_err| = "
        << (trace.has_oracle ? format_double(trace.samples.back().theta_err_norm()) : "n/a") << '\n';
  }
  if (failures == 0 && cmp["memory"].contains("final") && cmp["baseline"].contains("final")) {
    const json& m = cmp["memory"]["final"];
    const json& b = cmp["baseline"]["final"];
    if (m.contains("theta_err_norm") && b.contains("theta_err_norm") && m["theta_err_norm"].is_number() &&
        b["theta_err_norm"].is_number()) {
      cmp["memory_not_worse"] = m["theta_err_norm"].get<double>() <= b["theta_err_norm"].get<double>();
    }
  } else if (failures == 1 && !cmp["memory"]["diverged"].get<bool>()) {
    cmp["memory_not_worse"] = true;
  }
  write_json(out / "comparison.json", cmp);
  if (failures == laws.size()) return kExitDiverged;
  return failures ? kExitPartial : kExitOk;
}

}  // namespace appc
