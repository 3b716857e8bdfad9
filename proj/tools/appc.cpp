// Command-line front end: simulate, oracle, check-fe, compare-laws.
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "appc/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Adaptive closed-loop simulator with oracle and excitation checks"};
  app.require_subcommand(1);

  std::string scenario_path, out_dir, trace_path, law_name;
  std::optional<std::string> fe_scenario;
  std::optional<double> dt, t_end;

  auto* simulate = app.add_subcommand("simulate", "Run the closed loop and write trace.csv and report.json");
  simulate->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  simulate->add_option("--out", out_dir, "Output directory")->required();
  simulate->add_option("--dt", dt, "Integration step [s]")->check(CLI::PositiveNumber);
  simulate->add_option("--t-end", t_end, "Horizon [s]")->check(CLI::PositiveNumber);
  simulate->add_option("--law", law_name, "Adaptive law")->check(CLI::IsMember({"memory", "baseline", "both"}));

  auto* oracle = app.add_subcommand("oracle", "Print the ideal controller for a scenario as JSON");
  oracle->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);

  auto* check_fe = app.add_subcommand("check-fe", "Analyse excitation in a trace CSV; prints JSON");
  check_fe->add_option("trace", trace_path, "Trace CSV")->required()->check(CLI::ExistingFile);
  check_fe->add_option("--scenario", fe_scenario, "Scenario JSON; takes C from the oracle")
      ->check(CLI::ExistingFile);

  auto* compare = app.add_subcommand("compare-laws", "Run memory and baseline laws on the same scenario");
  compare->add_option("scenario", scenario_path, "Scenario JSON")->required()->check(CLI::ExistingFile);
  compare->add_option("--out", out_dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests exit 0; every usage error maps to the input-error code.
    const int rc = app.exit(e);
    return rc == 0 ? appc::kExitOk : appc::kExitInputError;
  }

  if (*simulate) {
    appc::SimulateOptions opts{scenario_path, out_dir, dt, t_end, std::nullopt};
    if (!law_name.empty()) {
      opts.law = law_name == "memory"     ? appc::LawSelection::memory
                 : law_name == "baseline" ? appc::LawSelection::baseline
                                          : appc::LawSelection::both;
    }
    return appc::cmd_simulate(opts, std::cerr);
  }
  if (*oracle) return appc::cmd_oracle(scenario_path, std::cout, std::cerr);
  if (*check_fe) return appc::cmd_check_fe(trace_path, fe_scenario, std::cout, std::cerr);
  return appc::cmd_compare_laws(scenario_path, out_dir, std::cerr);
}
