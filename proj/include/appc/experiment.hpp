#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "appc/excitation.hpp"
#include "appc/scenario.hpp"

namespace appc {

/// Process exit codes used by the command-line front end.
enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 1,  // unreadable, malformed or invalid input
  kExitDiverged = 2,
  kExitPartial = 3,  // compare-laws: one of the two runs diverged
};

nlohmann::json oracle_json(const Scenario& s);
nlohmann::json excitation_json(const ExcitationReport& rep);
nlohmann::json verdict_json(const ConvergenceVerdict& v);
nlohmann::json rate_json(const RateFit& f);

/// Summary written next to a trace: oracle data, final errors, verdict and
/// excitation analysis.
nlohmann::json run_report(const Scenario& s, const SimulationTrace& trace);

struct SimulateOptions {
  std::string scenario_path;
  std::string out_dir;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<LawSelection> law;
};

int cmd_simulate(const SimulateOptions& opts, std::ostream& log);
int cmd_oracle(const std::string& scenario_path, std::ostream& out, std::ostream& log);
int cmd_check_fe(const std::string& trace_path, const std::optional<std::string>& scenario_path,
                 std::ostream& out, std::ostream& log);
int cmd_compare_laws(const std::string& scenario_path, const std::string& out_dir, std::ostream& log);

}  // namespace appc
