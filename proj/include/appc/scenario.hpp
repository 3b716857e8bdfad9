#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "appc/simulation.hpp"

namespace appc {

/// Malformed JSON; carries the 1-based position of the failure.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : std::runtime_error(what), line_(line), column_(column) {}
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_, column_;
};

/// Well-formed JSON that breaks a scenario invariant; `invariant` names it.
class ValidationError : public std::invalid_argument {
 public:
  ValidationError(const std::string& invariant, const std::string& what)
      : std::invalid_argument(invariant + ": " + what), invariant_(invariant) {}
  const std::string& invariant() const noexcept { return invariant_; }

 private:
  std::string invariant_;
};

enum class LawSelection { memory, baseline, both };

std::string to_string(LawSelection law);

struct Scenario {
  std::string name;
  PlantModel plant;
  // Set when the plant was given as chained-integrator rows; kept for round trips.
  std::optional<StrictFeedbackRows> strict_feedback;
  ModalModel modal;
  EstimatorConfig estimator;
  Mat theta0;
  ReferenceSignal reference;
  SimConfig sim;
  LawSelection law = LawSelection::memory;
  std::optional<Mat> xref0;
  std::vector<std::string> warnings;  // design requirements that do not hold

  ClosedLoopProblem problem(AdaptiveLaw law) const;
  bool operator==(const Scenario&) const = default;
};

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

/// Parses and validates. Throws ParseError or ValidationError.
Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::string& path);
void save_scenario(const std::string& path, const Scenario& s);

/// The plant, modal model and tuning of the published benchmark.
Scenario benchmark_scenario();

nlohmann::json mat_to_json(const Mat& m);

}  // namespace appc
