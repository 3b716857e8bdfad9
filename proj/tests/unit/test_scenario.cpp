#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "appc/scenario.hpp"

using nlohmann::json;

namespace {

json benchmark_json() { return appc::scenario_to_json(appc::benchmark_scenario()); }

std::string invariant_of(const json& j) {
  try {
    appc::scenario_from_json(j);
  } catch (const appc::ValidationError& e) {
    return e.invariant();
  }
  return "";
}

}  // namespace

TEST(Scenario, BenchmarkAssemblesPlant) {
  const appc::Scenario s = appc::benchmark_scenario();
  EXPECT_EQ(s.plant.A.to_rows(), (std::vector<std::vector<double>>{{5, -2}, {4, 2}}));
  EXPECT_EQ(s.plant.B.to_rows(), (std::vector<std::vector<double>>{{0}, {2}}));
  EXPECT_EQ(s.theta0.to_rows(), (std::vector<std::vector<double>>{{0}, {0}, {2}}));
  EXPECT_EQ(s.law, appc::LawSelection::memory);
  EXPECT_TRUE(s.warnings.empty());
}

TEST(Scenario, ShippedFileMatchesBuiltIn) {
  const appc::Scenario file = appc::load_scenario(APPC_SCENARIO_DIR "/benchmark.json");
  appc::Scenario builtin = appc::benchmark_scenario();
  builtin.estimator.schedule.eps_omega = file.estimator.schedule.eps_omega;
  builtin.estimator.phi_rel_floor = file.estimator.phi_rel_floor;
  EXPECT_EQ(file, builtin);
}

TEST(Scenario, RoundTripIsIdentity) {
  const appc::Scenario s = appc::benchmark_scenario();
  EXPECT_EQ(appc::parse_scenario(appc::scenario_to_json(s).dump()), s);

  json j = benchmark_json();
  j["plant"] = {{"A", {{1, 2}, {0, -3}}}, {"B", {0, 1}}, {"h", {1, 0}}, {"x0", {0.5, 0}}};
  j["reference"]["sines"] = {{{"amplitude", 0.5}, {"angular_freq", 2.0}, {"phase", 0.1}}};
  j["xref0"] = {0, 0};
  j["law"] = "both";
  const appc::Scenario t = appc::scenario_from_json(j);
  EXPECT_FALSE(t.strict_feedback.has_value());
  EXPECT_EQ(appc::scenario_from_json(appc::scenario_to_json(t)), t);

  const auto path = std::filesystem::temp_directory_path() / "appc_scenario_roundtrip.json";
  appc::save_scenario(path.string(), t);
  EXPECT_EQ(appc::load_scenario(path.string()), t);
  std::filesystem::remove(path);
}

TEST(Scenario, DefaultsFillOptionalBlocks) {
  json j = benchmark_json();
  j.erase("estimator");
  j.erase("sim");
  j.erase("law");
  j.erase("reference");
  j["modal"].erase("chi0");
  const appc::Scenario s = appc::scenario_from_json(j);
  EXPECT_EQ(s.estimator, appc::EstimatorConfig{});
  EXPECT_EQ(s.sim, appc::SimConfig{});
  EXPECT_EQ(s.law, appc::LawSelection::memory);
  EXPECT_DOUBLE_EQ(s.reference(3.0), 1.0);
  EXPECT_EQ(s.modal.chi0.size(), 2u);
}

TEST(Scenario, MissingFieldsNamed) {
  json j = benchmark_json();
  j["plant"].erase("b");
  EXPECT_EQ(invariant_of(j), "plant.b");

  j = benchmark_json();
  j.erase("theta0");
  EXPECT_EQ(invariant_of(j), "scenario.theta0");

  j = benchmark_json();
  j["plant"].erase("h");
  EXPECT_EQ(invariant_of(j), "plant.h");
}

TEST(Scenario, InvalidValuesRejected) {
  json j = benchmark_json();
  j["plant"]["b"] = 0;
  EXPECT_EQ(invariant_of(j), "plant.b");

  j = benchmark_json();
  j["plant"]["A"] = {{5, -2}, {4, 2}};
  j["plant"]["B"] = {0, 2};
  EXPECT_EQ(invariant_of(j), "plant");

  j = benchmark_json();
  j["theta0"] = {0, 0, 0};  // zero feedforward gain
  EXPECT_EQ(invariant_of(j), "theta0");

  j = benchmark_json();
  j["theta0"] = {0, 2};
  EXPECT_FALSE(invariant_of(j).empty());

  j = benchmark_json();
  j["modal"]["Gamma"] = {{-4, 1, 0}, {-8, 0, 0}, {0, 0, -1}};
  EXPECT_FALSE(invariant_of(j).empty());

  j = benchmark_json();
  j["law"] = "gradient";
  EXPECT_EQ(invariant_of(j), "law");

  j = benchmark_json();
  j["sim"]["record_stride"] = 2.5;
  EXPECT_EQ(invariant_of(j), "sim.record_stride");

  j = benchmark_json();
  j["sim"]["dt"] = -1e-3;
  EXPECT_EQ(invariant_of(j), "sim");

  j = benchmark_json();
  j["estimator"]["gamma0"] = 0.5;
  EXPECT_EQ(invariant_of(j), "estimator");

  j = benchmark_json();
  j["estimator"]["k"] = "fast";
  EXPECT_FALSE(invariant_of(j).empty());
}

TEST(Scenario, ParseErrorReportsPosition) {
  const std::string text = "{\n  \"name\": \"x\",\n  \"plant\": [1, 2,\n}\n";
  try {
    appc::parse_scenario(text);
    FAIL() << "expected ParseError";
  } catch (const appc::ParseError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_EQ(e.column(), 1u);
    EXPECT_NE(std::string(e.what()).find("line 4"), std::string::npos);
  }
}

TEST(Scenario, MissingFileThrows) {
  EXPECT_THROW(appc::load_scenario("/nonexistent/appc.json"), std::runtime_error);
}

TEST(Scenario, ProblemCarriesSelectedLaw) {
  const appc::Scenario s = appc::benchmark_scenario();
  const appc::ClosedLoopProblem p = s.problem(appc::AdaptiveLaw::baseline);
  EXPECT_EQ(p.law, appc::AdaptiveLaw::baseline);
  EXPECT_EQ(p.plant.A, s.plant.A);
  EXPECT_EQ(p.controller.theta_hat, s.theta0);
}
