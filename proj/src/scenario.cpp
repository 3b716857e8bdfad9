#include "appc/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace appc {

using nlohmann::json;

namespace {

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

const json& require(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ValidationError(where + "." + key, "missing required field");
  }
  return obj.at(key);
}

double number(const json& v, const std::string& where) {
  if (!v.is_number()) throw ValidationError(where, "expected a number");
  return v.get<double>();
}

double number_or(const json& obj, const char* key, double fallback, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) return fallback;
  return number(obj.at(key), where + "." + key);
}

Mat matrix(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ValidationError(where, "expected a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const json& row = v[i];
    if (!row.is_array() || row.empty()) throw ValidationError(where, "each row must be a non-empty array");
    std::vector<double> r;
    for (std::size_t j = 0; j < row.size(); ++j) {
      r.push_back(number(row[j], where + "[" + std::to_string(i) + "][" + std::to_string(j) + "]"));
    }
    if (!rows.empty() && r.size() != rows.front().size())
      throw ValidationError(where, "rows have different lengths");
    rows.push_back(std::move(r));
  }
  return Mat::from_rows(rows);
}

Mat column(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) throw ValidationError(where, "expected a non-empty array");
  std::vector<double> c;
  for (std::size_t i = 0; i < v.size(); ++i) c.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
  return Mat::column(c);
}

json column_to_json(const Mat& m) { return json(std::vector<double>(m.data().begin(), m.data().end())); }

LawSelection parse_selection(const std::string& s) {
  if (s == "memory") return LawSelection::memory;
  if (s == "baseline") return LawSelection::baseline;
  if (s == "both") return LawSelection::both;
  throw ValidationError("law", "expected memory, baseline or both, got '" + s + "'");
}

void check_dimensions(const Scenario& s) {
  const std::size_t n = s.plant.n();
  auto col = [n](const Mat& m, std::size_t len, const char* what) {
    if (m.rows() != len || m.cols() != 1)
      throw ValidationError(what, "expected " + std::to_string(len) + " entries");
  };
  if (!s.plant.A.is_square()) throw ValidationError("plant.A", "must be square");
  col(s.plant.B, n, "plant.B");
  col(s.plant.h, n, "plant.h");
  col(s.plant.x0, n, "plant.x0");
  if (s.modal.Gamma.rows() != n || s.modal.Gamma.cols() != n)
    throw ValidationError("modal.Gamma", "must be n x n with n = " + std::to_string(n));
  col(s.modal.chi0, n, "modal.chi0");
  col(s.theta0, n + 1, "theta0");
  if (s.xref0) col(*s.xref0, n, "xref0");
}

}  // namespace

std::string to_string(LawSelection law) {
  switch (law) {
    case LawSelection::memory:
      return "memory";
    case LawSelection::baseline:
      return "baseline";
    case LawSelection::both:
      return "both";
  }
  return "memory";
}

ClosedLoopProblem Scenario::problem(AdaptiveLaw which) const {
  return {plant, modal, ControllerParams{theta0}, reference, estimator, which, xref0};
}

Scenario scenario_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("scenario", "top level must be an object");
  Scenario s{.name = j.value("name", std::string("scenario")),
             .plant = {Mat(1, 1), Mat(1, 1), Mat(1, 1), Mat(1, 1)},
             .strict_feedback = std::nullopt,
             .modal = {Mat(1, 1), Mat(1, 1)},
             .estimator = {},
             .theta0 = Mat(1, 1),
             .reference = {},
             .sim = {},
             .law = LawSelection::memory,
             .xref0 = std::nullopt,
             .warnings = {}};
  try {
    const json& p = require(j, "plant", "scenario");
    const bool rows_form = p.contains("w") || p.contains("b");
    const bool matrix_form = p.contains("A") || p.contains("B");
    if (rows_form && matrix_form) throw ValidationError("plant", "give either {w, b} or {A, B}, not both");
    if (rows_form) {
      const json& w = require(p, "w", "plant");
      const double b = number(require(p, "b", "plant"), "plant.b");
      if (!w.is_array() || w.empty()) throw ValidationError("plant.w", "expected an array of rows");
      std::vector<Mat> rows;
      for (std::size_t i = 0; i < w.size(); ++i) rows.push_back(column(w[i], "plant.w[" + std::to_string(i) + "]"));
      for (const Mat& r : rows) {
        if (r.size() != rows.size()) throw ValidationError("plant.w", "each row needs n entries");
      }
      if (b == 0.0) throw ValidationError("plant.b", "input gain must be nonzero");
      auto ab = assemble_strict_feedback(rows, b);
      s.plant.A = std::move(ab.A);
      s.plant.B = std::move(ab.B);
      s.strict_feedback = StrictFeedbackRows{std::move(rows), b};
    } else {
      s.plant.A = matrix(require(p, "A", "plant"), "plant.A");
      s.plant.B = column(require(p, "B", "plant"), "plant.B");
    }
    s.plant.h = column(require(p, "h", "plant"), "plant.h");
    s.plant.x0 = column(require(p, "x0", "plant"), "plant.x0");

    const json& m = require(j, "modal", "scenario");
    s.modal.Gamma = matrix(require(m, "Gamma", "modal"), "modal.Gamma");
    s.modal.chi0 = m.contains("chi0") ? column(m.at("chi0"), "modal.chi0") : Mat(s.modal.Gamma.rows(), 1);

    const json est = j.value("estimator", json::object());
    EstimatorConfig& e = s.estimator;
    e.l = number_or(est, "l", e.l, "estimator");
    e.k = number_or(est, "k", e.k, "estimator");
    e.sigma = number_or(est, "sigma", e.sigma, "estimator");
    e.schedule.gamma0 = number_or(est, "gamma0", e.schedule.gamma0, "estimator");
    e.schedule.gamma1 = number_or(est, "gamma1", e.schedule.gamma1, "estimator");
    e.schedule.eps_omega = number_or(est, "eps_omega", e.schedule.eps_omega, "estimator");
    e.phi_rel_floor = number_or(est, "phi_rel_floor", e.phi_rel_floor, "estimator");
    e.baseline_gamma = number_or(est, "baseline_gamma", e.baseline_gamma, "estimator");
    e.baseline_rescale_log10 = number_or(est, "baseline_rescale_log10", e.baseline_rescale_log10, "estimator");

    s.theta0 = column(require(j, "theta0", "scenario"), "theta0");

    if (j.contains("reference")) {
      const json& r = j.at("reference");
      s.reference.steps.clear();
      if (r.contains("steps")) {
        for (const json& bp : r.at("steps")) {
          if (!bp.is_array() || bp.size() != 2) throw ValidationError("reference.steps", "each breakpoint is [time, value]");
          s.reference.steps.emplace_back(number(bp[0], "reference.steps"), number(bp[1], "reference.steps"));
        }
      }
      if (r.contains("sines")) {
        for (const json& sn : r.at("sines")) {
          s.reference.sines.push_back({number(require(sn, "amplitude", "reference.sines"), "reference.sines.amplitude"),
                                       number(require(sn, "angular_freq", "reference.sines"), "reference.sines.angular_freq"),
                                       number_or(sn, "phase", 0.0, "reference.sines")});
        }
      }
    }

    const json sim = j.value("sim", json::object());
    s.sim.dt = number_or(sim, "dt", s.sim.dt, "sim");
    s.sim.t_end = number_or(sim, "t_end", s.sim.t_end, "sim");
    const double stride = number_or(sim, "record_stride", static_cast<double>(s.sim.record_stride), "sim");
    if (!(stride >= 1.0) || stride != std::floor(stride)) throw ValidationError("sim.record_stride", "must be an integer >= 1");
    s.sim.record_stride = static_cast<std::size_t>(stride);

    if (j.contains("law")) {
      if (!j.at("law").is_string()) throw ValidationError("law", "expected a string");
      s.law = parse_selection(j.at("law").get<std::string>());
    }
    if (j.contains("xref0")) s.xref0 = column(j.at("xref0"), "xref0");
  } catch (const DimensionError& e) {
    throw ValidationError("dimensions", e.what());
  } catch (const InvalidPlantError& e) {
    throw ValidationError("plant.b", e.what());
  }

  check_dimensions(s);
  auto wrap = [](const char* invariant, auto&& fn) {
    try {
      fn();
    } catch (const ValidationError&) {
      throw;
    } catch (const std::invalid_argument& e) {
      throw ValidationError(invariant, e.what());
    }
  };
  wrap("theta0", [&] { ControllerParams{s.theta0}.validate(s.plant.n()); });
  wrap("estimator", [&] { s.estimator.validate(); });
  wrap("sim", [&] { s.sim.validate(); });
  wrap("reference", [&] { s.reference.validate(); });
  s.warnings = design_warnings(s.plant, s.modal);
  return s;
}

json mat_to_json(const Mat& m) { return json(m.to_rows()); }

json scenario_to_json(const Scenario& s) {
  json plant;
  if (s.strict_feedback) {
    json w = json::array();
    for (const Mat& r : s.strict_feedback->w) w.push_back(column_to_json(r));
    plant["w"] = w;
    plant["b"] = s.strict_feedback->b;
  } else {
    plant["A"] = mat_to_json(s.plant.A);
    plant["B"] = column_to_json(s.plant.B);
  }
  plant["h"] = column_to_json(s.plant.h);
  plant["x0"] = column_to_json(s.plant.x0);

  const EstimatorConfig& e = s.estimator;
  json ref;
  ref["steps"] = json::array();
  for (const auto& [t, v] : s.reference.steps) ref["steps"].push_back({t, v});
  if (!s.reference.sines.empty()) {
    ref["sines"] = json::array();
    for (const auto& sn : s.reference.sines) {
      ref["sines"].push_back({{"amplitude", sn.amplitude}, {"angular_freq", sn.angular_freq}, {"phase", sn.phase}});
    }
  }
  json j = {
      {"name", s.name},
      {"plant", plant},
      {"modal", {{"Gamma", mat_to_json(s.modal.Gamma)}, {"chi0", column_to_json(s.modal.chi0)}}},
      {"estimator",
       {{"l", e.l},
        {"k", e.k},
        {"sigma", e.sigma},
        {"gamma0", e.schedule.gamma0},
        {"gamma1", e.schedule.gamma1},
        {"eps_omega", e.schedule.eps_omega},
        {"phi_rel_floor", e.phi_rel_floor},
        {"baseline_gamma", e.baseline_gamma},
        {"baseline_rescale_log10", e.baseline_rescale_log10}}},
      {"theta0", column_to_json(s.theta0)},
      {"reference", ref},
      {"sim", {{"dt", s.sim.dt}, {"t_end", s.sim.t_end}, {"record_stride", s.sim.record_stride}}},
      {"law", to_string(s.law)},
  };
  if (s.xref0) j["xref0"] = column_to_json(*s.xref0);
  return j;
}

Scenario parse_scenario(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ParseError("scenario JSON parse error at line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ": " + e.what(),
                     line, col);
  }
  return scenario_from_json(j);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open scenario '" + path + "'");
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_scenario(ss.str());
}

void save_scenario(const std::string& path, const Scenario& s) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
  f << scenario_to_json(s).dump(2) << '\n';
}

Scenario benchmark_scenario() {
  return scenario_from_json(json::parse(R"({
    "name": "benchmark",
    "plant": {"w": [[5, -3], [4, 2]], "b": 2, "h": [1, 0], "x0": [0, -1]},
    "modal": {"Gamma": [[-4, 1], [-8, 0]], "chi0": [0, 0]},
    "estimator": {"l": 1, "k": 10, "sigma": 5, "gamma0": 1, "gamma1": 0},
    "theta0": [0, 0, 2],
    "reference": {"steps": [[0, 1]]},
    "sim": {"dt": 1e-4, "t_end": 30, "record_stride": 10},
    "law": "memory"
  })"));
}

}  // namespace appc
