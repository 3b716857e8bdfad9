#include "fixtures.hpp"

#include <cmath>

#include "appc/oracle.hpp"
#include "appc/scenario.hpp"

namespace fixtures {

appc::Mat to_mat(const ref::Rows& rows) { return appc::Mat::from_rows(rows); }

ref::Rows to_rows(const appc::Mat& m) { return m.to_rows(); }

appc::ClosedLoopProblem benchmark_problem() {
  return appc::benchmark_scenario().problem(appc::AdaptiveLaw::memory);
}

const appc::SimulationTrace& benchmark_trace() {
  static const appc::SimulationTrace trace = [] {
    appc::SimConfig sim;
    sim.dt = 1e-4;
    sim.t_end = 30.0;
    sim.record_stride = 10;
    return appc::run_closed_loop(benchmark_problem(), sim);
  }();
  return trace;
}

RandomDesign random_design(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> coef(-3.0, 3.0);
  std::uniform_real_distribution<double> gain(0.5, 3.0);
  std::uniform_real_distribution<double> pole(0.5, 6.0);
  for (;;) {
    std::vector<appc::Mat> w;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> wi(n);
      for (auto& v : wi) v = coef(rng);
      w.push_back(appc::Mat::column(wi));
    }
    const double b = (rng() % 2 ? 1.0 : -1.0) * gain(rng);
    const auto ab = appc::assemble_strict_feedback(w, b);

    std::vector<double> roots(n);
    for (auto& r : roots) r = -pole(rng);
    bool distinct = true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j)
        if (std::abs(roots[i] - roots[j]) < 0.3) distinct = false;
    if (!distinct) continue;

    std::vector<double> h(n, 0.0);
    h[0] = 1.0;
    RandomDesign d{appc::PlantModel{ab.A, ab.B, appc::Mat::column(h), appc::Mat::zeros(n, 1)},
                   appc::ModalModel{to_mat(ref::companion(ref::poly_from_roots(roots))), appc::Mat::zeros(n, 1)}};
    if (!appc::design_warnings(d.plant, d.modal).empty()) continue;
    // Keep M and A_sigma comfortably nonsingular.
    try {
      const auto ideal = appc::solve_ideal(d.plant, d.modal);
      if (std::abs(appc::det(ideal.M)) < 1e-3) continue;
    } catch (const std::exception&) {
      continue;
    }
    return d;
  }
}

}  // namespace fixtures
