#pragma once

#include <random>
#include <vector>

#include "appc/matrix.hpp"
#include "appc/models.hpp"
#include "appc/simulation.hpp"
#include "oracles.hpp"

namespace fixtures {

appc::Mat to_mat(const ref::Rows& rows);
ref::Rows to_rows(const appc::Mat& m);

/// The published plant / modal model / tuning as a closed-loop problem.
appc::ClosedLoopProblem benchmark_problem();

/// Benchmark run at dt = 1e-4 over 30 s, computed once per process.
const appc::SimulationTrace& benchmark_trace();

/// Random strict-feedback plant with b != 0 and an observer-form Gamma with
/// distinct negative real poles; redrawn until the design checks pass.
struct RandomDesign {
  appc::PlantModel plant;
  appc::ModalModel modal;
};
RandomDesign random_design(std::mt19937_64& rng, std::size_t n);

}  // namespace fixtures
