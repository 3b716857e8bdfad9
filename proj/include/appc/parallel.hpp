#pragma once

#include <exception>
#include <optional>
#include <string>
#include <vector>

#include "appc/simulation.hpp"

namespace appc {

/// Outcome of one run in a batch; exactly one of trace/error is set.
struct BatchResult {
  std::optional<SimulationTrace> trace;
  std::exception_ptr error;
  std::string error_message;
};

/// Runs each problem in turn. Failures are captured per item.
std::vector<BatchResult> run_batch_serial(const std::vector<ClosedLoopProblem>& problems,
                                          const SimConfig& sim);

/// Same results as run_batch_serial, one problem per OpenMP thread.
std::vector<BatchResult> run_batch(const std::vector<ClosedLoopProblem>& problems, const SimConfig& sim);

}  // namespace appc
