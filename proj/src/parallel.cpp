#include "appc/parallel.hpp"

namespace appc {

namespace {

BatchResult run_one(const ClosedLoopProblem& problem, const SimConfig& sim) {
  BatchResult r;
  try {
    r.trace = run_closed_loop(problem, sim);
  } catch (const std::exception& e) {
    r.error = std::current_exception();
    r.error_message = e.what();
  }
  return r;
}

}  // namespace

std::vector<BatchResult> run_batch_serial(const std::vector<ClosedLoopProblem>& problems,
                                          const SimConfig& sim) {
  std::vector<BatchResult> out;
  out.reserve(problems.size());
  for (const auto& p : problems) out.push_back(run_one(p, sim));
  return out;
}

std::vector<BatchResult> run_batch(const std::vector<ClosedLoopProblem>& problems, const SimConfig& sim) {
  std::vector<BatchResult> out(problems.size());
  const auto count = static_cast<std::ptrdiff_t>(problems.size());
  // Each run owns its state; only the immutable inputs are shared.
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    out[static_cast<std::size_t>(i)] = run_one(problems[static_cast<std::size_t>(i)], sim);
  }
  return out;
}

}  // namespace appc
