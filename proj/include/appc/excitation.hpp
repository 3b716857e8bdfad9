#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "appc/matrix.hpp"
#include "appc/simulation.hpp"

namespace appc {

/// Not enough samples in the requested window, or no qualifying interval.
class ExcitationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
std::vector<double> symmetric_eigenvalues(const Mat& s);

/// Trapezoidal integral of v^2 over samples with t in [t0, t1].
double fe_level_scalar(const std::vector<double>& t, const std::vector<double>& v, double t0, double t1);

/// Smallest eigenvalue of the trapezoidal Gram integral of the vector samples
/// over [t0, t1].
double fe_level_vector(const std::vector<double>& t, const std::vector<std::vector<double>>& v,
                       double t0, double t1);

/// Sliding-window excitation level: one entry per window start t_i with
/// t_i + window <= t.back(), evaluated every `start_stride` samples.
struct WindowedLevel {
  std::vector<double> t_start;
  std::vector<double> alpha;
};

WindowedLevel pe_check_windowed_serial(const std::vector<double>& t,
                                       const std::vector<std::vector<double>>& v, double window,
                                       std::size_t start_stride = 1);
/// Same result as the serial version; window starts are spread over OpenMP threads.
WindowedLevel pe_check_windowed(const std::vector<double>& t, const std::vector<std::vector<double>>& v,
                                double window, std::size_t start_stride = 1);

/// log10 of the trapezoidal integral of 10^(log10_values) over [i0, i1]
/// (sample indices, inclusive). Entries may be -inf.
double log10_trapezoid(const std::vector<double>& t, const std::vector<double>& log10_values,
                       std::size_t i0, std::size_t i1);

/// Smallest recorded t after which (dOmega/dt)/Omega stays below rel_tol.
/// Empty when Omega never becomes positive.
std::optional<double> detect_excitation_end(const SimulationTrace& trace, double rel_tol = 1e-9);

/// First recorded time with Omega > 0.
std::optional<double> detect_adaptation_onset(const SimulationTrace& trace);

struct IntegralBoundCheck {
  double t_peak = 0.0;  // where phi^2 peaks inside the excitation window
  double beta = 0.0;    // phi^2 at t_peak
  double t_a = 0.0, t_b = 0.0;
  double alpha = 0.0;         // measured integral of phi^2 over [t_a, t_b]
  double log10_lhs_sub = 0.0;   // log10 integral of Delta^2 over [t_a, t_b]
  double log10_lhs_full = 0.0;  // same over [0, t_e]
  double log10_bound = 0.0;     // log10 of C^2 (t_b - t_a) (alpha / (t_b - t_a))^(2q)
  bool holds = false;
  // Same with exponent q; Jensen makes this the sharp form, equal for constant phi.
  double log10_bound_sharp = 0.0;
  bool holds_sharp = false;
};

/// Locates a neighbourhood of the phi^2 peak inside [t_start, t_e] on which
/// phi^2 >= beta / 2 and the regression is live, then compares both sides of
/// the bound in the log domain. Throws ExcitationError when phi vanishes.
IntegralBoundCheck integral_bound_check(const SimulationTrace& trace, int q, double log10_abs_C, double t_e);

/// Estimate of log10|C| as the median of log10|Delta| - q log10|phi| over live samples.
std::optional<double> estimate_log10_C(const SimulationTrace& trace, int q);

struct RateFit {
  double slope = 0.0;  // d ln(value) / dt
  double intercept = 0.0;
  std::size_t samples = 0;
  double t_from = 0.0, t_to = 0.0;
  double floor = 0.0;  // samples at or below this were excluded
  bool degenerate = true;
  std::string window;  // "excitation_end" or "adaptation_onset"
};

/// Least squares line through ln(values) over samples with t >= t_from and
/// value > floor, where floor = max(abs_floor, floor_factor * min value in range).
/// Degenerate with fewer than 3 usable samples.
RateFit fit_log_rate(const std::vector<double>& t, const std::vector<double>& values, double t_from,
                     double abs_floor = 1e-10, double floor_factor = 10.0);

struct MonotonicityCheck {
  bool monotone = true;
  double max_violation = 0.0;
  std::vector<double> per_component;
};

/// |theta_err_i(t_a)| <= |theta_err_i(t_b)| + slack for all t_a >= t_b.
MonotonicityCheck check_monotone(const SimulationTrace& trace, double slack = 1e-9);

struct ConvergenceVerdict {
  MonotonicityCheck monotonicity;
  double sup_xi = 0.0;
  bool bounded = false;
  RateFit theta_rate;
  RateFit xi_rate;
  bool converging = false;
};

/// Requires oracle columns in the trace.
ConvergenceVerdict convergence_verdict(const SimulationTrace& trace, std::optional<double> t_e);

struct OmegaChecks {
  bool starts_at_zero = false;
  bool nondecreasing = false;
  double max_relative_drop = 0.0;
  bool bounded = false;
  std::optional<double> log10_lower;  // min over [t_e, t_end]
  std::optional<double> log10_upper;  // max over [t_e, t_end]
};

OmegaChecks omega_checks(const SimulationTrace& trace, std::optional<double> t_e);

struct GrowthEnvelope {
  double log10_c1 = 0.0;
  double c2 = 0.0;  // natural-log rate
  bool condition_met = true;  // sigma > 2 c2
  bool available = false;
};

/// |Delta| <= c1 exp(c2 t): c2 from a line fit of ln|Delta| after its peak, c1 the tightest cover.
GrowthEnvelope growth_envelope(const SimulationTrace& trace, std::optional<double> sigma);

struct SignalExcitation {
  std::string name;
  std::size_t dim = 0;
  double alpha = 0.0;  // for Delta this is log10 of the integral
  bool log10 = false;
};

struct ExcitationReport {
  double t_r_plus = 0.0;
  std::optional<double> t_e;
  std::optional<double> t_onset;
  bool fe_satisfied = false;
  double alpha = 0.0;  // FE level of phi over [t_r_plus, t_e]
  std::vector<SignalExcitation> signals;
  OmegaChecks omega;
  GrowthEnvelope growth;
  std::optional<IntegralBoundCheck> integral_bound;
  std::string bound_skipped;
  std::optional<double> log10_C;
  std::string log10_C_source;  // "oracle" or "trace"
  int q = 0;
  double pe_window = 1.0;
  double pe_alpha_min = 0.0, pe_alpha_max = 0.0, pe_alpha_last = 0.0;
  double drem_residual_max = 0.0;
  std::vector<std::string> warnings;
};

struct AnalysisOptions {
  std::optional<double> log10_abs_C;  // from the oracle; estimated from the trace otherwise
  std::optional<double> sigma;        // enables the growth-condition check
  double pe_window = 1.0;
  std::size_t pe_start_stride = 10;
};

ExcitationReport analyze_excitation(const SimulationTrace& trace, const AnalysisOptions& opts);

}  // namespace appc
