#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "appc/adaptation.hpp"
#include "appc/integrator.hpp"
#include "appc/models.hpp"
#include "appc/oracle.hpp"
#include "appc/parameterization.hpp"

namespace appc {

struct SimConfig {
  double dt = 1e-4;
  double t_end = 30.0;
  std::size_t record_stride = 10;

  void validate() const;
  bool operator==(const SimConfig&) const = default;
};

struct EstimatorConfig {
  double l = 1.0;      // state filter pole
  double k = 10.0;     // DREM filter pole
  double sigma = 5.0;  // memory forgetting rate
  GainSchedule schedule;
  // The DREM Gram filter is treated as singular (phi := 0) while
  // det(H) / prod(H_ii) is below this; early on det(H) is pure roundoff.
  double phi_rel_floor = 1e-8;
  double baseline_gamma = 1.0;
  // Common factor 10^x applied to (Y, Delta) in the baseline law only.
  double baseline_rescale_log10 = 0.0;

  void validate() const;
  bool operator==(const EstimatorConfig&) const = default;
};

enum class AdaptiveLaw { memory, baseline };

std::string to_string(AdaptiveLaw law);
AdaptiveLaw parse_law(const std::string& name);

/// r(t): piecewise-constant breakpoints plus optional sinusoids.
struct ReferenceSignal {
  struct Sine {
    double amplitude;
    double angular_freq;  // rad/s
    double phase = 0.0;
    bool operator==(const Sine&) const = default;
  };
  std::vector<std::pair<double, double>> steps{{0.0, 1.0}};  // (time, value), sorted by time
  std::vector<Sine> sines;

  double operator()(double t) const;
  void validate() const;
  static ReferenceSignal constant(double value);
  bool operator==(const ReferenceSignal&) const = default;
};

struct ClosedLoopProblem {
  PlantModel plant;
  ModalModel modal;
  ControllerParams controller;
  ReferenceSignal reference;
  EstimatorConfig estimator;
  AdaptiveLaw law = AdaptiveLaw::memory;
  std::optional<Mat> xref0;  // defaults to plant.x0
};

/// Offsets of each block inside the flat state vector.
struct StateLayout {
  explicit StateLayout(std::size_t n);

  std::size_t n;
  std::size_t x, xref, phi_bar, h_pp, h_pz, upsilon, omega, theta, size;
};

struct TraceSample {
  double t = 0.0;
  std::vector<double> x, xref, eref;
  double u = 0.0, u_star = 0.0, r = 0.0;
  std::vector<double> theta, theta_err;
  std::vector<double> phi_bar_state;
  double decay = 1.0;    // exp(-l t), last entry of the filtered regressor
  double phi = 0.0;      // det of the DREM Gram filter, before gating
  double phi_rel = 0.0;  // Hadamard ratio of the Gram filter
  // True Delta = Delta * 10^Delta_scale_log10; same for Omega and Upsilon.
  double Delta = 0.0, Delta_scale_log10 = 0.0;
  double Omega = 0.0, Omega_scale_log10 = 0.0;
  double Omega_rate = 0.0;  // (dOmega/dt) / Omega
  std::vector<double> Upsilon;
  double Delta_M = 0.0, Delta_x = 0.0, Delta_r = 0.0;  // scaled intermediates
  double zA_res = 0.0, zB_res = 0.0;  // DREM residuals, relative

  double theta_err_norm() const;
  double xi_norm() const;
  /// log10 |Delta|, -inf when Delta == 0.
  double log10_abs_delta() const;
  double log10_omega() const;
};

struct SimulationTrace {
  std::size_t n = 0;
  AdaptiveLaw law = AdaptiveLaw::memory;
  bool has_oracle = false;
  std::vector<double> theta_star;
  std::vector<TraceSample> samples;
  std::vector<std::string> warnings;
};

/// Runs plant, reference model, filters, memory and adaptive law together
/// with fixed-step RK4. Throws DivergenceError when any physical state leaves
/// |.| <= 1e9 or any state becomes non-finite.
SimulationTrace run_closed_loop(const ClosedLoopProblem& problem, const SimConfig& sim);

}  // namespace appc
