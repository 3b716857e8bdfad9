#pragma once

#include <span>

#include "appc/matrix.hpp"

namespace appc {

struct MemoryDerivatives {
  Mat d_upsilon;
  double d_omega;
};

/// dUpsilon = exp(-sigma t) Delta Y, dOmega = exp(-sigma t) Delta^2.
MemoryDerivatives memory_rhs(double Delta, const Mat& Y, double t, double sigma);

struct GainSchedule {
  double gamma0 = 1.0;
  double gamma1 = 0.0;
  double eps_omega = 1e-30;  // |Omega| at or below this counts as zero

  void validate() const;
  bool operator==(const GainSchedule&) const = default;
};

/// 0 when Omega is (numerically) zero, otherwise (gamma0 |omega|^2 + gamma1) / Omega^2.
double gain(double Omega, const Mat& omega_reg, const GainSchedule& sched);

/// -gamma Omega (Omega theta_hat - Upsilon)
Mat memory_law_rhs(const Mat& theta_hat, double Omega, const Mat& Upsilon, double gamma);

/// -gamma Delta (Delta theta_hat - Y)
Mat baseline_law_rhs(const Mat& theta_hat, double Delta, const Mat& Y, double gamma);

/// The memory law with the scheduled gain substituted:
/// -(gamma0 |omega|^2 + gamma1) (theta_hat - Upsilon / Omega).
/// Omega and Upsilon may share any common positive factor, so scaled
/// mantissas can be passed directly.
Mat scheduled_memory_law_rhs(const Mat& theta_hat, double Omega, const Mat& Upsilon,
                             const Mat& omega_reg, const GainSchedule& sched);

/**
 * Shared exponent for the memory integrals: the true values are
 * exp(log_factor()) * (Omega_m, Upsilon_m). The exponent follows the size of
 * the integrand so the mantissas stay representable even when Delta^2 is far
 * below the smallest double.
 */
class MemoryScale {
 public:
  bool active() const { return active_; }
  double log_factor() const { return log_factor_; }

  /// exp(-sigma t + 2 log_scale - E); the factor turning Delta_m^2 into dOmega_m.
  double integrand_weight(double t, double sigma, double log_scale) const;

  /// Called between integration steps. `log_abs_delta` is ln|Delta| of the
  /// current true regressor (-inf if zero). Rescales the mantissas in place.
  void renormalize(double t, double sigma, double log_abs_delta, double& omega_m,
                   std::span<double> upsilon_m);

  /// ln of the true Omega, -inf when nothing has been accumulated.
  double log_omega(double omega_m) const;

 private:
  bool active_ = false;
  double log_factor_ = 0.0;
};

}  // namespace appc
