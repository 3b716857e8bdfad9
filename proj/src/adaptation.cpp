#include "appc/adaptation.hpp"

#include <cmath>
#include <limits>

namespace appc {

namespace {

// Rescale once the integrand has outgrown the stored exponent by e^30.
constexpr double kExponentSlack = 30.0;
constexpr double kMantissaCap = 1e6;

}  // namespace

MemoryDerivatives memory_rhs(double Delta, const Mat& Y, double t, double sigma) {
  const double w = std::exp(-sigma * t);
  return {Y * (w * Delta), w * Delta * Delta};
}

void GainSchedule::validate() const {
  if (!(gamma0 >= 1.0)) throw std::invalid_argument("gain schedule: gamma0 must be >= 1");
  if (!(gamma1 >= 0.0)) throw std::invalid_argument("gain schedule: gamma1 must be >= 0");
  if (!(eps_omega >= 0.0)) throw std::invalid_argument("gain schedule: eps_omega must be >= 0");
}

double gain(double Omega, const Mat& omega_reg, const GainSchedule& sched) {
  if (std::abs(Omega) <= sched.eps_omega) return 0.0;
  // Largest eigenvalue of the rank-one omega omega^T is omega^T omega.
  return (sched.gamma0 * dot(omega_reg, omega_reg) + sched.gamma1) / (Omega * Omega);
}

Mat memory_law_rhs(const Mat& theta_hat, double Omega, const Mat& Upsilon, double gamma) {
  if (theta_hat.size() != Upsilon.size()) throw DimensionError("memory_law_rhs: size mismatch");
  return (theta_hat * Omega - Upsilon) * (-gamma * Omega);
}

Mat baseline_law_rhs(const Mat& theta_hat, double Delta, const Mat& Y, double gamma) {
  if (theta_hat.size() != Y.size()) throw DimensionError("baseline_law_rhs: size mismatch");
  return (theta_hat * Delta - Y) * (-gamma * Delta);
}

Mat scheduled_memory_law_rhs(const Mat& theta_hat, double Omega, const Mat& Upsilon,
                             const Mat& omega_reg, const GainSchedule& sched) {
  if (theta_hat.size() != Upsilon.size()) throw DimensionError("scheduled_memory_law_rhs: size mismatch");
  if (std::abs(Omega) <= sched.eps_omega) return Mat(theta_hat.rows(), 1);
  const double rate = sched.gamma0 * dot(omega_reg, omega_reg) + sched.gamma1;
  return (theta_hat - Upsilon / Omega) * (-rate);
}

double MemoryScale::integrand_weight(double t, double sigma, double log_scale) const {
  if (!active_) return 0.0;
  return std::exp(-sigma * t + 2.0 * log_scale - log_factor_);
}

void MemoryScale::renormalize(double t, double sigma, double log_abs_delta, double& omega_m,
                              std::span<double> upsilon_m) {
  auto rescale = [&](double log_new) {
    const double f = std::exp(log_factor_ - log_new);
    omega_m *= f;
    for (double& v : upsilon_m) v *= f;
    log_factor_ = log_new;
  };
  if (std::isfinite(log_abs_delta)) {
    const double g = -sigma * t + 2.0 * log_abs_delta;
    if (!active_) {
      active_ = true;
      log_factor_ = g;
    } else if (g - log_factor_ > kExponentSlack) {
      rescale(g);
    }
  }
  if (active_ && omega_m > kMantissaCap) rescale(log_factor_ + std::log(omega_m));
}

double MemoryScale::log_omega(double omega_m) const {
  if (!active_ || !(omega_m > 0.0)) return -std::numeric_limits<double>::infinity();
  return std::log(omega_m) + log_factor_;
}

}  // namespace appc
