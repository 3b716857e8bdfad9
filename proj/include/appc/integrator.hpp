#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace appc {

/// A state or derivative went non-finite, or left the admissible range.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(const std::string& what, double t) : std::runtime_error(what), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

using State = std::vector<double>;
/// rhs(t, y, dydt); dydt is presized to y.size().
using RhsFn = std::function<void(double, const State&, State&)>;

/// Classical fourth-order Runge-Kutta with reusable stage buffers.
class Rk4Stepper {
 public:
  explicit Rk4Stepper(std::size_t dim) : k1_(dim), k2_(dim), k3_(dim), k4_(dim), tmp_(dim) {}

  template <class Rhs>
  void step(Rhs&& rhs, double t, State& y, double dt) {
    const std::size_t n = y.size();
    const double half = 0.5 * dt;
    rhs(t, y, k1_);
    check(k1_, t);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + half * k1_[i];
    rhs(t + half, tmp_, k2_);
    check(k2_, t + half);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + half * k2_[i];
    rhs(t + half, tmp_, k3_);
    check(k3_, t + half);
    for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + dt * k3_[i];
    rhs(t + dt, tmp_, k4_);
    check(k4_, t + dt);
    const double w = dt / 6.0;
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += w * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }
  }

 private:
  static void check(const State& d, double t) {
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (!std::isfinite(d[i])) {
        throw DivergenceError("non-finite derivative in component " + std::to_string(i) + " at t = " +
                                  std::to_string(t),
                              t);
      }
    }
  }

  State k1_, k2_, k3_, k4_, tmp_;
};

/// One RK4 step from (t, y); returns the new state.
inline State rk4_step(const RhsFn& rhs, double t, const State& y, double dt) {
  Rk4Stepper stepper(y.size());
  State out = y;
  stepper.step(rhs, t, out, dt);
  return out;
}

}  // namespace appc
