#include "appc/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace appc {

namespace {

constexpr double kStateBound = 1e9;

Mat take(const State& y, std::size_t offset, std::size_t rows, std::size_t cols) {
  Mat m(rows, cols);
  std::copy_n(y.begin() + static_cast<std::ptrdiff_t>(offset), rows * cols, m.data().begin());
  return m;
}

void put(State& y, std::size_t offset, const Mat& m) {
  std::copy(m.data().begin(), m.data().end(), y.begin() + static_cast<std::ptrdiff_t>(offset));
}

std::vector<double> to_vector(const Mat& m) { return {m.data().begin(), m.data().end()}; }

// Everything the estimator derives from the filter states at one instant.
struct Regression {
  DremMix mix;
  double phi_rel;
  ScaledRegression scaled;
};

class ClosedLoop {
 public:
  ClosedLoop(const ClosedLoopProblem& p, const std::optional<IdealSolution>& ideal)
      : p_(p), ideal_(ideal), lay_(p.plant.n()), chain_(p.modal.Gamma, p.plant.h) {}

  const StateLayout& layout() const { return lay_; }
  MemoryScale& memory() { return memory_; }

  Regression regress(const State& y) const {
    const std::size_t m = lay_.n + 2;
    const Mat H_pp = take(y, lay_.h_pp, m, m);
    const Mat H_pz = take(y, lay_.h_pz, m, lay_.n);
    DremMix mix = drem_mix(H_pp, H_pz);
    const double phi_rel = gram_hadamard_ratio(H_pp);
    const double phi = phi_rel >= p_.estimator.phi_rel_floor ? mix.phi : 0.0;
    const ScalarizedAB ab = extract_AB(mix.z, phi);
    ScaledRegression scaled = stage2_scaled(chain_, ab.z_A, ab.z_B, phi);
    return {std::move(mix), phi_rel, std::move(scaled)};
  }

  void rhs(double t, const State& y, State& dy) const {
    const std::size_t n = lay_.n;
    const EstimatorConfig& est = p_.estimator;
    std::fill(dy.begin(), dy.end(), 0.0);

    const Mat x = take(y, lay_.x, n, 1);
    const Mat theta = take(y, lay_.theta, n + 1, 1);
    const double r = p_.reference(t);
    const Mat omega_reg = regressor_omega(x, r);
    const double u = dot(theta, omega_reg);

    put(dy, lay_.x, plant_rhs(x, u, p_.plant));
    if (ideal_) {
      const Mat xref = take(y, lay_.xref, n, 1);
      put(dy, lay_.xref, ideal_->A_sigma * xref + ideal_->B_ref * r);
    }

    const Mat phi_bar_state = take(y, lay_.phi_bar, n + 1, 1);
    put(dy, lay_.phi_bar, stage1_rhs(phi_bar_state, x, u, est.l));
    const Stage1Outputs s1 = stage1_outputs(phi_bar_state, x, t, est.l);
    const std::size_t m = n + 2;
    const DremDerivatives dd =
        drem_rhs(take(y, lay_.h_pp, m, m), take(y, lay_.h_pz, m, n), s1.phi_bar, s1.z_bar, est.k);
    put(dy, lay_.h_pp, dd.H_pp);
    put(dy, lay_.h_pz, dd.H_pz);

    const Regression reg = regress(y);
    const RegressionPair& pair = reg.scaled.pair;
    if (pair.Delta != 0.0 && memory_.active()) {
      const double w = memory_.integrand_weight(t, est.sigma, reg.scaled.log_scale);
      put(dy, lay_.upsilon, pair.Y * (w * pair.Delta));
      dy[lay_.omega] = w * pair.Delta * pair.Delta;
    }

    Mat d_theta(n + 1, 1);
    if (p_.law == AdaptiveLaw::memory) {
      d_theta = scheduled_memory_law_rhs(theta, y[lay_.omega], take(y, lay_.upsilon, n + 1, 1),
                                         omega_reg, est.schedule);
    } else if (pair.Delta != 0.0) {
      // True (Y, Delta) = e^L (Y_m, Delta_m); the law is quadratic in them.
      const double log_factor = reg.scaled.log_scale + est.baseline_rescale_log10 * std::numbers::ln10;
      const double f = std::exp(2.0 * log_factor);
      d_theta = baseline_law_rhs(theta, pair.Delta, pair.Y, est.baseline_gamma) * f;
    }
    put(dy, lay_.theta, d_theta);
  }

  TraceSample sample(double t, const State& y, const Regression& reg) const {
    const std::size_t n = lay_.n;
    TraceSample s;
    s.t = t;
    const Mat x = take(y, lay_.x, n, 1);
    const Mat theta = take(y, lay_.theta, n + 1, 1);
    s.x = to_vector(x);
    s.r = p_.reference(t);
    s.u = control_law(theta, x, s.r);
    s.theta = to_vector(theta);
    s.phi_bar_state = std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(lay_.phi_bar),
                                          y.begin() + static_cast<std::ptrdiff_t>(lay_.phi_bar + n + 1));
    s.decay = std::exp(-p_.estimator.l * t);
    s.phi = reg.mix.phi;
    s.phi_rel = reg.phi_rel;
    const RegressionPair& pair = reg.scaled.pair;
    s.Delta = pair.Delta;
    s.Delta_scale_log10 = pair.Delta != 0.0 ? reg.scaled.log_scale / std::numbers::ln10 : 0.0;
    s.Delta_M = pair.Delta_M;
    s.Delta_x = pair.Delta_x;
    s.Delta_r = pair.Delta_r;
    s.Omega = y[lay_.omega];
    s.Omega_scale_log10 = memory_.active() ? memory_.log_factor() / std::numbers::ln10 : 0.0;
    if (s.Omega > 0.0 && pair.Delta != 0.0) {
      const double w = memory_.integrand_weight(t, p_.estimator.sigma, reg.scaled.log_scale);
      s.Omega_rate = w * pair.Delta * pair.Delta / s.Omega;
    }
    s.Upsilon = std::vector<double>(y.begin() + static_cast<std::ptrdiff_t>(lay_.upsilon),
                                    y.begin() + static_cast<std::ptrdiff_t>(lay_.upsilon + n + 1));

    if (ideal_) {
      const Mat xref = take(y, lay_.xref, n, 1);
      s.xref = to_vector(xref);
      s.eref = to_vector(tracking_error(x, xref));
      s.u_star = control_law(ideal_->theta_star, x, s.r);
      s.theta_err = to_vector(theta - ideal_->theta_star);
      const ScalarizedAB ab = extract_AB(reg.mix.z, reg.mix.phi);
      const double phi_abs = std::abs(reg.mix.phi);
      s.zA_res = norm2(ab.z_A - p_.plant.A * reg.mix.phi) / (1.0 + phi_abs * norm2(p_.plant.A));
      s.zB_res = norm2(ab.z_B - p_.plant.B * reg.mix.phi) / (1.0 + phi_abs * norm2(p_.plant.B));
    }
    return s;
  }

 private:
  const ClosedLoopProblem& p_;
  const std::optional<IdealSolution>& ideal_;
  StateLayout lay_;
  Stage2 chain_;
  MemoryScale memory_;
};

void check_state(const State& y, const StateLayout& lay, double t) {
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) {
      throw DivergenceError("state component " + std::to_string(i) + " is non-finite at t = " +
                                std::to_string(t),
                            t);
    }
    // The memory mantissas carry a separate exponent, so only finiteness applies.
    const bool memory = i >= lay.upsilon && i < lay.omega + 1;
    if (!memory && std::abs(y[i]) > kStateBound) {
      throw DivergenceError("state component " + std::to_string(i) + " exceeded 1e9 at t = " +
                                std::to_string(t),
                            t);
    }
  }
}

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw std::invalid_argument("sim: dt must be positive");
  if (!(t_end >= dt)) throw std::invalid_argument("sim: t_end must be at least dt");
  if (record_stride < 1) throw std::invalid_argument("sim: record_stride must be >= 1");
}

void EstimatorConfig::validate() const {
  if (!(l > 0.0)) throw std::invalid_argument("estimator: l must be positive");
  if (!(k > 0.0)) throw std::invalid_argument("estimator: k must be positive");
  if (!(sigma > 0.0)) throw std::invalid_argument("estimator: sigma must be positive");
  if (!(phi_rel_floor >= 0.0)) throw std::invalid_argument("estimator: phi_rel_floor must be >= 0");
  if (!(baseline_gamma > 0.0)) throw std::invalid_argument("estimator: baseline_gamma must be positive");
  if (!std::isfinite(baseline_rescale_log10))
    throw std::invalid_argument("estimator: baseline_rescale_log10 must be finite");
  schedule.validate();
}

std::string to_string(AdaptiveLaw law) { return law == AdaptiveLaw::memory ? "memory" : "baseline"; }

AdaptiveLaw parse_law(const std::string& name) {
  if (name == "memory") return AdaptiveLaw::memory;
  if (name == "baseline") return AdaptiveLaw::baseline;
  throw std::invalid_argument("unknown adaptive law '" + name + "'");
}

double ReferenceSignal::operator()(double t) const {
  double v = 0.0;
  for (const auto& [ts, value] : steps) {
    if (ts > t) break;
    v = value;
  }
  for (const Sine& s : sines) v += s.amplitude * std::sin(s.angular_freq * t + s.phase);
  return v;
}

void ReferenceSignal::validate() const {
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!std::isfinite(steps[i].first) || !std::isfinite(steps[i].second))
      throw std::invalid_argument("reference: non-finite breakpoint");
    if (i > 0 && !(steps[i].first > steps[i - 1].first))
      throw std::invalid_argument("reference: breakpoint times must be strictly increasing");
  }
  for (const Sine& s : sines) {
    if (!std::isfinite(s.amplitude) || !std::isfinite(s.angular_freq) || !std::isfinite(s.phase))
      throw std::invalid_argument("reference: non-finite sine parameter");
  }
}

ReferenceSignal ReferenceSignal::constant(double value) {
  ReferenceSignal r;
  r.steps = {{0.0, value}};
  return r;
}

StateLayout::StateLayout(std::size_t n_) : n(n_) {
  const std::size_t m = n + 2;
  x = 0;
  xref = x + n;
  phi_bar = xref + n;
  h_pp = phi_bar + n + 1;
  h_pz = h_pp + m * m;
  upsilon = h_pz + m * n;
  omega = upsilon + n + 1;
  theta = omega + 1;
  size = theta + n + 1;
}

double TraceSample::theta_err_norm() const {
  double s = 0.0;
  for (double v : theta_err) s += v * v;
  return std::sqrt(s);
}

double TraceSample::xi_norm() const {
  double s = 0.0;
  for (double v : eref) s += v * v;
  for (double v : theta_err) s += v * v;
  return std::sqrt(s);
}

double TraceSample::log10_abs_delta() const {
  if (Delta == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log10(std::abs(Delta)) + Delta_scale_log10;
}

double TraceSample::log10_omega() const {
  if (!(Omega > 0.0)) return -std::numeric_limits<double>::infinity();
  return std::log10(Omega) + Omega_scale_log10;
}

SimulationTrace run_closed_loop(const ClosedLoopProblem& problem, const SimConfig& sim) {
  sim.validate();
  problem.plant.validate();
  const std::size_t n = problem.plant.n();
  problem.modal.validate(n);
  problem.controller.validate(n);
  problem.estimator.validate();
  problem.reference.validate();

  SimulationTrace trace;
  trace.n = n;
  trace.law = problem.law;
  trace.warnings = design_warnings(problem.plant, problem.modal);

  std::optional<IdealSolution> ideal;
  try {
    ideal = solve_ideal(problem.plant, problem.modal);
  } catch (const std::exception& e) {
    trace.warnings.push_back(std::string("oracle unavailable: ") + e.what());
  }
  trace.has_oracle = ideal.has_value();
  if (ideal) trace.theta_star = to_vector(ideal->theta_star);

  ClosedLoop loop(problem, ideal);
  const StateLayout& lay = loop.layout();
  State y(lay.size, 0.0);
  put(y, lay.x, problem.plant.x0);
  const Mat xref0 = problem.xref0.value_or(problem.plant.x0);
  if (xref0.size() != n) throw DimensionError("xref0 must have n entries");
  put(y, lay.xref, xref0);
  put(y, lay.theta, problem.controller.theta_hat);

  Rk4Stepper stepper(lay.size);
  auto rhs = [&loop](double t, const State& s, State& d) { loop.rhs(t, s, d); };
  const auto steps = static_cast<std::size_t>(std::llround(sim.t_end / sim.dt));
  trace.samples.reserve(steps / sim.record_stride + 2);

  for (std::size_t i = 0;; ++i) {
    const double t = static_cast<double>(i) * sim.dt;
    const Regression reg = loop.regress(y);
    double& omega_m = y[lay.omega];
    loop.memory().renormalize(t, problem.estimator.sigma, reg.scaled.log_abs_delta(), omega_m,
                              std::span<double>(y.data() + lay.upsilon, n + 1));
    if (i % sim.record_stride == 0 || i == steps) trace.samples.push_back(loop.sample(t, y, reg));
    if (i == steps) break;
    stepper.step(rhs, t, y, sim.dt);
    check_state(y, lay, t + sim.dt);
  }
  return trace;
}

}  // namespace appc
