#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "appc/excitation.hpp"
#include "appc/oracle.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using appc::Mat;

namespace {

std::vector<double> grid(double t0, double t1, std::size_t n) {
  std::vector<double> t(n);
  for (std::size_t i = 0; i < n; ++i) t[i] = t0 + (t1 - t0) * static_cast<double>(i) / static_cast<double>(n - 1);
  return t;
}

// Trace with theta_err components given per sample and everything else zero.
appc::SimulationTrace error_trace(const std::vector<double>& t, const std::vector<std::vector<double>>& err) {
  appc::SimulationTrace tr;
  tr.n = err.front().size() - 1;
  tr.has_oracle = true;
  tr.theta_star.assign(err.front().size(), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    appc::TraceSample s;
    s.t = t[i];
    s.theta_err = err[i];
    s.theta = err[i];
    s.eref.assign(tr.n, 0.0);
    tr.samples.push_back(s);
  }
  return tr;
}

double poly_eval(const std::vector<double>& p, double x) {
  double v = 0.0;
  for (double c : p) v = v * x + c;
  return v;
}

}  // namespace

TEST(Spectra, JacobiEigenvaluesAreCharPolyRoots) {
  std::mt19937_64 rng(51);
  for (int rep = 0; rep < 50; ++rep) {
    const Mat r = fixtures::to_mat(ref::random_rows(rng, 3, 3));
    const Mat s = (r + r.transpose()) * 0.5;
    const auto ev = appc::symmetric_eigenvalues(s);
    ASSERT_EQ(ev.size(), 3u);
    EXPECT_LE(ev[0], ev[1]);
    EXPECT_LE(ev[1], ev[2]);
    const auto p = ref::principal_minor_char_poly(fixtures::to_rows(s));
    const std::vector<double> dp{3 * p[0], 2 * p[1], p[2]};
    for (double l : ev) {
      // Newton distance to the nearest root.
      EXPECT_LE(std::abs(poly_eval(p, l) / poly_eval(dp, l)), 1e-8);
    }
    EXPECT_NEAR(ev[0] + ev[1] + ev[2], s.trace(), 1e-12);
  }
}

TEST(FeLevel, ScalarCases) {
  const auto t = grid(0.0, 2.0, 201);
  EXPECT_EQ(appc::fe_level_scalar(t, std::vector<double>(t.size(), 0.0), 0.0, 2.0), 0.0);
  EXPECT_NEAR(appc::fe_level_scalar(t, std::vector<double>(t.size(), 1.5), 0.0, 2.0), 4.5, 1e-12);
  EXPECT_NEAR(appc::fe_level_scalar(t, std::vector<double>(t.size(), 1.5), 0.5, 1.0), 1.125, 1e-12);
  EXPECT_THROW(appc::fe_level_scalar(t, std::vector<double>(t.size(), 1.0), 0.5, 0.5), appc::ExcitationError);
}

TEST(FeLevel, VectorCases) {
  const double T = 2.0 * std::numbers::pi;
  const auto t = grid(0.0, T, 4001);
  std::vector<std::vector<double>> rot, line;
  for (double s : t) {
    rot.push_back({std::cos(s), std::sin(s)});
    line.push_back({std::cos(s), 2.0 * std::cos(s)});
  }
  EXPECT_NEAR(appc::fe_level_vector(t, rot, 0.0, T), T / 2.0, 1e-6);
  EXPECT_NEAR(appc::fe_level_vector(t, line, 0.0, T), 0.0, 1e-10);

  std::vector<double> scalar;
  std::vector<std::vector<double>> one;
  for (double s : t) {
    scalar.push_back(std::exp(-s) * std::sin(3 * s));
    one.push_back({scalar.back()});
  }
  EXPECT_NEAR(appc::fe_level_vector(t, one, 0.0, T), appc::fe_level_scalar(t, scalar, 0.0, T), 1e-14);
  EXPECT_GE(appc::fe_level_vector(t, rot, 1.0, 2.0), 0.0);
}

TEST(PeWindowed, SineBoundedBelowDecayVanishesConstantVectorZero) {
  const auto t = grid(0.0, 20.0, 4001);
  std::vector<std::vector<double>> sine, decay, constant;
  for (double s : t) {
    sine.push_back({std::sin(2.0 * s)});
    decay.push_back({std::exp(-s)});
    constant.push_back({1.0, -1.0});
  }
  const double win = std::numbers::pi;  // one full period of sin(2t)
  const auto ws = appc::pe_check_windowed(t, sine, win, 5);
  ASSERT_FALSE(ws.alpha.empty());
  // Windows snap to the 0.005 s grid, so each may lose up to one step.
  for (double a : ws.alpha) {
    EXPECT_GE(a, win / 2.0 - 0.005);
    EXPECT_LE(a, win / 2.0 + 1e-6);
  }

  const auto wd = appc::pe_check_windowed(t, decay, 1.0, 5);
  EXPECT_LT(wd.alpha.back(), 1e-6 * wd.alpha.front());
  for (std::size_t i = 1; i < wd.alpha.size(); ++i) EXPECT_LT(wd.alpha[i], wd.alpha[i - 1]);

  for (double a : appc::pe_check_windowed(t, constant, 1.0, 7).alpha) EXPECT_NEAR(a, 0.0, 1e-12);
  EXPECT_THROW(appc::pe_check_windowed(t, sine, 25.0), appc::ExcitationError);
}

TEST(PeWindowed, ParallelMatchesSerial) {
  std::mt19937_64 rng(52);
  std::normal_distribution<double> nd;
  const auto t = grid(0.0, 10.0, 2001);
  std::vector<std::vector<double>> v;
  for (std::size_t i = 0; i < t.size(); ++i) v.push_back({nd(rng), nd(rng), nd(rng)});
  const auto a = appc::pe_check_windowed_serial(t, v, 1.5, 3);
  const auto b = appc::pe_check_windowed(t, v, 1.5, 3);
  EXPECT_EQ(a.t_start, b.t_start);
  EXPECT_EQ(a.alpha, b.alpha);
}

TEST(Log10Trapezoid, MatchesPlainIntegralAndSurvivesUnderflow) {
  const auto t = grid(0.0, 1.0, 101);
  std::vector<double> v, lg, shifted;
  for (double s : t) {
    v.push_back(std::exp(-3 * s));
    lg.push_back(std::log10(v.back()));
    shifted.push_back(lg.back() - 1000.0);
  }
  double plain = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) plain += 0.5 * (t[i + 1] - t[i]) * (v[i] + v[i + 1]);
  EXPECT_NEAR(appc::log10_trapezoid(t, lg, 0, 100), std::log10(plain), 1e-13);
  EXPECT_NEAR(appc::log10_trapezoid(t, shifted, 0, 100), std::log10(plain) - 1000.0, 1e-10);
  std::vector<double> none(t.size(), -INFINITY);
  EXPECT_TRUE(std::isinf(appc::log10_trapezoid(t, none, 0, 100)));
}

TEST(ExcitationEnd, DetectsLastRunBelowTolerance) {
  appc::SimulationTrace tr;
  const std::vector<double> omega{0, 0, 1, 2, 3, 3, 3};
  const std::vector<double> rate{0, 0, 1, 0.5, 1e-3, 1e-12, 0};
  for (std::size_t i = 0; i < omega.size(); ++i) {
    appc::TraceSample s;
    s.t = 0.1 * static_cast<double>(i);
    s.Omega = omega[i];
    s.Omega_rate = rate[i];
    tr.samples.push_back(s);
  }
  EXPECT_NEAR(*appc::detect_excitation_end(tr), 0.5, 1e-15);
  EXPECT_NEAR(*appc::detect_adaptation_onset(tr), 0.2, 1e-15);
  tr.samples.back().Omega_rate = 1.0;
  EXPECT_FALSE(appc::detect_excitation_end(tr).has_value());
  for (auto& s : tr.samples) s.Omega = 0.0;
  EXPECT_FALSE(appc::detect_excitation_end(tr).has_value());
  EXPECT_FALSE(appc::detect_adaptation_onset(tr).has_value());
}

TEST(IntegralBound, ConstantPhiGivesEqualityInSharpForm) {
  // phi = c on [0, 1], Delta = C c^q.
  const int q = 29;
  const double c = 0.5, log10_C = 3.0;
  appc::SimulationTrace tr;
  for (const double t : grid(0.0, 1.0, 101)) {
    appc::TraceSample s;
    s.t = t;
    s.phi = c;
    s.Delta = 1.0;
    s.Delta_scale_log10 = log10_C + q * std::log10(c);
    tr.samples.push_back(s);
  }
  const auto chk = appc::integral_bound_check(tr, q, log10_C, 1.0);
  EXPECT_NEAR(chk.t_a, 0.0, 1e-15);
  EXPECT_NEAR(chk.t_b, 1.0, 1e-15);
  EXPECT_NEAR(chk.alpha, c * c, 1e-14);
  EXPECT_NEAR(chk.log10_lhs_sub, chk.log10_bound_sharp, 1e-10);
  EXPECT_TRUE(chk.holds_sharp);
  // (alpha / w)^(2q) = c^(4q) is smaller still.
  EXPECT_TRUE(chk.holds);
  EXPECT_NEAR(chk.log10_bound, 2 * log10_C + 4 * q * std::log10(c), 1e-10);
}

TEST(IntegralBound, UnitPhiMakesBothFormsCoincide) {
  appc::SimulationTrace tr;
  for (const double t : grid(0.0, 1.0, 11)) {
    appc::TraceSample s;
    s.t = t;
    s.phi = 1.0;
    s.Delta = 2.0;
    tr.samples.push_back(s);
  }
  const auto chk = appc::integral_bound_check(tr, 29, std::log10(2.0), 1.0);
  EXPECT_NEAR(chk.log10_bound, chk.log10_lhs_sub, 1e-12);
  EXPECT_NEAR(chk.log10_bound_sharp, chk.log10_lhs_sub, 1e-12);
}

TEST(IntegralBound, VanishingPhiHasNoInterval) {
  appc::SimulationTrace tr;
  for (const double t : grid(0.0, 1.0, 11)) {
    appc::TraceSample s;
    s.t = t;
    tr.samples.push_back(s);
  }
  EXPECT_THROW(appc::integral_bound_check(tr, 29, 0.0, 1.0), appc::ExcitationError);
}

TEST(RateFit, RecoversExponentAndHandlesFloor) {
  const auto t = grid(0.0, 5.0, 501);
  std::vector<double> v;
  for (double s : t) v.push_back(3.0 * std::exp(-2.0 * s));
  const auto f = appc::fit_log_rate(t, v, 1.0);
  EXPECT_FALSE(f.degenerate);
  EXPECT_NEAR(f.slope, -2.0, 1e-10);
  EXPECT_NEAR(f.intercept, std::log(3.0), 1e-9);

  // Below 1e-10 the samples are dropped; a flat floor must not bend the fit.
  std::vector<double> floored;
  for (double s : t) floored.push_back(std::max(std::exp(-10.0 * s), 1e-13));
  const auto g = appc::fit_log_rate(t, floored, 0.0);
  EXPECT_NEAR(g.slope, -10.0, 1e-8);
  EXPECT_LT(g.t_to, 2.31);

  const auto d = appc::fit_log_rate(t, std::vector<double>(t.size(), 0.0), 0.0);
  EXPECT_TRUE(d.degenerate);
}

TEST(Monotonicity, FlagsInjectedBump) {
  const auto t = grid(0.0, 1.0, 101);
  std::vector<std::vector<double>> err;
  for (double s : t) err.push_back({std::exp(-s), -2 * std::exp(-3 * s), 0.5});
  EXPECT_TRUE(appc::check_monotone(error_trace(t, err)).monotone);
  err[60][1] = -2 * std::exp(-3 * t[40]);  // jumps back up
  const auto chk = appc::check_monotone(error_trace(t, err));
  EXPECT_FALSE(chk.monotone);
  EXPECT_GT(chk.per_component[1], 0.1);
  EXPECT_EQ(chk.per_component[0], 0.0);
}

TEST(ConvergenceVerdict, IdealRunIsTriviallyMonotoneWithDegenerateRate) {
  const auto t = grid(0.0, 1.0, 21);
  const auto tr = error_trace(t, std::vector<std::vector<double>>(t.size(), {0.0, 0.0, 0.0}));
  const auto v = appc::convergence_verdict(tr, std::nullopt);
  EXPECT_TRUE(v.monotonicity.monotone);
  EXPECT_TRUE(v.theta_rate.degenerate);
  EXPECT_FALSE(v.converging);
  appc::SimulationTrace bare = tr;
  bare.has_oracle = false;
  EXPECT_THROW(appc::convergence_verdict(bare, std::nullopt), std::invalid_argument);
}

TEST(Benchmark, PropertiesOfTheRecordedRun) {
  const auto& tr = fixtures::benchmark_trace();
  const auto t_e = appc::detect_excitation_end(tr);
  ASSERT_TRUE(t_e.has_value());
  EXPECT_GT(*t_e, 0.0);
  EXPECT_LT(*t_e, 5.0);

  const auto v = appc::convergence_verdict(tr, t_e);
  EXPECT_TRUE(v.monotonicity.monotone);
  EXPECT_TRUE(v.bounded);
  EXPECT_TRUE(v.converging);

  const auto om = appc::omega_checks(tr, t_e);
  EXPECT_TRUE(om.starts_at_zero);
  EXPECT_TRUE(om.nondecreasing);
  EXPECT_TRUE(om.bounded);
  ASSERT_TRUE(om.log10_lower && om.log10_upper);
  EXPECT_LE(*om.log10_lower, *om.log10_upper);

  const auto prob = fixtures::benchmark_problem();
  const auto c = appc::structural_constants(prob.plant, appc::solve_ideal(prob.plant, prob.modal), prob.modal.Gamma);
  const double log10_C = c.log_abs_C / std::numbers::ln10;
  const auto est = appc::estimate_log10_C(tr, c.q);
  ASSERT_TRUE(est.has_value());
  EXPECT_NEAR(*est, log10_C, 1e-4);

  appc::AnalysisOptions opts;
  opts.log10_abs_C = log10_C;
  opts.sigma = prob.estimator.sigma;
  const auto rep = appc::analyze_excitation(tr, opts);
  EXPECT_TRUE(rep.fe_satisfied);
  EXPECT_GT(rep.alpha, 0.0);
  ASSERT_TRUE(rep.t_e.has_value());
  EXPECT_GT(*rep.t_e, rep.t_r_plus);
  ASSERT_TRUE(rep.integral_bound.has_value());
  EXPECT_TRUE(rep.integral_bound->holds);
  EXPECT_TRUE(rep.integral_bound->holds_sharp);
  EXPECT_TRUE(rep.growth.condition_met);
  EXPECT_EQ(rep.log10_C_source, "oracle");
  for (const auto& sig : rep.signals) {
    if (sig.name == "phi_bar") EXPECT_GT(sig.alpha, 0.0);
  }
  // Constant r excites only transiently: the windowed level dies out.
  EXPECT_LT(rep.pe_alpha_last, 1e-6 * rep.pe_alpha_max);
}
