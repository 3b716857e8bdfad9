#include "appc/excitation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace appc {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double time_eps(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }

// Inclusive index range of samples with t in [t0, t1].
std::pair<std::size_t, std::size_t> index_range(const std::vector<double>& t, double t0, double t1) {
  const auto lo = std::lower_bound(t.begin(), t.end(), t0 - time_eps(t0));
  const auto hi = std::upper_bound(t.begin(), t.end(), t1 + time_eps(t1));
  const auto i0 = static_cast<std::size_t>(lo - t.begin());
  const auto i1 = static_cast<std::size_t>(hi - t.begin());
  if (i1 < i0 + 2) throw ExcitationError("window holds fewer than two samples");
  return {i0, i1 - 1};
}

Mat gram_trapezoid(const std::vector<double>& t, const std::vector<std::vector<double>>& v,
                   std::size_t i0, std::size_t i1) {
  const std::size_t d = v[i0].size();
  Mat g(d, d);
  for (std::size_t k = i0; k < i1; ++k) {
    const double h = 0.5 * (t[k + 1] - t[k]);
    const auto& a = v[k];
    const auto& b = v[k + 1];
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = i; j < d; ++j) g(i, j) += h * (a[i] * a[j] + b[i] * b[j]);
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
  }
  return g;
}

double min_eigenvalue(const Mat& g) {
  if (g.rows() == 1) return g(0, 0);
  return symmetric_eigenvalues(g).front();
}

std::vector<double> times(const SimulationTrace& trace) {
  std::vector<double> t;
  t.reserve(trace.samples.size());
  for (const auto& s : trace.samples) t.push_back(s.t);
  return t;
}

std::vector<std::size_t> window_starts(const std::vector<double>& t, double window, std::size_t stride) {
  if (t.empty() || !(window > 0.0) || t.front() + window > t.back() + time_eps(t.back())) {
    throw ExcitationError("window longer than the trace");
  }
  std::vector<std::size_t> starts;
  for (std::size_t i = 0; i < t.size(); i += std::max<std::size_t>(1, stride)) {
    if (t[i] + window > t.back() + time_eps(t.back())) break;
    starts.push_back(i);
  }
  return starts;
}

double window_alpha(const std::vector<double>& t, const std::vector<std::vector<double>>& v,
                    std::size_t i0, double window) {
  const double t1 = t[i0] + window;
  const auto hi = std::upper_bound(t.begin() + static_cast<std::ptrdiff_t>(i0), t.end(), t1 + time_eps(t1));
  const auto i1 = static_cast<std::size_t>(hi - t.begin()) - 1;
  if (i1 <= i0) return 0.0;
  return min_eigenvalue(gram_trapezoid(t, v, i0, i1));
}

struct LineFit {
  double slope, intercept;
};

LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const double nx = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= nx;
  my /= nx;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  const double slope = sxx > 0.0 ? sxy / sxx : 0.0;
  return {slope, my - slope * mx};
}

}  // namespace

std::vector<double> symmetric_eigenvalues(const Mat& s) {
  if (!s.is_square()) throw DimensionError("symmetric_eigenvalues: expected a square matrix");
  const std::size_t n = s.rows();
  Mat a = s;
  double total = 0.0;
  for (double v : a.data()) total += v * v;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    }
    if (off <= 1e-32 * total || off == 0.0) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a(p, q) == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> eig(n);
  for (std::size_t i = 0; i < n; ++i) eig[i] = a(i, i);
  std::sort(eig.begin(), eig.end());
  return eig;
}

double fe_level_scalar(const std::vector<double>& t, const std::vector<double>& v, double t0, double t1) {
  if (t.size() != v.size()) throw DimensionError("fe_level_scalar: length mismatch");
  const auto [i0, i1] = index_range(t, t0, t1);
  double acc = 0.0;
  for (std::size_t k = i0; k < i1; ++k) acc += 0.5 * (t[k + 1] - t[k]) * (v[k] * v[k] + v[k + 1] * v[k + 1]);
  return acc;
}

double fe_level_vector(const std::vector<double>& t, const std::vector<std::vector<double>>& v,
                       double t0, double t1) {
  if (t.size() != v.size()) throw DimensionError("fe_level_vector: length mismatch");
  const auto [i0, i1] = index_range(t, t0, t1);
  return min_eigenvalue(gram_trapezoid(t, v, i0, i1));
}

WindowedLevel pe_check_windowed_serial(const std::vector<double>& t,
                                       const std::vector<std::vector<double>>& v, double window,
                                       std::size_t start_stride) {
  if (t.size() != v.size()) throw DimensionError("pe_check_windowed: length mismatch");
  const auto starts = window_starts(t, window, start_stride);
  WindowedLevel out;
  out.t_start.reserve(starts.size());
  out.alpha.reserve(starts.size());
  for (std::size_t i : starts) {
    out.t_start.push_back(t[i]);
    out.alpha.push_back(window_alpha(t, v, i, window));
  }
  return out;
}

WindowedLevel pe_check_windowed(const std::vector<double>& t, const std::vector<std::vector<double>>& v,
                                double window, std::size_t start_stride) {
  if (t.size() != v.size()) throw DimensionError("pe_check_windowed: length mismatch");
  const auto starts = window_starts(t, window, start_stride);
  WindowedLevel out;
  out.t_start.resize(starts.size());
  out.alpha.resize(starts.size());
  const auto count = static_cast<std::ptrdiff_t>(starts.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const std::size_t i = starts[static_cast<std::size_t>(k)];
    out.t_start[static_cast<std::size_t>(k)] = t[i];
    out.alpha[static_cast<std::size_t>(k)] = window_alpha(t, v, i, window);
  }
  return out;
}

double log10_trapezoid(const std::vector<double>& t, const std::vector<double>& log10_values,
                       std::size_t i0, std::size_t i1) {
  double peak = kNegInf;
  for (std::size_t k = i0; k <= i1; ++k) peak = std::max(peak, log10_values[k]);
  if (peak == kNegInf) return kNegInf;
  double acc = 0.0;
  for (std::size_t k = i0; k < i1; ++k) {
    const double a = std::pow(10.0, log10_values[k] - peak);
    const double b = std::pow(10.0, log10_values[k + 1] - peak);
    acc += 0.5 * (t[k + 1] - t[k]) * (a + b);
  }
  return acc > 0.0 ? peak + std::log10(acc) : kNegInf;
}

std::optional<double> detect_excitation_end(const SimulationTrace& trace, double rel_tol) {
  const auto& s = trace.samples;
  if (s.empty() || !(s.back().Omega > 0.0)) return std::nullopt;
  std::size_t i = s.size();
  while (i > 0 && s[i - 1].Omega_rate < rel_tol) --i;
  if (i == s.size()) return std::nullopt;  // still accumulating at the end
  return s[i].t;
}

std::optional<double> detect_adaptation_onset(const SimulationTrace& trace) {
  for (const auto& s : trace.samples) {
    if (s.Omega > 0.0) return s.t;
  }
  return std::nullopt;
}

IntegralBoundCheck integral_bound_check(const SimulationTrace& trace, int q, double log10_abs_C, double t_e) {
  const auto& s = trace.samples;
  const std::vector<double> t = times(trace);
  if (s.size() < 2) throw ExcitationError("trace too short");
  const std::size_t i_start = 0;
  const std::size_t i_end =
      static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), t_e + time_eps(t_e)) - t.begin()) - 1;
  auto live = [&](std::size_t i) { return s[i].Delta != 0.0 && s[i].phi != 0.0; };

  std::optional<std::size_t> peak;
  for (std::size_t i = i_start; i <= i_end; ++i) {
    if (live(i) && (!peak || s[i].phi * s[i].phi > s[*peak].phi * s[*peak].phi)) peak = i;
  }
  if (!peak) throw ExcitationError("phi vanishes on the excitation window; no qualifying interval");
  IntegralBoundCheck out;
  out.t_peak = s[*peak].t;
  out.beta = s[*peak].phi * s[*peak].phi;
  const double half = 0.5 * out.beta;
  std::size_t a = *peak, b = *peak;
  while (a > i_start && live(a - 1) && s[a - 1].phi * s[a - 1].phi >= half) --a;
  while (b < i_end && live(b + 1) && s[b + 1].phi * s[b + 1].phi >= half) ++b;
  if (b == a) throw ExcitationError("neighbourhood of the phi peak holds a single sample");
  out.t_a = s[a].t;
  out.t_b = s[b].t;

  std::vector<double> phi(s.size()), log_delta_sq(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    phi[i] = s[i].phi;
    log_delta_sq[i] = 2.0 * s[i].log10_abs_delta();
  }
  out.alpha = fe_level_scalar(t, phi, out.t_a, out.t_b);
  out.log10_lhs_sub = log10_trapezoid(t, log_delta_sq, a, b);
  out.log10_lhs_full = log10_trapezoid(t, log_delta_sq, i_start, i_end);
  const double width = out.t_b - out.t_a;
  out.log10_bound = 2.0 * log10_abs_C + std::log10(width) + 2.0 * q * std::log10(out.alpha / width);
  out.holds = out.log10_lhs_sub >= out.log10_bound;
  out.log10_bound_sharp = 2.0 * log10_abs_C + std::log10(width) + q * std::log10(out.alpha / width);
  // Trapezoid weights are positive, so Jensen holds for the sums as well; the
  // slack only absorbs rounding when phi is constant and both sides agree.
  out.holds_sharp = out.log10_lhs_sub >= out.log10_bound_sharp - 1e-9;
  return out;
}

std::optional<double> estimate_log10_C(const SimulationTrace& trace, int q) {
  std::vector<double> est;
  for (const auto& s : trace.samples) {
    if (s.Delta != 0.0 && s.phi != 0.0) est.push_back(s.log10_abs_delta() - q * std::log10(std::abs(s.phi)));
  }
  if (est.empty()) return std::nullopt;
  const auto mid = est.begin() + static_cast<std::ptrdiff_t>(est.size() / 2);
  std::nth_element(est.begin(), mid, est.end());
  return *mid;
}

RateFit fit_log_rate(const std::vector<double>& t, const std::vector<double>& values, double t_from,
                     double abs_floor, double floor_factor) {
  if (t.size() != values.size()) throw DimensionError("fit_log_rate: length mismatch");
  RateFit fit;
  fit.t_from = t_from;
  double lowest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= t_from - time_eps(t_from) && values[i] > 0.0) lowest = std::min(lowest, values[i]);
  }
  fit.floor = std::isfinite(lowest) ? std::max(abs_floor, floor_factor * lowest) : abs_floor;
  std::vector<double> x, y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= t_from - time_eps(t_from) && values[i] > fit.floor) {
      x.push_back(t[i]);
      y.push_back(std::log(values[i]));
    }
  }
  fit.samples = x.size();
  if (x.size() < 3 || x.back() - x.front() <= 0.0) return fit;
  const LineFit lf = least_squares(x, y);
  fit.slope = lf.slope;
  fit.intercept = lf.intercept;
  fit.t_to = x.back();
  fit.degenerate = false;
  return fit;
}

MonotonicityCheck check_monotone(const SimulationTrace& trace, double slack) {
  MonotonicityCheck out;
  const std::size_t dim = trace.samples.empty() ? 0 : trace.samples.front().theta_err.size();
  out.per_component.assign(dim, 0.0);
  std::vector<double> best(dim, std::numeric_limits<double>::infinity());
  for (const auto& s : trace.samples) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double e = std::abs(s.theta_err[i]);
      out.per_component[i] = std::max(out.per_component[i], e - best[i]);
      best[i] = std::min(best[i], e);
    }
  }
  for (double v : out.per_component) out.max_violation = std::max(out.max_violation, v);
  out.monotone = out.max_violation <= slack;
  return out;
}

ConvergenceVerdict convergence_verdict(const SimulationTrace& trace, std::optional<double> t_e) {
  if (!trace.has_oracle) throw std::invalid_argument("convergence_verdict: trace carries no oracle columns");
  ConvergenceVerdict v;
  v.monotonicity = check_monotone(trace);
  const std::vector<double> t = times(trace);
  std::vector<double> th(t.size()), xi(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    th[i] = trace.samples[i].theta_err_norm();
    xi[i] = trace.samples[i].xi_norm();
    v.sup_xi = std::max(v.sup_xi, xi[i]);
  }
  v.bounded = std::isfinite(v.sup_xi);

  const auto onset = detect_adaptation_onset(trace);
  const double from = t_e.value_or(onset.value_or(t.empty() ? 0.0 : t.front()));
  v.theta_rate = fit_log_rate(t, th, from);
  v.theta_rate.window = t_e ? "excitation_end" : "adaptation_onset";
  if (v.theta_rate.degenerate && t_e && onset && *onset < *t_e) {
    // Convergence finished inside the excitation window; the contraction
    // already holds from the first instant Omega > 0.
    v.theta_rate = fit_log_rate(t, th, *onset);
    v.theta_rate.window = "adaptation_onset";
  }
  v.xi_rate = fit_log_rate(t, xi, v.theta_rate.t_from);
  v.xi_rate.window = v.theta_rate.window;
  v.converging = !v.theta_rate.degenerate && v.theta_rate.slope < 0.0;
  return v;
}

OmegaChecks omega_checks(const SimulationTrace& trace, std::optional<double> t_e) {
  OmegaChecks out;
  const auto& s = trace.samples;
  if (s.empty()) return out;
  out.starts_at_zero = s.front().Omega == 0.0;
  out.nondecreasing = true;
  out.bounded = true;
  double prev = kNegInf;
  for (const auto& smp : s) {
    if (!std::isfinite(smp.Omega) || !std::isfinite(smp.Omega_scale_log10)) out.bounded = false;
    const double cur = smp.log10_omega();
    if (prev != kNegInf) {
      const double drop = cur == kNegInf ? 1.0 : 1.0 - std::pow(10.0, std::min(0.0, cur - prev));
      out.max_relative_drop = std::max(out.max_relative_drop, drop);
    }
    prev = std::max(prev, cur);
  }
  out.nondecreasing = out.max_relative_drop <= 1e-12;
  if (t_e) {
    for (const auto& smp : s) {
      if (smp.t < *t_e - time_eps(*t_e)) continue;
      const double v = smp.log10_omega();
      out.log10_lower = out.log10_lower ? std::min(*out.log10_lower, v) : v;
      out.log10_upper = out.log10_upper ? std::max(*out.log10_upper, v) : v;
    }
  }
  return out;
}

GrowthEnvelope growth_envelope(const SimulationTrace& trace, std::optional<double> sigma) {
  GrowthEnvelope g;
  std::vector<double> x, y;
  for (const auto& s : trace.samples) {
    if (s.Delta != 0.0) {
      x.push_back(s.t);
      y.push_back(s.log10_abs_delta() * std::numbers::ln10);
    }
  }
  if (x.size() < 2) return g;
  g.available = true;
  // The rise out of Delta = 0 says nothing about growth; fit from the peak on,
  // or over the second half if |Delta| is still climbing at the end.
  std::size_t from = static_cast<std::size_t>(std::max_element(y.begin(), y.end()) - y.begin());
  if (x.size() - from < 2) from = x.size() / 2;
  const std::vector<double> xt(x.begin() + static_cast<std::ptrdiff_t>(from), x.end());
  const std::vector<double> yt(y.begin() + static_cast<std::ptrdiff_t>(from), y.end());
  g.c2 = least_squares(xt, yt).slope;
  double cover = kNegInf;
  for (std::size_t i = 0; i < x.size(); ++i) cover = std::max(cover, y[i] - g.c2 * x[i]);
  g.log10_c1 = cover / std::numbers::ln10;
  if (sigma) g.condition_met = *sigma > 2.0 * g.c2;
  return g;
}

ExcitationReport analyze_excitation(const SimulationTrace& trace, const AnalysisOptions& opts) {
  ExcitationReport rep;
  const auto& s = trace.samples;
  if (s.size() < 2) throw ExcitationError("trace too short for analysis");
  const std::vector<double> t = times(trace);
  const std::size_t n = trace.n;
  rep.t_r_plus = t.front();
  rep.t_e = detect_excitation_end(trace);
  rep.t_onset = detect_adaptation_onset(trace);
  rep.q = regression_exponent(n);
  const double t_hi = rep.t_e.value_or(t.back());

  std::vector<std::vector<double>> big_phi, phi_bar;
  std::vector<double> phi, log_delta_sq;
  for (const auto& smp : s) {
    std::vector<double> bp = smp.x;
    bp.push_back(smp.u);
    big_phi.push_back(std::move(bp));
    std::vector<double> pb = smp.phi_bar_state;
    pb.push_back(smp.decay);
    phi_bar.push_back(std::move(pb));
    phi.push_back(smp.phi);
    log_delta_sq.push_back(2.0 * smp.log10_abs_delta());
  }
  const auto [i0, i1] = index_range(t, rep.t_r_plus, t_hi);
  rep.alpha = fe_level_scalar(t, phi, rep.t_r_plus, t_hi);
  rep.signals.push_back({"Phi", n + 1, fe_level_vector(t, big_phi, rep.t_r_plus, t_hi), false});
  rep.signals.push_back({"phi_bar", n + 2, fe_level_vector(t, phi_bar, rep.t_r_plus, t_hi), false});
  rep.signals.push_back({"phi", 1, rep.alpha, false});
  const double log_delta_int = log10_trapezoid(t, log_delta_sq, i0, i1);
  rep.signals.push_back({"Delta", 1, log_delta_int, true});
  rep.fe_satisfied = rep.t_e.has_value() && rep.alpha > 0.0 && std::isfinite(log_delta_int);

  rep.omega = omega_checks(trace, rep.t_e);
  rep.growth = growth_envelope(trace, opts.sigma);
  if (rep.growth.available && !rep.growth.condition_met) {
    rep.warnings.emplace_back("growth condition sigma > 2 c2 violated by the fitted envelope");
  }

  if (opts.log10_abs_C) {
    rep.log10_C = opts.log10_abs_C;
    rep.log10_C_source = "oracle";
  } else {
    rep.log10_C = estimate_log10_C(trace, rep.q);
    rep.log10_C_source = "trace";
  }
  if (!rep.t_e) {
    rep.bound_skipped = "no excitation end detected";
  } else if (!rep.log10_C) {
    rep.bound_skipped = "structural constant unavailable";
  } else {
    try {
      rep.integral_bound = integral_bound_check(trace, rep.q, *rep.log10_C, *rep.t_e);
    } catch (const ExcitationError& e) {
      rep.bound_skipped = e.what();
    }
  }

  rep.pe_window = opts.pe_window;
  try {
    const WindowedLevel pe = pe_check_windowed(t, phi_bar, opts.pe_window, opts.pe_start_stride);
    if (!pe.alpha.empty()) {
      rep.pe_alpha_min = *std::min_element(pe.alpha.begin(), pe.alpha.end());
      rep.pe_alpha_max = *std::max_element(pe.alpha.begin(), pe.alpha.end());
      rep.pe_alpha_last = pe.alpha.back();
    }
  } catch (const ExcitationError& e) {
    rep.warnings.emplace_back(std::string("windowed excitation skipped: ") + e.what());
  }

  if (trace.has_oracle) {
    for (const auto& smp : s) rep.drem_residual_max = std::max({rep.drem_residual_max, smp.zA_res, smp.zB_res});
  }
  return rep;
}

}  // namespace appc
