#include "appc/parameterization.hpp"

#include <cmath>
#include <limits>

namespace appc {

Mat stage1_rhs(const Mat& phi_bar_state, const Mat& x, double u, double l) {
  const std::size_t n = x.size();
  if (phi_bar_state.size() != n + 1) throw DimensionError("stage1_rhs: filter state must have n+1 entries");
  Mat d(n + 1, 1);
  for (std::size_t i = 0; i < n; ++i) d[i] = -l * phi_bar_state[i] + x[i];
  d[n] = -l * phi_bar_state[n] + u;
  return d;
}

Stage1Outputs stage1_outputs(const Mat& phi_bar_state, const Mat& x, double t, double l,
                             double t_start) {
  const std::size_t n = x.size();
  if (phi_bar_state.size() != n + 1) throw DimensionError("stage1_outputs: filter state must have n+1 entries");
  Mat z_bar(n, 1);
  for (std::size_t i = 0; i < n; ++i) z_bar[i] = x[i] - l * phi_bar_state[i];
  Mat phi_bar(n + 2, 1);
  for (std::size_t i = 0; i <= n; ++i) phi_bar[i] = phi_bar_state[i];
  phi_bar[n + 1] = std::exp(-l * (t - t_start));
  return {std::move(z_bar), std::move(phi_bar)};
}

DremDerivatives drem_rhs(const Mat& H_pp, const Mat& H_pz, const Mat& phi_bar, const Mat& z_bar,
                         double k) {
  const std::size_t m = phi_bar.size();
  const std::size_t n = z_bar.size();
  if (H_pp.rows() != m || H_pp.cols() != m || H_pz.rows() != m || H_pz.cols() != n) {
    throw DimensionError("drem_rhs: filter state shapes do not match the regressor");
  }
  DremDerivatives d{Mat(m, m), Mat(m, n)};
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) d.H_pp(i, j) = -k * H_pp(i, j) + phi_bar[i] * phi_bar[j];
    for (std::size_t j = 0; j < n; ++j) d.H_pz(i, j) = -k * H_pz(i, j) + phi_bar[i] * z_bar[j];
  }
  return d;
}

DremMix drem_mix(const Mat& H_pp, const Mat& H_pz) {
  return {adjugate(H_pp) * H_pz, det(H_pp)};
}

ScalarizedAB extract_AB(const Mat& z, double phi) {
  const std::size_t n = z.cols();
  if (z.rows() != n + 2) throw DimensionError("extract_AB: z must be (n+2) x n");
  Mat z_A(n, n);
  Mat z_B(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) z_A(i, j) = z(j, i);
    z_B[i] = z(n, i);
  }
  return {std::move(z_A), std::move(z_B), phi};
}

double gram_hadamard_ratio(const Mat& H) {
  if (!H.is_square()) throw DimensionError("gram_hadamard_ratio: expected a square matrix");
  double diag = 1.0;
  for (std::size_t i = 0; i < H.rows(); ++i) {
    if (!(H(i, i) > 0.0)) return 0.0;
    diag *= H(i, i);
  }
  return det(H) / diag;
}

int regression_exponent(std::size_t n) {
  const int m = static_cast<int>(n);
  return m * m * m * m + m * m * m + m * m + 1;
}

Stage2::Stage2(const Mat& Gamma, const Mat& h)
    : n_(Gamma.rows()),
      q_(regression_exponent(Gamma.rows())),
      h_(h),
      gamma_kron_(kron(Gamma.transpose(), Mat::identity(Gamma.rows()))),
      gamma_inv_(inverse(Gamma)) {
  if (!Gamma.is_square()) throw DimensionError("Stage2: Gamma must be square");
  if (h.rows() != n_ || h.cols() != 1) throw DimensionError("Stage2: h must be an n-column");
}

RegressionPair Stage2::operator()(const Mat& z_A, const Mat& z_B, double phi) const {
  const std::size_t n = n_;
  if (z_A.rows() != n || z_A.cols() != n || z_B.rows() != n || z_B.cols() != 1) {
    throw DimensionError("Stage2: z_A must be n x n and z_B an n-column");
  }
  // Sylvester equation for M with (A, B) replaced by their scaled estimates; Y_M = Delta_M M.
  const Mat lhs_M = -kron(Mat::identity(n), z_A) + gamma_kron_ * phi;
  const Mat rhs_M = vec(z_B * h_.transpose());
  const double delta_M = det(lhs_M);
  const Mat Y_M = unvec(adjugate(lhs_M) * rhs_M, n, n);

  // K_x from h^T = K_x M.
  const double delta_x = det(Y_M);
  const Mat Y_x = (adjugate(Y_M.transpose()) * (h_ * delta_M)).transpose();

  // K_r from the DC-gain condition, via the scaled inverse of M.
  const Mat Y_Minv = adjugate(Y_M) * delta_M;
  const double delta_Minv = delta_x;  // det(Y_M^T) == det(Y_M)
  const double delta_r = dot(h_, Y_M * gamma_inv_ * Y_Minv * z_B);
  const double Y_r = -phi * delta_M * delta_Minv;

  // adj(diag(delta_x I_n, delta_r)) = diag(delta_x^(n-1) delta_r I_n, delta_x^n).
  const double dx_pow = std::pow(delta_x, static_cast<double>(n - 1));
  RegressionPair out{Mat(n + 1, 1), dx_pow * delta_x * delta_r, delta_M, delta_x, delta_r};
  for (std::size_t i = 0; i < n; ++i) out.Y[i] = dx_pow * delta_r * Y_x[i];
  out.Y[n] = dx_pow * delta_x * Y_r;
  return out;
}

RegressionPair stage2_parameterize(const Mat& z_A, const Mat& z_B, double phi, const Mat& Gamma,
                                   const Mat& h) {
  return Stage2(Gamma, h)(z_A, z_B, phi);
}

double ScaledRegression::log_abs_delta() const {
  if (pair.Delta == 0.0) return -std::numeric_limits<double>::infinity();
  return log_scale + std::log(std::abs(pair.Delta));
}

ScaledRegression stage2_scaled(const Stage2& chain, const Mat& z_A, const Mat& z_B, double phi) {
  const std::size_t n = chain.n();
  if (phi == 0.0) {
    return {RegressionPair{Mat(n + 1, 1), 0.0}, -std::numeric_limits<double>::infinity()};
  }
  const double s = std::abs(phi);
  return {chain(z_A / s, z_B / s, phi / s), chain.exponent() * std::log(s)};
}

double StructuralConstants::C() const { return sign_C * std::exp(log_abs_C); }

StructuralConstants structural_constants(const PlantModel& plant, const IdealSolution& ideal,
                                         const Mat& Gamma) {
  const std::size_t n = plant.n();
  StructuralConstants c{};
  c.q = regression_exponent(n);
  c.C1 = det(sylvester_operator(plant.A, Gamma));
  c.C2 = det(ideal.M);
  c.C3 = dot(plant.h, solve_linear(ideal.A_sigma, plant.B));
  if (c.C1 == 0.0 || c.C2 == 0.0 || c.C3 == 0.0) {
    throw DegenerateDesignError("structural constant C vanishes");
  }
  const double e1 = static_cast<double>(n * n + n + 1);
  const double e2 = static_cast<double>(n + 1);
  c.log_abs_C = e1 * std::log(std::abs(c.C1)) + e2 * std::log(std::abs(c.C2)) + std::log(std::abs(c.C3));
  int sign = c.C3 < 0 ? -1 : 1;
  if (c.C1 < 0 && (n * n + n + 1) % 2 == 1) sign = -sign;
  if (c.C2 < 0 && (n + 1) % 2 == 1) sign = -sign;
  c.sign_C = sign;
  if (c.log_abs_C < std::log(1e-12)) {
    throw DegenerateDesignError("structural constant |C| below 1e-12");
  }
  return c;
}

}  // namespace appc
