#include "appc/oracle.hpp"

#include <algorithm>
#include <cmath>

namespace appc {

Mat sylvester_operator(const Mat& A, const Mat& Gamma) {
  const std::size_t n = A.rows();
  const Mat eye = Mat::identity(n);
  return -kron(eye, A) + kron(Gamma.transpose(), eye);
}

Mat solve_M(const Mat& A, const Mat& B, const Mat& Gamma, const Mat& h) {
  const std::size_t n = A.rows();
  if (!A.is_square() || Gamma.rows() != n || !Gamma.is_square() || B.rows() != n || h.rows() != n) {
    throw DimensionError("solve_M: inconsistent dimensions");
  }
  Mat vm(n * n, 1);
  try {
    vm = solve_linear(sylvester_operator(A, Gamma), vec(B * h.transpose()));
  } catch (const SingularMatrixError&) {
    throw SharedSpectrumError("A and Gamma share an eigenvalue; Sylvester operator is singular");
  }
  Mat M = unvec(vm, n, n);
  const double scale = std::max(1.0, norm_inf(M));
  if (std::abs(det(M)) < 1e-12 * std::pow(scale, static_cast<double>(n))) {
    throw DegenerateDesignError("M is singular: (A, B) uncontrollable or (Gamma, h^T) unobservable");
  }
  return M;
}

IdealSolution ideal_gains(const Mat& M, const Mat& A, const Mat& B, const Mat& h) {
  const std::size_t n = A.rows();
  // K_x M = h^T  <=>  M^T K_x^T = h
  Mat K_x = solve_linear(M.transpose(), h).transpose();
  Mat A_sigma = A + B * K_x;
  Mat w(n, 1);
  try {
    w = solve_linear(A_sigma, B);
  } catch (const SingularMatrixError&) {
    throw DegenerateDesignError("closed-loop matrix is singular; feed-forward gain undefined");
  }
  const double dc = dot(h, w);
  if (dc == 0.0) throw DegenerateDesignError("h^T A_sigma^-1 B vanishes; feed-forward gain undefined");
  const double K_r = -1.0 / dc;
  Mat theta(n + 1, 1);
  for (std::size_t i = 0; i < n; ++i) theta[i] = K_x[i];
  theta[n] = K_r;
  Mat B_ref = B * K_r;
  return {M, std::move(A_sigma), std::move(K_x), K_r, std::move(theta), std::move(B_ref)};
}

IdealSolution solve_ideal(const PlantModel& plant, const ModalModel& modal) {
  Mat M = solve_M(plant.A, plant.B, modal.Gamma, plant.h);
  return ideal_gains(M, plant.A, plant.B, plant.h);
}

Mat gains_by_coefficient_matching(const Mat& A, const Mat& B, const Mat& Gamma) {
  const std::size_t n = A.rows();
  const std::vector<double> target = char_poly(Gamma);
  auto coeffs_for = [&](const Mat& K) { return char_poly(A + B * K); };
  const std::vector<double> c0 = coeffs_for(Mat(1, n));
  // Column j of the sensitivity holds the coefficient change for K = e_j^T.
  Mat S(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    Mat K(1, n);
    K[j] = 1.0;
    const std::vector<double> cj = coeffs_for(K);
    for (std::size_t i = 0; i < n; ++i) S(i, j) = cj[i + 1] - c0[i + 1];
  }
  Mat rhs(n, 1);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = target[i + 1] - c0[i + 1];
  return solve_linear(S, rhs).transpose();
}

OracleResiduals residuals(const IdealSolution& ideal, const PlantModel& plant,
                          const ModalModel& modal) {
  OracleResiduals r{};
  r.sylvester = max_abs(ideal.M * modal.Gamma - plant.A * ideal.M - plant.B * plant.h.transpose());
  r.output_map = max_abs(plant.h.transpose() - ideal.K_x * ideal.M);
  const auto ca = char_poly(ideal.A_sigma);
  const auto cg = char_poly(modal.Gamma);
  for (std::size_t i = 0; i < ca.size(); ++i) {
    r.char_poly_gap = std::max(r.char_poly_gap, std::abs(ca[i] - cg[i]));
  }
  const Mat w = solve_linear(-ideal.A_sigma, plant.B);
  r.dc_gain_gap = std::abs(dot(plant.h, w) * ideal.K_r - 1.0);
  return r;
}

std::vector<double> ideal_control(const Mat& theta_star, const std::vector<Mat>& states,
                                  const std::vector<double>& reference) {
  if (states.size() != reference.size()) throw DimensionError("ideal_control: length mismatch");
  std::vector<double> u(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    u[i] = control_law(theta_star, states[i], reference[i]);
  }
  return u;
}

Mat reference_steady_state(const IdealSolution& ideal, double r) {
  return solve_linear(ideal.A_sigma, ideal.B_ref * (-r));
}

ReferenceModel make_reference_model(const IdealSolution& ideal, const Mat& xref0) {
  return {ideal.A_sigma, ideal.B_ref, xref0};
}

}  // namespace appc
