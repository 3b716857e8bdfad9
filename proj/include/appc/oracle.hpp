#pragma once

#include <vector>

#include "appc/matrix.hpp"
#include "appc/models.hpp"

namespace appc {

/// The Sylvester operator -I (x) A + Gamma^T (x) I is singular.
class SharedSpectrumError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// M (or A_sigma) came out singular: the design requirements on (A, B, h, Gamma) fail.
class DegenerateDesignError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ground truth for one plant/modal pair. Test and reporting side only.
struct IdealSolution {
  Mat M;
  Mat A_sigma;
  Mat K_x;  // 1 x n
  double K_r;
  Mat theta_star;  // [K_x^T; K_r]
  Mat B_ref;       // B * K_r
};

struct OracleResiduals {
  double sylvester;      // ||M Gamma - A M - B h^T||_max
  double output_map;     // ||h^T - K_x M||_max
  double char_poly_gap;  // max coefficient gap between A_sigma and Gamma
  double dc_gain_gap;    // |h^T (-A_sigma)^-1 B K_r - 1|
};

/// -I (x) A + Gamma^T (x) I, the vectorized Sylvester operator.
Mat sylvester_operator(const Mat& A, const Mat& Gamma);

/// Solves M Gamma - A M = B h^T.
Mat solve_M(const Mat& A, const Mat& B, const Mat& Gamma, const Mat& h);

IdealSolution ideal_gains(const Mat& M, const Mat& A, const Mat& B, const Mat& h);
IdealSolution solve_ideal(const PlantModel& plant, const ModalModel& modal);

/// Independent path: det(lambda I - A - B K) is affine in K, so matching
/// coefficients against char_poly(Gamma) is a linear system in K.
Mat gains_by_coefficient_matching(const Mat& A, const Mat& B, const Mat& Gamma);

OracleResiduals residuals(const IdealSolution& ideal, const PlantModel& plant, const ModalModel& modal);

/// u*(t_i) = K_x x(t_i) + K_r r(t_i) along recorded states.
std::vector<double> ideal_control(const Mat& theta_star, const std::vector<Mat>& states,
                                  const std::vector<double>& reference);

/// Steady state of the ideal reference model for a constant r.
Mat reference_steady_state(const IdealSolution& ideal, double r);

ReferenceModel make_reference_model(const IdealSolution& ideal, const Mat& xref0);

}  // namespace appc
