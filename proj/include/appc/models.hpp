#pragma once

#include <string>
#include <vector>

#include "appc/matrix.hpp"

namespace appc {

/// Raised for structurally invalid plant data (e.g. zero input gain).
class InvalidPlantError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Single-input LTI plant x' = A x + B u with output y = h^T x.
/// Known to the simulator and the oracle, never to the controller.
struct PlantModel {
  Mat A;
  Mat B;
  Mat h;
  Mat x0;

  std::size_t n() const { return A.rows(); }
  void validate() const;
  bool operator==(const PlantModel&) const = default;
};

/// Autonomous generator chi' = Gamma chi, v = h^T chi; encodes the desired poles.
struct ModalModel {
  Mat Gamma;
  Mat chi0;

  void validate(std::size_t n) const;
  bool operator==(const ModalModel&) const = default;
};

/// x_ref' = A_sigma x_ref + B_ref r. Built from oracle data only.
struct ReferenceModel {
  Mat A_sigma;
  Mat B_ref;
  Mat xref0;
};

/// theta_hat = [K_x^T; K_r]; the last entry is the feed-forward gain.
struct ControllerParams {
  Mat theta_hat;

  double k_r() const { return theta_hat[theta_hat.size() - 1]; }
  /// Rejects a zero initial feed-forward gain.
  void validate(std::size_t n) const;
};

struct StrictFeedbackMatrices {
  Mat A;
  Mat B;
};

/// Builds (A, B) from the chained-integrator rows: row i of A is w_i^T plus a
/// 1 on the superdiagonal (i < n); B = b e_n.
StrictFeedbackMatrices assemble_strict_feedback(const std::vector<Mat>& w, double b);

struct StrictFeedbackRows {
  std::vector<Mat> w;
  double b;
  bool operator==(const StrictFeedbackRows&) const = default;
};

/// Inverse of assemble_strict_feedback. Throws InvalidPlantError when B is not
/// of the form b e_n with b != 0.
StrictFeedbackRows read_strict_feedback(const Mat& A, const Mat& B);

Mat plant_rhs(const Mat& x, double u, const PlantModel& plant);
Mat modal_rhs(const Mat& chi, const ModalModel& modal);
double modal_output(const Mat& chi, const Mat& h);
Mat reference_rhs(const Mat& xref, double r, const ReferenceModel& ref);

/// omega = [x^T, r]^T
Mat regressor_omega(const Mat& x, double r);
/// u = theta_hat^T omega
double control_law(const Mat& theta_hat, const Mat& x, double r);
Mat tracking_error(const Mat& x, const Mat& xref);

Mat controllability_matrix(const Mat& A, const Mat& B);
Mat observability_matrix(const Mat& A, const Mat& h);

/// Routh-Hurwitz test on a monic coefficient list (highest degree first).
bool is_hurwitz(const std::vector<double>& coeffs);

/// Degree of the greatest common divisor of two polynomials, computed by the
/// Euclidean algorithm; remainders with max |coef| <= tol (relative to the
/// divisor scale) are treated as zero.
std::size_t poly_gcd_degree(std::vector<double> a, std::vector<double> b, double tol = 1e-8);

/// True when char_poly(A) and char_poly(Gamma) share no root.
bool spectra_disjoint(const Mat& A, const Mat& Gamma, double tol = 1e-8);

/// Checks controllability of (A, B), observability of (A, h^T) and
/// (Gamma, h^T), Hurwitz Gamma and disjoint spectra. Returns one message per
/// violated requirement; the controller never uses this knowledge.
std::vector<std::string> design_warnings(const PlantModel& plant, const ModalModel& modal);

}  // namespace appc
