#include "appc/models.hpp"

#include <algorithm>
#include <cmath>

namespace appc {

namespace {

void require_column(const Mat& v, std::size_t n, const char* what) {
  if (v.rows() != n || v.cols() != 1) {
    throw DimensionError(std::string(what) + ": expected a " + std::to_string(n) +
                         "-column, got " + std::to_string(v.rows()) + "x" +
                         std::to_string(v.cols()));
  }
}

// Normalizes so the leading coefficient is 1 and strips leading near-zeros.
std::vector<double> monic(std::vector<double> p, double tol) {
  const double scale = std::max(1.0, *std::max_element(p.begin(), p.end(), [](double x, double y) {
    return std::abs(x) < std::abs(y);
  }));
  while (!p.empty() && std::abs(p.front()) <= tol * scale) p.erase(p.begin());
  if (p.empty()) return p;
  const double lead = p.front();
  for (double& c : p) c /= lead;
  return p;
}

}  // namespace

void PlantModel::validate() const {
  if (!A.is_square()) throw DimensionError("plant: A must be square");
  const std::size_t n = A.rows();
  require_column(B, n, "plant.B");
  require_column(h, n, "plant.h");
  require_column(x0, n, "plant.x0");
}

void ModalModel::validate(std::size_t n) const {
  if (Gamma.rows() != n || Gamma.cols() != n) {
    throw DimensionError("modal: Gamma must be " + std::to_string(n) + "x" + std::to_string(n));
  }
  require_column(chi0, n, "modal.chi0");
}

void ControllerParams::validate(std::size_t n) const {
  require_column(theta_hat, n + 1, "theta_hat");
  if (k_r() == 0.0) throw std::invalid_argument("theta_hat: initial K_r must be nonzero");
}

StrictFeedbackMatrices assemble_strict_feedback(const std::vector<Mat>& w, double b) {
  if (b == 0.0) throw InvalidPlantError("strict-feedback plant: input gain b must be nonzero");
  const std::size_t n = w.size();
  if (n == 0) throw DimensionError("strict-feedback plant: no rows given");
  Mat A(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    require_column(w[i], n, "strict-feedback row w_i");
    for (std::size_t j = 0; j < n; ++j) A(i, j) = w[i][j];
    if (i + 1 < n) A(i, i + 1) += 1.0;
  }
  Mat B(n, 1);
  B[n - 1] = b;
  return {std::move(A), std::move(B)};
}

StrictFeedbackRows read_strict_feedback(const Mat& A, const Mat& B) {
  if (!A.is_square()) throw DimensionError("read_strict_feedback: A must be square");
  const std::size_t n = A.rows();
  require_column(B, n, "read_strict_feedback: B");
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (B[i] != 0.0) throw InvalidPlantError("B is not of the form b*e_n");
  }
  const double b = B[n - 1];
  if (b == 0.0) throw InvalidPlantError("strict-feedback plant: input gain b must be nonzero");
  StrictFeedbackRows out{{}, b};
  for (std::size_t i = 0; i < n; ++i) {
    Mat wi = A.row(i).transpose();
    if (i + 1 < n) wi[i + 1] -= 1.0;
    out.w.push_back(std::move(wi));
  }
  return out;
}

Mat plant_rhs(const Mat& x, double u, const PlantModel& plant) {
  require_column(x, plant.n(), "plant_rhs: x");
  return plant.A * x + plant.B * u;
}

Mat modal_rhs(const Mat& chi, const ModalModel& modal) {
  require_column(chi, modal.Gamma.rows(), "modal_rhs: chi");
  return modal.Gamma * chi;
}

double modal_output(const Mat& chi, const Mat& h) { return dot(h, chi); }

Mat reference_rhs(const Mat& xref, double r, const ReferenceModel& ref) {
  require_column(xref, ref.A_sigma.rows(), "reference_rhs: xref");
  return ref.A_sigma * xref + ref.B_ref * r;
}

Mat regressor_omega(const Mat& x, double r) {
  Mat w(x.size() + 1, 1);
  for (std::size_t i = 0; i < x.size(); ++i) w[i] = x[i];
  w[x.size()] = r;
  return w;
}

double control_law(const Mat& theta_hat, const Mat& x, double r) {
  require_column(theta_hat, x.size() + 1, "control_law: theta_hat");
  return dot(theta_hat, regressor_omega(x, r));
}

Mat tracking_error(const Mat& x, const Mat& xref) {
  if (x.size() != xref.size()) throw DimensionError("tracking_error: size mismatch");
  return x - xref;
}

Mat controllability_matrix(const Mat& A, const Mat& B) {
  const std::size_t n = A.rows();
  Mat C(n, n);
  Mat col = B;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) C(i, j) = col[i];
    col = A * col;
  }
  return C;
}

Mat observability_matrix(const Mat& A, const Mat& h) {
  return controllability_matrix(A.transpose(), h).transpose();
}

bool is_hurwitz(const std::vector<double>& coeffs) {
  if (coeffs.empty() || coeffs.front() <= 0.0) return false;
  const std::size_t deg = coeffs.size() - 1;
  if (deg == 0) return true;
  for (double c : coeffs) {
    if (!(c > 0.0)) return false;
  }
  // Routh array, two rows at a time.
  std::vector<double> r0, r1;
  for (std::size_t i = 0; i <= deg; i += 2) r0.push_back(coeffs[i]);
  for (std::size_t i = 1; i <= deg; i += 2) r1.push_back(coeffs[i]);
  for (std::size_t row = 2; row <= deg; ++row) {
    if (r1.empty() || !(r1.front() > 0.0)) return false;
    std::vector<double> next;
    for (std::size_t j = 0; j + 1 < r0.size(); ++j) {
      const double b = j + 1 < r1.size() ? r1[j + 1] : 0.0;
      next.push_back((r1.front() * r0[j + 1] - r0.front() * b) / r1.front());
    }
    r0 = std::move(r1);
    r1 = std::move(next);
  }
  return !r1.empty() && r1.front() > 0.0;
}

std::size_t poly_gcd_degree(std::vector<double> a, std::vector<double> b, double tol) {
  a = monic(std::move(a), tol);
  b = monic(std::move(b), tol);
  if (a.empty() || b.empty()) return 0;
  if (a.size() < b.size()) std::swap(a, b);
  while (b.size() > 1) {
    // r = a mod b
    std::vector<double> r = a;
    while (r.size() >= b.size()) {
      const double f = r.front() / b.front();
      for (std::size_t i = 0; i < b.size(); ++i) r[i] -= f * b[i];
      r.erase(r.begin());
    }
    double bscale = 0.0;
    for (double c : b) bscale = std::max(bscale, std::abs(c));
    double rmax = 0.0;
    for (double c : r) rmax = std::max(rmax, std::abs(c));
    if (rmax <= tol * std::max(1.0, bscale)) return b.size() - 1;
    a = std::move(b);
    b = monic(std::move(r), tol);
    if (b.empty()) return a.size() - 1;
  }
  return 0;
}

bool spectra_disjoint(const Mat& A, const Mat& Gamma, double tol) {
  return poly_gcd_degree(char_poly(A), char_poly(Gamma), tol) == 0;
}

std::vector<std::string> design_warnings(const PlantModel& plant, const ModalModel& modal) {
  std::vector<std::string> out;
  const std::size_t n = plant.n();
  auto rank_deficient = [n](const Mat& m) {
    const double scale = std::max(1.0, norm_inf(m));
    return std::abs(det(m)) < 1e-12 * std::pow(scale, static_cast<double>(n));
  };
  if (rank_deficient(controllability_matrix(plant.A, plant.B)))
    out.emplace_back("pair (A, B) is not controllable");
  if (rank_deficient(observability_matrix(plant.A, plant.h)))
    out.emplace_back("pair (A, h^T) is not observable");
  if (rank_deficient(observability_matrix(modal.Gamma, plant.h)))
    out.emplace_back("pair (Gamma, h^T) is not observable");
  if (!is_hurwitz(char_poly(modal.Gamma))) out.emplace_back("Gamma is not Hurwitz");
  if (!spectra_disjoint(plant.A, modal.Gamma)) out.emplace_back("A and Gamma share an eigenvalue");
  return out;
}

}  // namespace appc
