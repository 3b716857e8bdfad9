#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace appc {

/// Thrown when operand shapes do not conform.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown by solve_linear when the system matrix is numerically singular.
class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(const std::string& what, double abs_det)
      : std::runtime_error(what), abs_det_(abs_det) {}
  double abs_det() const noexcept { return abs_det_; }

 private:
  double abs_det_;
};

/**
 * Small dense real matrix, row-major, value semantics.
 *
 * Column vectors are n x 1 matrices. Shapes are always at least 1 x 1, and
 * constructors that take caller data reject NaN/Inf entries. Results of
 * arithmetic are not re-validated.
 */
class Mat {
 public:
  Mat(std::size_t rows, std::size_t cols);
  Mat(std::size_t rows, std::size_t cols, std::vector<double> row_major);

  static Mat identity(std::size_t n);
  static Mat zeros(std::size_t rows, std::size_t cols) { return Mat(rows, cols); }
  static Mat column(std::span<const double> values);
  static Mat column(std::initializer_list<double> values);
  static Mat from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Mat from_rows(const std::vector<std::vector<double>>& rows);
  static Mat diagonal(std::span<const double> values);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool is_square() const noexcept { return rows_ == cols_; }
  bool is_column() const noexcept { return cols_ == 1; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }
  // Flat (row-major) access; for column vectors this is the element index.
  double& operator[](std::size_t k) { return data_[k]; }
  double operator[](std::size_t k) const { return data_[k]; }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  std::vector<std::vector<double>> to_rows() const;

  Mat transpose() const;
  Mat block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) const;
  Mat col(std::size_t j) const { return block(0, j, rows_, 1); }
  Mat row(std::size_t i) const { return block(i, 0, 1, cols_); }
  double trace() const;

  Mat& operator+=(const Mat& other);
  Mat& operator-=(const Mat& other);
  Mat& operator*=(double s);
  Mat& operator/=(double s);

  friend Mat operator+(Mat a, const Mat& b) { return a += b; }
  friend Mat operator-(Mat a, const Mat& b) { return a -= b; }
  friend Mat operator-(Mat a) { return a *= -1.0; }
  friend Mat operator*(Mat a, double s) { return a *= s; }
  friend Mat operator*(double s, Mat a) { return a *= s; }
  friend Mat operator/(Mat a, double s) { return a /= s; }
  friend Mat operator*(const Mat& a, const Mat& b);

  bool operator==(const Mat& other) const = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

// Norms and scalar helpers.
double max_abs(const Mat& m);
double norm_inf(const Mat& m);  // max absolute row sum
double norm2(const Mat& v);     // Euclidean norm of all entries
double dot(const Mat& a, const Mat& b);
bool all_finite(const Mat& m);

/// Largest matrix size accepted by det/adjugate.
inline constexpr std::size_t kMaxDeterminantSize = 16;

/// Determinant. Closed form up to 3x3, cofactor expansion to 6x6, Bareiss
/// elimination with row pivoting above that.
double det(const Mat& m);

/// Classical adjoint; defined for singular input. adj of a 1x1 is [[1]].
Mat adjugate(const Mat& m);

Mat kron(const Mat& a, const Mat& b);

/// Stacks columns one under another.
Mat vec(const Mat& m);
Mat unvec(const Mat& v, std::size_t rows, std::size_t cols);

/// Coefficients of det(lambda*I - m), highest degree first, leading 1.
std::vector<double> char_poly(const Mat& m);

/// Solves a*x = b by partial-pivot elimination. Throws SingularMatrixError
/// when |det a| < 1e-12 * norm_inf(a)^size.
Mat solve_linear(const Mat& a, const Mat& b);
Mat inverse(const Mat& a);

}  // namespace appc
