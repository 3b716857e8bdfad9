#include "appc/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <utility>

namespace appc {

namespace {

std::string shape(const Mat& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_square(const Mat& m, const char* op) {
  if (!m.is_square()) {
    throw DimensionError(std::string(op) + ": expected a square matrix, got " + shape(m));
  }
}

// Matrix with row `skip_r` and column `skip_c` removed.
Mat minor_of(const Mat& m, std::size_t skip_r, std::size_t skip_c) {
  const std::size_t n = m.rows();
  Mat out(n - 1, n - 1);
  for (std::size_t i = 0, oi = 0; i < n; ++i) {
    if (i == skip_r) continue;
    for (std::size_t j = 0, oj = 0; j < n; ++j) {
      if (j == skip_c) continue;
      out(oi, oj++) = m(i, j);
    }
    ++oi;
  }
  return out;
}

double det3(const Mat& m) {
  return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
         m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
         m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

double det_cofactor(const Mat& m);

double det_bareiss(Mat a) {
  const std::size_t n = a.rows();
  double sign = 1.0;
  double prev = 1.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
    }
    if (a(p, k) == 0.0) return 0.0;
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(a(p, j), a(k, j));
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        a(i, j) = (a(i, j) * a(k, k) - a(i, k) * a(k, j)) / prev;
      }
      a(i, k) = 0.0;
    }
    prev = a(k, k);
  }
  return sign * a(n - 1, n - 1);
}

double det_dispatch(const Mat& m) {
  switch (m.rows()) {
    case 1:
      return m(0, 0);
    case 2:
      return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    case 3:
      return det3(m);
    case 4:
    case 5:
    case 6:
      return det_cofactor(m);
    default:
      return det_bareiss(m);
  }
}

// Laplace expansion along the first row.
double det_cofactor(const Mat& m) {
  double acc = 0.0;
  double sign = 1.0;
  for (std::size_t j = 0; j < m.cols(); ++j) {
    if (m(0, j) != 0.0) acc += sign * m(0, j) * det_dispatch(minor_of(m, 0, j));
    sign = -sign;
  }
  return acc;
}

}  // namespace

Mat::Mat(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
  if (rows == 0 || cols == 0) throw DimensionError("Mat: shape must be at least 1x1");
}

Mat::Mat(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (rows == 0 || cols == 0) throw DimensionError("Mat: shape must be at least 1x1");
  if (data_.size() != rows * cols) {
    throw DimensionError("Mat: " + std::to_string(data_.size()) + " entries for shape " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
  for (double v : data_) {
    if (!std::isfinite(v)) throw std::invalid_argument("Mat: non-finite entry");
  }
}

Mat Mat::identity(std::size_t n) {
  Mat m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::column(std::span<const double> values) {
  return Mat(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

Mat Mat::column(std::initializer_list<double> values) {
  return Mat(values.size(), 1, std::vector<double>(values));
}

Mat Mat::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<std::vector<double>> tmp;
  tmp.reserve(rows.size());
  for (const auto& r : rows) tmp.emplace_back(r);
  return from_rows(tmp);
}

Mat Mat::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty() || rows.front().empty()) throw DimensionError("Mat::from_rows: empty input");
  const std::size_t cols = rows.front().size();
  std::vector<double> flat;
  flat.reserve(rows.size() * cols);
  for (const auto& r : rows) {
    if (r.size() != cols) throw DimensionError("Mat::from_rows: ragged rows");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return Mat(rows.size(), cols, std::move(flat));
}

Mat Mat::diagonal(std::span<const double> values) {
  Mat m(values.size(), values.size());
  for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
  return m;
}

std::vector<std::vector<double>> Mat::to_rows() const {
  std::vector<std::vector<double>> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) {
    out[i].assign(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                  data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
  }
  return out;
}

Mat Mat::transpose() const {
  Mat t(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Mat Mat::block(std::size_t r0, std::size_t c0, std::size_t rows, std::size_t cols) const {
  if (r0 + rows > rows_ || c0 + cols > cols_) {
    throw DimensionError("Mat::block: out of range on " + shape(*this));
  }
  Mat b(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) b(i, j) = (*this)(r0 + i, c0 + j);
  return b;
}

double Mat::trace() const {
  require_square(*this, "trace");
  double t = 0.0;
  for (std::size_t i = 0; i < rows_; ++i) t += (*this)(i, i);
  return t;
}

Mat& Mat::operator+=(const Mat& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw DimensionError("add: " + shape(*this) + " vs " + shape(other));
  }
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

Mat& Mat::operator-=(const Mat& other) {
  if (rows_ != other.rows_ || cols_ != other.cols_) {
    throw DimensionError("subtract: " + shape(*this) + " vs " + shape(other));
  }
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

Mat& Mat::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

Mat& Mat::operator/=(double s) {
  for (double& v : data_) v /= s;
  return *this;
}

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw DimensionError("multiply: " + shape(a) + " * " + shape(b));
  Mat c(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

double max_abs(const Mat& m) {
  double best = 0.0;
  for (double v : m.data()) best = std::max(best, std::abs(v));
  return best;
}

double norm_inf(const Mat& m) {
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.cols(); ++j) s += std::abs(m(i, j));
    best = std::max(best, s);
  }
  return best;
}

double norm2(const Mat& v) {
  double s = 0.0;
  for (double x : v.data()) s += x * x;
  return std::sqrt(s);
}

double dot(const Mat& a, const Mat& b) {
  if (a.size() != b.size()) throw DimensionError("dot: " + shape(a) + " vs " + shape(b));
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

bool all_finite(const Mat& m) {
  return std::all_of(m.data().begin(), m.data().end(), [](double v) { return std::isfinite(v); });
}

double det(const Mat& m) {
  require_square(m, "det");
  if (m.rows() > kMaxDeterminantSize) {
    throw DimensionError("det: size " + std::to_string(m.rows()) + " exceeds " +
                         std::to_string(kMaxDeterminantSize));
  }
  return det_dispatch(m);
}

Mat adjugate(const Mat& m) {
  require_square(m, "adjugate");
  const std::size_t n = m.rows();
  if (n > kMaxDeterminantSize) throw DimensionError("adjugate: matrix too large");
  if (n == 1) return Mat::identity(1);
  if (n == 2) return Mat(2, 2, {m(1, 1), -m(0, 1), -m(1, 0), m(0, 0)});
  Mat adj(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double sign = ((i + j) % 2 == 0) ? 1.0 : -1.0;
      adj(j, i) = sign * det_dispatch(minor_of(m, i, j));
    }
  }
  return adj;
}

Mat kron(const Mat& a, const Mat& b) {
  Mat k(a.rows() * b.rows(), a.cols() * b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j)
      for (std::size_t p = 0; p < b.rows(); ++p)
        for (std::size_t q = 0; q < b.cols(); ++q)
          k(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
  return k;
}

Mat vec(const Mat& m) {
  Mat v(m.size(), 1);
  std::size_t k = 0;
  for (std::size_t j = 0; j < m.cols(); ++j)
    for (std::size_t i = 0; i < m.rows(); ++i) v[k++] = m(i, j);
  return v;
}

Mat unvec(const Mat& v, std::size_t rows, std::size_t cols) {
  if (v.size() != rows * cols) {
    throw DimensionError("unvec: " + std::to_string(v.size()) + " entries for " +
                         std::to_string(rows) + "x" + std::to_string(cols));
  }
  Mat m(rows, cols);
  std::size_t k = 0;
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < rows; ++i) m(i, j) = v[k++];
  return m;
}

// Faddeev-LeVerrier: M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k)/k.
std::vector<double> char_poly(const Mat& m) {
  require_square(m, "char_poly");
  const std::size_t n = m.rows();
  std::vector<double> coeffs(n + 1, 0.0);
  coeffs[0] = 1.0;
  Mat mk(n, n);
  for (std::size_t k = 1; k <= n; ++k) {
    mk = m * mk;
    for (std::size_t i = 0; i < n; ++i) mk(i, i) += coeffs[k - 1];
    coeffs[k] = -(m * mk).trace() / static_cast<double>(k);
  }
  return coeffs;
}

Mat solve_linear(const Mat& a, const Mat& b) {
  require_square(a, "solve_linear");
  if (b.rows() != a.rows()) throw DimensionError("solve_linear: " + shape(a) + " vs rhs " + shape(b));
  const std::size_t n = a.rows();
  const double scale = norm_inf(a);
  Mat lu = a;
  Mat x = b;
  double det_lu = 1.0;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i) {
      if (std::abs(lu(i, k)) > std::abs(lu(p, k))) p = i;
    }
    if (p != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu(p, j), lu(k, j));
      for (std::size_t j = 0; j < x.cols(); ++j) std::swap(x(p, j), x(k, j));
      det_lu = -det_lu;
    }
    det_lu *= lu(k, k);
    if (lu(k, k) == 0.0) break;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = lu(i, k) / lu(k, k);
      for (std::size_t j = k; j < n; ++j) lu(i, j) -= f * lu(k, j);
      for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) -= f * x(k, j);
    }
  }
  const double abs_det = std::abs(det_lu);
  if (!(abs_det >= 1e-12 * std::pow(scale, static_cast<double>(n))) || scale == 0.0) {
    throw SingularMatrixError("solve_linear: singular system, |det| = " + std::to_string(abs_det),
                              abs_det);
  }
  for (std::size_t ii = n; ii-- > 0;) {
    for (std::size_t j = 0; j < x.cols(); ++j) {
      double s = x(ii, j);
      for (std::size_t k = ii + 1; k < n; ++k) s -= lu(ii, k) * x(k, j);
      x(ii, j) = s / lu(ii, ii);
    }
  }
  return x;
}

Mat inverse(const Mat& a) { return solve_linear(a, Mat::identity(a.rows())); }

}  // namespace appc
