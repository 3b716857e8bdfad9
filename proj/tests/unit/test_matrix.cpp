#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "appc/matrix.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using appc::Mat;
using fixtures::to_mat;

namespace {

double max_diff(const Mat& a, const Mat& b) { return appc::max_abs(a - b); }

}  // namespace

TEST(Mat, ConstructionRejectsNonFinite) {
  EXPECT_THROW(Mat(2, 1, {1.0, std::nan("")}), std::invalid_argument);
  EXPECT_THROW(Mat(2, 2, {1.0, 2.0}), appc::DimensionError);
  EXPECT_THROW(Mat(0, 2), appc::DimensionError);
}

TEST(Mat, ProductShapeMismatchThrows) {
  EXPECT_THROW(Mat(2, 3) * Mat(2, 3), appc::DimensionError);
  EXPECT_THROW(Mat(2, 2) + Mat(2, 1), appc::DimensionError);
}

TEST(Det, SmallCases) {
  EXPECT_EQ(appc::det(Mat::from_rows({{7}})), 7.0);
  EXPECT_EQ(appc::det(Mat::identity(4)), 1.0);
  EXPECT_NEAR(appc::det(Mat::from_rows({{-4, 1}, {-8, 0}})), 8.0, 1e-15);
  EXPECT_THROW(appc::det(Mat(2, 3)), appc::DimensionError);
}

TEST(Det, MatchesPermutationExpansion) {
  std::mt19937_64 rng(11);
  for (std::size_t n = 1; n <= 8; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto rows = ref::random_rows(rng, n, n);
      const double want = ref::leibniz_det(rows);
      EXPECT_NEAR(appc::det(to_mat(rows)), want, 1e-10 * std::max(1.0, std::abs(want))) << "n=" << n;
    }
  }
}

TEST(Det, LargeSizeUsesEliminationPath) {
  // Block-diagonal with known determinant.
  Mat m = Mat::identity(10);
  for (std::size_t i = 0; i < 10; ++i) m(i, i) = static_cast<double>(i + 1);
  m(0, 9) = 3.0;
  EXPECT_NEAR(appc::det(m), 3628800.0, 1e-6);
  EXPECT_THROW(appc::det(Mat::identity(17)), appc::DimensionError);
}

TEST(Adjugate, ClosedFormAndEdgeCases) {
  const Mat a = Mat::from_rows({{1, 2}, {3, 4}});
  EXPECT_EQ(appc::adjugate(a), Mat::from_rows({{4, -2}, {-3, 1}}));
  EXPECT_EQ(appc::adjugate(Mat::zeros(3, 3)), Mat::zeros(3, 3));
  EXPECT_EQ(appc::adjugate(Mat::from_rows({{5}})), Mat::from_rows({{1}}));
}

TEST(Adjugate, MatchesCofactorDefinition) {
  std::mt19937_64 rng(12);
  for (std::size_t n = 2; n <= 6; ++n) {
    const auto rows = ref::random_rows(rng, n, n);
    EXPECT_LT(max_diff(appc::adjugate(to_mat(rows)), to_mat(ref::cofactor_adjugate(rows))), 1e-9) << n;
  }
}

TEST(Adjugate, SingularInputStillSatisfiesIdentity) {
  const Mat m = Mat::from_rows({{1, 2, 3}, {2, 4, 6}, {1, 0, 1}});
  EXPECT_LT(appc::max_abs(appc::adjugate(m) * m), 1e-12);
}

TEST(Kron, DefinitionAndMixedProduct) {
  const Mat swap = Mat::from_rows({{0, 1}, {1, 0}});
  EXPECT_EQ(appc::kron(Mat::from_rows({{1}}), swap), swap);
  const Mat k = appc::kron(Mat::identity(2), swap);
  EXPECT_EQ(k, Mat::from_rows({{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}));

  std::mt19937_64 rng(13);
  for (int rep = 0; rep < 50; ++rep) {
    const Mat a = to_mat(ref::random_rows(rng, 2, 2)), b = to_mat(ref::random_rows(rng, 2, 2));
    const Mat c = to_mat(ref::random_rows(rng, 2, 2)), d = to_mat(ref::random_rows(rng, 2, 2));
    EXPECT_LT(max_diff(appc::kron(a, b) * appc::kron(c, d), appc::kron(a * c, b * d)), 1e-12);
  }
}

TEST(Kron, DeterminantRule) {
  std::mt19937_64 rng(14);
  for (std::size_t na = 1; na <= 3; ++na) {
    for (std::size_t nb = 1; nb <= 3; ++nb) {
      const Mat a = to_mat(ref::random_rows(rng, na, na)), b = to_mat(ref::random_rows(rng, nb, nb));
      const double want = std::pow(appc::det(a), nb) * std::pow(appc::det(b), na);
      EXPECT_NEAR(appc::det(appc::kron(a, b)), want, 1e-9 * std::max(1.0, std::abs(want)));
    }
  }
}

TEST(Vec, ColumnStackingAndInverse) {
  const Mat m = Mat::from_rows({{1, 2}, {3, 4}});
  EXPECT_EQ(appc::vec(m), Mat::column({1, 3, 2, 4}));
  EXPECT_EQ(appc::unvec(Mat::column({1, 3, 2, 4}), 2, 2), m);
  EXPECT_THROW(appc::unvec(Mat::column({1, 2, 3}), 2, 2), appc::DimensionError);
  const Mat r = Mat::from_rows({{1, 2, 3}, {4, 5, 6}});
  EXPECT_EQ(appc::unvec(appc::vec(r), 2, 3), r);
}

TEST(Vec, KroneckerIdentity) {
  std::mt19937_64 rng(15);
  for (std::size_t n : {2u, 3u}) {
    for (int rep = 0; rep < 20; ++rep) {
      const Mat a = to_mat(ref::random_rows(rng, n, n)), x = to_mat(ref::random_rows(rng, n, n));
      const Mat b = to_mat(ref::random_rows(rng, n, n));
      EXPECT_LT(max_diff(appc::vec(a * x * b), appc::kron(b.transpose(), a) * appc::vec(x)), 1e-10);
    }
  }
}

TEST(CharPoly, Examples) {
  const auto g = appc::char_poly(Mat::from_rows({{-4, 1}, {-8, 0}}));
  ASSERT_EQ(g.size(), 3u);
  EXPECT_NEAR(g[1], 4.0, 1e-14);
  EXPECT_NEAR(g[2], 8.0, 1e-14);
  EXPECT_EQ(appc::char_poly(Mat::identity(2)), (std::vector<double>{1, -2, 1}));
  const auto d = appc::char_poly(Mat::diagonal(std::vector<double>{2.0, -3.0}));
  EXPECT_NEAR(d[1], 1.0, 1e-14);   // -(2 - 3)
  EXPECT_NEAR(d[2], -6.0, 1e-14);  // 2 * -3
  EXPECT_THROW(appc::char_poly(Mat(2, 3)), appc::DimensionError);
}

TEST(CharPoly, MatchesPrincipalMinorExpansionOnIntegerMatrices) {
  std::mt19937_64 rng(16);
  for (std::size_t n : {2u, 3u}) {
    for (int rep = 0; rep < 200; ++rep) {
      const auto rows = ref::random_int_rows(rng, n, n);
      const auto got = appc::char_poly(to_mat(rows));
      const auto want = ref::principal_minor_char_poly(rows);
      for (std::size_t k = 0; k <= n; ++k) EXPECT_NEAR(got[k], want[k], 1e-9);
    }
  }
}

TEST(SolveLinear, Examples) {
  const Mat b = Mat::column({3, -1});
  EXPECT_EQ(appc::solve_linear(Mat::identity(2), b), b);
  const Mat x = appc::solve_linear(Mat::from_rows({{2, 0}, {0, 4}}), Mat::column({2, 8}));
  EXPECT_NEAR(x[0], 1.0, 1e-15);
  EXPECT_NEAR(x[1], 2.0, 1e-15);

  const Mat a_sigma = Mat::from_rows({{5, -2}, {26.5, -9}});
  const Mat B = Mat::column({0, 2});
  const Mat y = appc::solve_linear(a_sigma, B);
  const auto want = ref::cramer_solve(fixtures::to_rows(a_sigma), {0, 2});
  EXPECT_NEAR(y[0], want[0], 1e-13);
  EXPECT_NEAR(y[0], 0.5, 1e-13);
  EXPECT_NEAR(y[1], want[1], 1e-13);
}

TEST(SolveLinear, ResidualBoundOnRandomSystems) {
  std::mt19937_64 rng(17);
  for (std::size_t n = 1; n <= 6; ++n) {
    const Mat a = to_mat(ref::random_rows(rng, n, n));
    const Mat b = to_mat(ref::random_rows(rng, n, 1));
    const Mat x = appc::solve_linear(a, b);
    EXPECT_LE(appc::max_abs(a * x - b), 1e-10 * (appc::norm_inf(a) * appc::max_abs(x) + appc::max_abs(b)));
  }
}

TEST(SolveLinear, SingularCarriesDeterminant) {
  try {
    appc::solve_linear(Mat::from_rows({{1, 2}, {2, 4}}), Mat::column({1, 1}));
    FAIL() << "expected SingularMatrixError";
  } catch (const appc::SingularMatrixError& e) {
    EXPECT_LT(e.abs_det(), 1e-12);
  }
}

TEST(Inverse, TimesOriginalIsIdentity) {
  std::mt19937_64 rng(18);
  const Mat a = to_mat(ref::random_rows(rng, 4, 4));
  EXPECT_LT(max_diff(appc::inverse(a) * a, Mat::identity(4)), 1e-10);
}
