#pragma once

#include <cstddef>

#include "appc/matrix.hpp"
#include "appc/models.hpp"
#include "appc/oracle.hpp"

namespace appc {

// ---- Stage 1: filtered state equation and DREM scalarization ----

struct Stage1Outputs {
  Mat z_bar;    // n
  Mat phi_bar;  // n + 2
};

/// Derivative of the (x, u) filter: -l Phi_bar + [x; u].
Mat stage1_rhs(const Mat& phi_bar_state, const Mat& x, double u, double l);

/// z_bar = x - l x_bar, phi_bar = [Phi_bar; exp(-l (t - t_start))].
Stage1Outputs stage1_outputs(const Mat& phi_bar_state, const Mat& x, double t, double l,
                             double t_start = 0.0);

struct DremDerivatives {
  Mat H_pp;  // (n+2) x (n+2)
  Mat H_pz;  // (n+2) x n
};

DremDerivatives drem_rhs(const Mat& H_pp, const Mat& H_pz, const Mat& phi_bar, const Mat& z_bar,
                         double k);

struct DremMix {
  Mat z;       // (n+2) x n, equals phi * [A B x0]^T on exact data
  double phi;  // det(H_pp)
};

DremMix drem_mix(const Mat& H_pp, const Mat& H_pz);

struct ScalarizedAB {
  Mat z_A;  // n x n, phi * A
  Mat z_B;  // n,     phi * B
  double phi;
};

/// Drops the initial-condition column of z and splits the rest into (A, B) parts.
ScalarizedAB extract_AB(const Mat& z, double phi);

/// det(H) / prod(H_ii): 1 for a diagonal Gram, near 0 when nearly rank deficient.
/// Returns 0 when any diagonal entry is nonpositive.
double gram_hadamard_ratio(const Mat& H);

// ---- Stage 2: regression for the controller parameters ----

struct RegressionPair {
  Mat Y;         // n + 1
  double Delta;  // Y = Delta * theta
  // Intermediate determinants, kept for diagnostics.
  double Delta_M = 0.0;
  double Delta_x = 0.0;
  double Delta_r = 0.0;
};

/// n^4 + n^3 + n^2 + 1: the power of phi carried by Delta.
int regression_exponent(std::size_t n);

/**
 * The adjugate chain from (z_A, z_B, phi) to (Y, Delta). Caches the parts that
 * depend only on (Gamma, h). Every step uses adjugates and determinants, so
 * singular intermediates simply produce zeros.
 */
class Stage2 {
 public:
  Stage2(const Mat& Gamma, const Mat& h);

  std::size_t n() const { return n_; }
  int exponent() const { return q_; }

  RegressionPair operator()(const Mat& z_A, const Mat& z_B, double phi) const;

 private:
  std::size_t n_;
  int q_;
  Mat h_;
  Mat gamma_kron_;  // Gamma^T (x) I
  Mat gamma_inv_;
};

RegressionPair stage2_parameterize(const Mat& z_A, const Mat& z_B, double phi, const Mat& Gamma,
                                   const Mat& h);

/// (Y, Delta) in the form exp(log_scale) * (Y, Delta). Since the chain is
/// homogeneous of degree q in its inputs, dividing them by |phi| first keeps
/// the mantissas near unit size while the true values are far below the
/// double range.
struct ScaledRegression {
  RegressionPair pair;
  double log_scale;  // -inf when phi == 0

  double log_abs_delta() const;
};

ScaledRegression stage2_scaled(const Stage2& chain, const Mat& z_A, const Mat& z_B, double phi);

struct StructuralConstants {
  double C1;
  double C2;
  double C3;
  double log_abs_C;
  int sign_C;
  int q;

  /// exp(log_abs_C) with sign; may overflow or underflow for large n.
  double C() const;
};

/// Constants with Delta = C * phi^q on exact data. Throws DegenerateDesignError
/// when |C| < 1e-12.
StructuralConstants structural_constants(const PlantModel& plant, const IdealSolution& ideal,
                                         const Mat& Gamma);

}  // namespace appc
