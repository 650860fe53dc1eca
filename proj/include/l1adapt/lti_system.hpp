#pragma once

#include <Eigen/Dense>
#include <complex>

#include "l1adapt/polynomial.hpp"

namespace l1adapt {

/// Eigenvalues with real part in (-kStabilityMargin, 0] count as unstable.
inline constexpr double kStabilityMargin = 1e-9;

/// Continuous-time state-space realization dx = Ax + Bu, y = Cx + Du.
/// Immutable after construction; states() may be zero for a static gain.
class LtiSystem {
 public:
  LtiSystem(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C, Eigen::MatrixXd D);

  /// Static gain y = D u (no states).
  static LtiSystem gain(const Eigen::MatrixXd& D);
  static LtiSystem gain(double d);
  static LtiSystem identity(int size);
  /// Controllable canonical realization of num/den. Requires deg num <= deg den;
  /// the denominator is normalized to a monic leading coefficient.
  static LtiSystem from_tf(const Polynomial& num, const Polynomial& den);

  const Eigen::MatrixXd& A() const { return A_; }
  const Eigen::MatrixXd& B() const { return B_; }
  const Eigen::MatrixXd& C() const { return C_; }
  const Eigen::MatrixXd& D() const { return D_; }

  int states() const { return static_cast<int>(A_.rows()); }
  int inputs() const { return static_cast<int>(B_.cols()); }
  int outputs() const { return static_cast<int>(C_.rows()); }

  bool is_siso() const { return inputs() == 1 && outputs() == 1; }
  bool is_strictly_proper() const { return D_.isZero(0.0); }
  bool is_stable() const;

 private:
  Eigen::MatrixXd A_, B_, C_, D_;
};

/// True iff every eigenvalue of A has real part < -margin. Throws on non-square input.
bool is_hurwitz(const Eigen::MatrixXd& A, double margin = kStabilityMargin);

/// max Re(lambda_i(A)); -inf for an empty matrix.
double spectral_abscissa(const Eigen::MatrixXd& A);

/// Frequency response C (sI - A)^{-1} B + D. Throws when s is (numerically)
/// an eigenvalue of A.
Eigen::MatrixXcd evaluate(const LtiSystem& sys, std::complex<double> s);

/// Scalar response of a SISO system.
std::complex<double> evaluate_siso(const LtiSystem& sys, std::complex<double> s);

/// Response at s = 0; the system must not have a pole at the origin.
Eigen::MatrixXd dc_gain(const LtiSystem& sys);

}  // namespace l1adapt
