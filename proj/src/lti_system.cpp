#include "l1adapt/lti_system.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "l1adapt/error.hpp"

namespace l1adapt {

LtiSystem::LtiSystem(Eigen::MatrixXd A, Eigen::MatrixXd B, Eigen::MatrixXd C, Eigen::MatrixXd D)
    : A_(std::move(A)), B_(std::move(B)), C_(std::move(C)), D_(std::move(D)) {
  const auto n = A_.rows();
  std::ostringstream msg;
  msg << "inconsistent realization: A " << A_.rows() << "x" << A_.cols() << ", B " << B_.rows()
      << "x" << B_.cols() << ", C " << C_.rows() << "x" << C_.cols() << ", D " << D_.rows() << "x"
      << D_.cols();
  require(A_.cols() == n && B_.rows() == n && C_.cols() == n && D_.rows() == C_.rows() &&
              D_.cols() == B_.cols(),
          ErrorKind::kDimensionMismatch, msg.str());
  require(B_.cols() > 0 && C_.rows() > 0, ErrorKind::kDimensionMismatch,
          "system needs at least one input and one output");
}

LtiSystem LtiSystem::gain(const Eigen::MatrixXd& D) {
  return LtiSystem(Eigen::MatrixXd(0, 0), Eigen::MatrixXd(0, D.cols()),
                   Eigen::MatrixXd(D.rows(), 0), D);
}

LtiSystem LtiSystem::gain(double d) { return gain(Eigen::MatrixXd::Constant(1, 1, d)); }

LtiSystem LtiSystem::identity(int size) {
  return gain(Eigen::MatrixXd::Identity(size, size));
}

LtiSystem LtiSystem::from_tf(const Polynomial& num, const Polynomial& den) {
  require(!den.is_zero(), ErrorKind::kInvalidArgument, "zero denominator");
  require(num.degree() <= den.degree() || num.is_zero(), ErrorKind::kInvalidArgument,
          "improper transfer function: numerator degree exceeds denominator degree");
  const int n = den.degree();
  const double lead = den.leading();
  std::vector<double> a(static_cast<std::size_t>(n) + 1), b(static_cast<std::size_t>(n) + 1, 0.0);
  for (int k = 0; k <= n; ++k) a[k] = den[k] / lead;
  for (int k = 0; k <= num.degree(); ++k) b[k] = num[k] / lead;

  const double d = b[n];
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, 1);
  Eigen::MatrixXd C(1, n);
  for (int i = 0; i + 1 < n; ++i) A(i, i + 1) = 1.0;
  for (int j = 0; j < n; ++j) {
    A(n - 1, j) = -a[j];
    C(0, j) = b[j] - d * a[j];
  }
  if (n > 0) B(n - 1, 0) = 1.0;
  return LtiSystem(std::move(A), std::move(B), std::move(C), Eigen::MatrixXd::Constant(1, 1, d));
}

bool LtiSystem::is_stable() const { return is_hurwitz(A_); }

bool is_hurwitz(const Eigen::MatrixXd& A, double margin) {
  require(A.rows() == A.cols(), ErrorKind::kDimensionMismatch, "is_hurwitz: matrix is not square");
  return spectral_abscissa(A) < -margin;
}

double spectral_abscissa(const Eigen::MatrixXd& A) {
  require(A.rows() == A.cols(), ErrorKind::kDimensionMismatch, "spectral_abscissa: not square");
  if (A.rows() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::EigenSolver<Eigen::MatrixXd> solver(A, false);
  return solver.eigenvalues().real().maxCoeff();
}

Eigen::MatrixXcd evaluate(const LtiSystem& sys, std::complex<double> s) {
  const int n = sys.states();
  Eigen::MatrixXcd out = sys.D().cast<std::complex<double>>();
  if (n == 0) return out;
  Eigen::MatrixXcd M = s * Eigen::MatrixXcd::Identity(n, n) - sys.A().cast<std::complex<double>>();
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
  // Reciprocal condition estimate through the LU factors; a pole makes M singular.
  const double scale = 1.0 + std::abs(s) + sys.A().cwiseAbs().maxCoeff();
  const double pivot = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  require(pivot > 1e-13 * scale, ErrorKind::kInvalidArgument,
          "evaluate: s lies on the spectrum of A");
  out.noalias() += sys.C().cast<std::complex<double>>() * lu.solve(sys.B().cast<std::complex<double>>());
  return out;
}

std::complex<double> evaluate_siso(const LtiSystem& sys, std::complex<double> s) {
  require(sys.is_siso(), ErrorKind::kDimensionMismatch, "evaluate_siso: system is not SISO");
  return evaluate(sys, s)(0, 0);
}

Eigen::MatrixXd dc_gain(const LtiSystem& sys) { return evaluate(sys, 0.0).real(); }

}  // namespace l1adapt
