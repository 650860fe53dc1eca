#include "l1adapt/linear_algebra.hpp"

#include <cmath>

#include "l1adapt/error.hpp"
#include "l1adapt/lti_system.hpp"

namespace l1adapt {

Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q) {
  const auto n = A.rows();
  require(A.cols() == n && Q.rows() == n && Q.cols() == n, ErrorKind::kDimensionMismatch,
          "solve_lyapunov: A and Q must be square of equal size");
  require(is_hurwitz(A), ErrorKind::kUnstable,
          "solve_lyapunov: A is not Hurwitz, no positive definite solution exists");
  const double qnorm = Q.norm();
  require((Q - Q.transpose()).norm() <= 1e-12 * qnorm, ErrorKind::kInvalidArgument,
          "solve_lyapunov: Q is not symmetric");
  require(Q.llt().info() == Eigen::Success && qnorm > 0.0, ErrorKind::kInvalidArgument,
          "solve_lyapunov: Q is not positive definite");

  // vec(A^T P + P A) = (I kron A^T + A^T kron I) vec(P)
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd At = A.transpose();
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      K.block(i * n, j * n, n, n) += I(i, j) * At;
      K.block(i * n, j * n, n, n) += At(i, j) * I;
    }
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(Q.data(), n * n);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(K);
  Eigen::VectorXd vecP = lu.solve(rhs);
  // One step of iterative refinement keeps the residual at rounding level for larger n.
  vecP += lu.solve(rhs - K * vecP);

  Eigen::MatrixXd P = Eigen::Map<Eigen::MatrixXd>(vecP.data(), n, n);
  P = 0.5 * (P + P.transpose()).eval();
  require(P.llt().info() == Eigen::Success, ErrorKind::kUnstable,
          "solve_lyapunov: solution is not positive definite");
  return P;
}

Eigen::VectorXcd NumeratorMatrix::numerator_at(std::complex<double> s) const {
  const auto n = N.cols();
  Eigen::VectorXcd powers(n);
  std::complex<double> p = 1.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    powers(j) = p;
    p *= s;
  }
  return N.cast<std::complex<double>>() * powers;
}

bool NumeratorMatrix::is_full_rank() const {
  if (N.size() == 0) return true;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(N);
  const auto& sv = svd.singularValues();
  if (sv(0) == 0.0) return false;
  return sv(sv.size() - 1) / sv(0) >= 1e-10;
}

NumeratorMatrix faddeev_numerators(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const auto n = A.rows();
  require(A.cols() == n && b.size() == n, ErrorKind::kDimensionMismatch,
          "faddeev_numerators: A must be n x n and b of length n");
  // adj(sI - A) = sum_{k=1..n} M_k s^{n-k},  det(sI - A) = sum_k c_k s^k.
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  c[n] = 1.0;
  Eigen::MatrixXd N = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    if (k > 1) M = A * M + c[n - k + 1] * Eigen::MatrixXd::Identity(n, n);
    N.col(n - k) = M * b;
    c[n - k] = -(A * M).trace() / static_cast<double>(k);
  }
  return {std::move(N), Polynomial(std::move(c))};
}

RelativeDegreeOneOutput construct_co(const Eigen::MatrixXd& A, const Eigen::VectorXd& b) {
  const NumeratorMatrix nm = faddeev_numerators(A, b);
  require(nm.is_full_rank(), ErrorKind::kUncontrollable,
          "construct_co: (A, b) is not controllable (numerator matrix is rank deficient)");
  const auto n = A.rows();
  const Polynomial target = Polynomial{1.0, 1.0}.pow(static_cast<int>(n) - 1);
  Eigen::VectorXd cbar(n);
  for (Eigen::Index j = 0; j < n; ++j) cbar(j) = target[static_cast<int>(j)];
  // c^T N = cbar^T  =>  c = N^{-T} cbar
  Eigen::VectorXd c_o = nm.N.transpose().fullPivLu().solve(cbar);
  return {std::move(c_o), target, nm.d};
}

double compute_kg(const Eigen::MatrixXd& A_m, const Eigen::VectorXd& b, const Eigen::VectorXd& c) {
  const auto n = A_m.rows();
  require(A_m.cols() == n && b.size() == n && c.size() == n, ErrorKind::kDimensionMismatch,
          "compute_kg: dimension mismatch");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(-A_m);
  require(lu.isInvertible(), ErrorKind::kInvalidArgument, "compute_kg: A_m is singular");
  const Eigen::VectorXd h0 = lu.solve(b);
  const double dc = c.dot(h0);
  require(std::abs(dc) > 1e-12 * (c.norm() * h0.norm()) && dc != 0.0,
          ErrorKind::kInfeasibleDesign, "compute_kg: c^T H_o(0) = 0, no feasible k_g");
  return 1.0 / dc;
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double max_eigenvalue(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

}  // namespace l1adapt
