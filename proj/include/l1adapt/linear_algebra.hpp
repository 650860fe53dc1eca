#pragma once

#include <Eigen/Dense>

#include "l1adapt/polynomial.hpp"

namespace l1adapt {

/// Solves A^T P + P A = -Q by vectorization (Kronecker linear system).
/// Requires A Hurwitz and Q symmetric positive definite; the result is
/// symmetrized and checked positive definite.
Eigen::MatrixXd solve_lyapunov(const Eigen::MatrixXd& A, const Eigen::MatrixXd& Q);

/// (sI - A)^{-1} b = n(s) / d(s) with n_i(s) = sum_j N(i, j) s^j (0-based j)
/// and d(s) = det(sI - A).
struct NumeratorMatrix {
  Eigen::MatrixXd N;
  Polynomial d;

  /// n(s) evaluated at a complex point.
  Eigen::VectorXcd numerator_at(std::complex<double> s) const;
  /// Rank-deficient iff sigma_min / sigma_max < 1e-10.
  bool is_full_rank() const;
};

/// Faddeev-LeVerrier recursion for the adjugate of (sI - A), applied to b.
NumeratorMatrix faddeev_numerators(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// Output vector c_o giving c_o^T (sI - A)^{-1} b = numerator / denominator with
/// numerator = (s+1)^{n-1} (minimum phase) and denominator = det(sI - A).
struct RelativeDegreeOneOutput {
  Eigen::VectorXd c_o;
  Polynomial numerator;
  Polynomial denominator;
};

/// Throws kUncontrollable when the numerator matrix is rank deficient.
RelativeDegreeOneOutput construct_co(const Eigen::MatrixXd& A, const Eigen::VectorXd& b);

/// Static gain k_g = 1 / (c^T (-A_m)^{-1} b) making the DC gain from r to y unity.
double compute_kg(const Eigen::MatrixXd& A_m, const Eigen::VectorXd& b, const Eigen::VectorXd& c);

/// Smallest and largest eigenvalue of a symmetric matrix.
double min_eigenvalue(const Eigen::MatrixXd& symmetric);
double max_eigenvalue(const Eigen::MatrixXd& symmetric);

}  // namespace l1adapt
