#pragma once

#include <Eigen/Dense>
#include <vector>

#include "l1adapt/lti_system.hpp"

namespace l1adapt {

/// Uniformly sampled impulse response C e^{At} B. The direct term D (a Dirac
/// mass at t = 0) is kept separately in `direct`.
struct ImpulseResponse {
  std::vector<double> t;
  std::vector<Eigen::MatrixXd> h;
  Eigen::MatrixXd direct;
};

ImpulseResponse impulse_response(const LtiSystem& sys, double horizon, double step);

/// Per-entry L1 norms: entry (i, j) = |D_ij| + integral of |h_ij(t)| over [0, inf).
Eigen::MatrixXd l1_entries(const LtiSystem& sys, double rel_tol = 1e-4);

/// Induced L-infinity gain: max over output rows of the row sum of l1_entries.
double l1_gain(const LtiSystem& sys, double rel_tol = 1e-4);

/// Sup-norm of a stable system's response bound: for every t,
/// ||e^{At} x|| <= envelope * exp(-decay * t) * ||x||.
struct DecayEnvelope {
  double envelope;
  double decay;
};

/// Envelope from the Lyapunov function of A + decay*I with decay = half the
/// stability margin of A.
DecayEnvelope decay_envelope(const Eigen::MatrixXd& A);

}  // namespace l1adapt
