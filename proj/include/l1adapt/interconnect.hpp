#pragma once

#include <Eigen/Dense>

#include "l1adapt/lti_system.hpp"

namespace l1adapt {

/// sys2 after sys1: y = sys2(sys1(u)). Block-triangular realization with
/// sys1's states first.
LtiSystem series(const LtiSystem& sys2, const LtiSystem& sys1);

/// Sum a(s) + b(s) of equally sized systems.
LtiSystem add(const LtiSystem& a, const LtiSystem& b);

/// a(s) - b(s).
LtiSystem subtract(const LtiSystem& a, const LtiSystem& b);

/// factor * sys(s).
LtiSystem scale(const LtiSystem& sys, double factor);

/// Block-diagonal system diag(a, b): inputs and outputs are stacked.
LtiSystem append(const LtiSystem& a, const LtiSystem& b);

/// diag(sys, ..., sys) with `copies` blocks, e.g. C(s) I_n.
LtiSystem diagonal_copies(const LtiSystem& sys, int copies);

/// (I - M(s))^{-1} for square M; requires I - D_M invertible.
LtiSystem feedback_inverse(const LtiSystem& M);

}  // namespace l1adapt
