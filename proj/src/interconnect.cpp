#include "l1adapt/interconnect.hpp"

#include "l1adapt/error.hpp"

namespace l1adapt {

using Eigen::MatrixXd;

LtiSystem series(const LtiSystem& sys2, const LtiSystem& sys1) {
  require(sys1.outputs() == sys2.inputs(), ErrorKind::kDimensionMismatch,
          "series: outputs of the first system must match inputs of the second");
  const int n1 = sys1.states(), n2 = sys2.states();
  MatrixXd A = MatrixXd::Zero(n1 + n2, n1 + n2);
  A.topLeftCorner(n1, n1) = sys1.A();
  A.bottomLeftCorner(n2, n1) = sys2.B() * sys1.C();
  A.bottomRightCorner(n2, n2) = sys2.A();
  MatrixXd B(n1 + n2, sys1.inputs());
  B.topRows(n1) = sys1.B();
  B.bottomRows(n2) = sys2.B() * sys1.D();
  MatrixXd C(sys2.outputs(), n1 + n2);
  C.leftCols(n1) = sys2.D() * sys1.C();
  C.rightCols(n2) = sys2.C();
  return LtiSystem(std::move(A), std::move(B), std::move(C), sys2.D() * sys1.D());
}

LtiSystem add(const LtiSystem& a, const LtiSystem& b) {
  require(a.inputs() == b.inputs() && a.outputs() == b.outputs(),
          ErrorKind::kDimensionMismatch, "add: systems must have equal input/output sizes");
  const int na = a.states(), nb = b.states();
  MatrixXd A = MatrixXd::Zero(na + nb, na + nb);
  A.topLeftCorner(na, na) = a.A();
  A.bottomRightCorner(nb, nb) = b.A();
  MatrixXd B(na + nb, a.inputs());
  B.topRows(na) = a.B();
  B.bottomRows(nb) = b.B();
  MatrixXd C(a.outputs(), na + nb);
  C.leftCols(na) = a.C();
  C.rightCols(nb) = b.C();
  return LtiSystem(std::move(A), std::move(B), std::move(C), a.D() + b.D());
}

LtiSystem subtract(const LtiSystem& a, const LtiSystem& b) { return add(a, scale(b, -1.0)); }

LtiSystem scale(const LtiSystem& sys, double factor) {
  return LtiSystem(sys.A(), sys.B(), factor * sys.C(), factor * sys.D());
}

LtiSystem append(const LtiSystem& a, const LtiSystem& b) {
  const int na = a.states(), nb = b.states();
  const int ma = a.inputs(), mb = b.inputs();
  const int pa = a.outputs(), pb = b.outputs();
  MatrixXd A = MatrixXd::Zero(na + nb, na + nb);
  A.topLeftCorner(na, na) = a.A();
  A.bottomRightCorner(nb, nb) = b.A();
  MatrixXd B = MatrixXd::Zero(na + nb, ma + mb);
  B.topLeftCorner(na, ma) = a.B();
  B.bottomRightCorner(nb, mb) = b.B();
  MatrixXd C = MatrixXd::Zero(pa + pb, na + nb);
  C.topLeftCorner(pa, na) = a.C();
  C.bottomRightCorner(pb, nb) = b.C();
  MatrixXd D = MatrixXd::Zero(pa + pb, ma + mb);
  D.topLeftCorner(pa, ma) = a.D();
  D.bottomRightCorner(pb, mb) = b.D();
  return LtiSystem(std::move(A), std::move(B), std::move(C), std::move(D));
}

LtiSystem diagonal_copies(const LtiSystem& sys, int copies) {
  require(copies >= 1, ErrorKind::kInvalidArgument, "diagonal_copies: need at least one copy");
  LtiSystem out = sys;
  for (int k = 1; k < copies; ++k) out = append(out, sys);
  return out;
}

LtiSystem feedback_inverse(const LtiSystem& M) {
  require(M.inputs() == M.outputs(), ErrorKind::kDimensionMismatch,
          "feedback_inverse: system must be square");
  const int m = M.inputs();
  const MatrixXd I_minus_D = MatrixXd::Identity(m, m) - M.D();
  Eigen::FullPivLU<MatrixXd> lu(I_minus_D);
  require(lu.isInvertible() && lu.rcond() > 1e-12, ErrorKind::kInvalidArgument,
          "feedback_inverse: I - D is singular");
  const MatrixXd E = lu.inverse();
  MatrixXd A = M.A() + M.B() * E * M.C();
  MatrixXd B = M.B() * E;
  MatrixXd C = E * M.C();
  return LtiSystem(std::move(A), std::move(B), std::move(C), E);
}

}  // namespace l1adapt
