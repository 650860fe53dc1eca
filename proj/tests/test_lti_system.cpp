#include <gtest/gtest.h>

#include <cmath>
#include <complex>

#include "l1adapt/error.hpp"
#include "l1adapt/lti_system.hpp"

using namespace l1adapt;
using cd = std::complex<double>;

TEST(LtiSystem, RejectsInconsistentShapes) {
  EXPECT_THROW(LtiSystem(Eigen::MatrixXd::Zero(2, 2), Eigen::MatrixXd::Zero(3, 1),
                         Eigen::MatrixXd::Zero(1, 2), Eigen::MatrixXd::Zero(1, 1)),
               Error);
  EXPECT_THROW(LtiSystem(Eigen::MatrixXd::Zero(2, 3), Eigen::MatrixXd::Zero(2, 1),
                         Eigen::MatrixXd::Zero(1, 2), Eigen::MatrixXd::Zero(1, 1)),
               Error);
}

TEST(LtiSystem, FromTransferFunctionMatchesRationalFunction) {
  const Polynomial num = Polynomial::from_descending({3.0 * 2500.0, 125000.0});
  const Polynomial den = Polynomial::from_descending({1.0, 150.0, 7500.0, 125000.0});
  const LtiSystem sys = LtiSystem::from_tf(num, den);
  EXPECT_EQ(sys.states(), 3);
  EXPECT_TRUE(sys.is_siso());
  EXPECT_TRUE(sys.is_strictly_proper());
  for (cd s : {cd(0.0, 1.0), cd(-2.0, 5.0), cd(10.0, -3.0)}) {
    const cd expected = num(s) / den(s);
    EXPECT_NEAR(std::abs(evaluate_siso(sys, s) - expected), 0.0, 1e-12 * std::abs(expected));
  }
  EXPECT_NEAR(dc_gain(sys)(0, 0), 1.0, 1e-14);
}

TEST(LtiSystem, BiproperKeepsDirectTerm) {
  // (2s + 3)/(s + 1) = 2 + 1/(s + 1)
  const LtiSystem sys = LtiSystem::from_tf(Polynomial({3.0, 2.0}), Polynomial({1.0, 1.0}));
  EXPECT_DOUBLE_EQ(sys.D()(0, 0), 2.0);
  EXPECT_NEAR(dc_gain(sys)(0, 0), 3.0, 1e-14);
  EXPECT_FALSE(sys.is_strictly_proper());
}

TEST(LtiSystem, NormalizesNonMonicDenominator) {
  const LtiSystem sys = LtiSystem::from_tf(Polynomial({4.0}), Polynomial({2.0, 2.0}));
  EXPECT_NEAR(evaluate_siso(sys, cd(1.0, 0.0)).real(), 1.0, 1e-14);
}

TEST(LtiSystem, RejectsImproperTransferFunction) {
  EXPECT_THROW(LtiSystem::from_tf(Polynomial({0.0, 0.0, 1.0}), Polynomial({1.0, 1.0})), Error);
  EXPECT_THROW(LtiSystem::from_tf(Polynomial({1.0}), Polynomial({0.0})), Error);
}

TEST(LtiSystem, StaticGainAndIdentity) {
  const LtiSystem g = LtiSystem::gain(2.5);
  EXPECT_EQ(g.states(), 0);
  EXPECT_TRUE(g.is_stable());
  EXPECT_DOUBLE_EQ(evaluate_siso(g, cd(3.0, 1.0)).real(), 2.5);
  const LtiSystem id = LtiSystem::identity(3);
  EXPECT_EQ(id.inputs(), 3);
  EXPECT_TRUE(dc_gain(id).isIdentity());
}

TEST(LtiSystem, StabilityUsesStrictMargin) {
  Eigen::MatrixXd A(2, 2);
  A << 0.0, 1.0, -1.0, -1.4;
  EXPECT_TRUE(is_hurwitz(A));
  EXPECT_NEAR(spectral_abscissa(A), -0.7, 1e-12);
  Eigen::MatrixXd marginal(2, 2);
  marginal << 0.0, 1.0, -1.0, 0.0;
  EXPECT_FALSE(is_hurwitz(marginal));
  EXPECT_FALSE(is_hurwitz(Eigen::MatrixXd::Constant(1, 1, -1e-12)));
  EXPECT_THROW(is_hurwitz(Eigen::MatrixXd::Zero(2, 3)), Error);
}

TEST(LtiSystem, EvaluateAtPoleThrows) {
  const LtiSystem sys = LtiSystem::from_tf(Polynomial({1.0}), Polynomial({1.0, 1.0}));
  EXPECT_THROW(evaluate(sys, cd(-1.0, 0.0)), Error);
  const LtiSystem integrator = LtiSystem::from_tf(Polynomial({1.0}), Polynomial({0.0, 1.0}));
  EXPECT_THROW(dc_gain(integrator), Error);
}
