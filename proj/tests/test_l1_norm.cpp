#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <unsupported/Eigen/MatrixFunctions>

#include "l1adapt/error.hpp"
#include "l1adapt/l1_norm.hpp"
#include "support/properties.hpp"

using namespace l1adapt;
using Eigen::MatrixXd;

namespace {

LtiSystem tf(std::vector<double> num, std::vector<double> den) {
  return LtiSystem::from_tf(Polynomial::from_descending(num), Polynomial::from_descending(den));
}

}  // namespace

TEST(L1Gain, FirstOrderLag) {
  for (double w : {1.0, 160.0, 1000.0}) {
    const double gain = l1_gain(tf({1.0}, {1.0, w}), 1e-8);
    EXPECT_NEAR(gain * w, 1.0, 1e-6) << "omega " << w;
  }
}

TEST(L1Gain, SignChangingResponse) {
  // (s - 1)/(s + 1)^2 has h(t) = e^{-t} (1 - 2t), whose absolute integral is 4/sqrt(e) - 1.
  EXPECT_NEAR(l1_gain(tf({1.0, -1.0}, {1.0, 2.0, 1.0}), 1e-8), 4.0 * std::exp(-0.5) - 1.0, 1e-7);
}

TEST(L1Gain, DirectTermCounts) {
  // s/(s + 1) = 1 - 1/(s + 1)
  EXPECT_NEAR(l1_gain(tf({1.0, 0.0}, {1.0, 1.0}), 1e-8), 2.0, 1e-7);
  EXPECT_DOUBLE_EQ(l1_gain(LtiSystem::gain(-3.0)), 3.0);
}

TEST(L1Gain, MimoTakesWorstRow) {
  // Rows [1/(s+1), 2/(s+2)] and [0, 1/(s+4)]: row sums 2 and 0.25.
  MatrixXd A = MatrixXd::Zero(3, 3);
  A.diagonal() << -1.0, -2.0, -4.0;
  MatrixXd B(3, 2);
  B << 1, 0, 0, 1, 0, 1;
  MatrixXd C(2, 3);
  C << 1, 2, 0, 0, 0, 1;
  const LtiSystem sys(A, B, C, MatrixXd::Zero(2, 2));
  const MatrixXd e = l1_entries(sys, 1e-9);
  EXPECT_NEAR(e(0, 0), 1.0, 1e-8);
  EXPECT_NEAR(e(0, 1), 1.0, 1e-8);
  EXPECT_NEAR(e(1, 0), 0.0, 1e-12);
  EXPECT_NEAR(e(1, 1), 0.25, 1e-8);
  EXPECT_NEAR(l1_gain(sys, 1e-9), 2.0, 1e-8);
}

TEST(L1Gain, LightlyDampedAgainstBruteForce) {
  const LtiSystem sys = tf({1.0}, {1.0, 0.2, 1.0});
  const double brute = proptest::brute_force_l1_entries(sys, 200.0, 1e-3)(0, 0);
  EXPECT_NEAR(l1_gain(sys, 1e-8), brute, 1e-5 * brute);
}

TEST(L1Gain, WidelySeparatedModesClosedForm) {
  // (s - 3)/((s + 0.05)(s + 500)) = a e^{-0.05 t} + b e^{-500 t}, one sign change.
  const LtiSystem sys = tf({1.0, -3.0}, {1.0, 500.05, 25.0});
  const double a = -3.05 / 499.95, b = 503.0 / 499.95;
  const double t0 = std::log(-b / a) / 499.95;
  auto part = [&](double t) {  // integral of h over [0, t]
    return a / 0.05 * (1.0 - std::exp(-0.05 * t)) + b / 500.0 * (1.0 - std::exp(-500.0 * t));
  };
  const double exact = 2.0 * part(t0) - (a / 0.05 + b / 500.0);
  EXPECT_NEAR(l1_gain(sys, 1e-9), exact, 1e-7 * exact);
}

TEST(L1Gain, RandomSystemsAgainstBruteForce) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 15; ++trial) {
    const LtiSystem sys = proptest::random_stable_system(rng, 1 + trial % 4, 1 + trial % 2, 1 + (trial / 2) % 2);
    const double rate = -spectral_abscissa(sys.A());
    double fastest = 1.0;
    for (const auto& p : sys.A().eigenvalues()) fastest = std::max(fastest, std::abs(p));
    const MatrixXd brute = proptest::brute_force_l1_entries(sys, 40.0 / rate, 2e-3 / fastest);
    const MatrixXd fast = l1_entries(sys, 1e-8);
    EXPECT_LE((fast - brute).cwiseAbs().maxCoeff(), 1e-5 * (1.0 + brute.maxCoeff()))
        << "trial " << trial;
  }
}

TEST(L1Gain, UnstableInputThrows) {
  try {
    l1_gain(tf({1.0}, {1.0, -1.0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnstable);
  }
  EXPECT_THROW(l1_gain(tf({1.0}, {1.0, 0.0, 1.0})), Error);
}

TEST(ImpulseResponse, MatchesTaylorExponential) {
  const LtiSystem sys = tf({2.0, 1.0}, {1.0, 1.4, 1.0});
  const ImpulseResponse ir = impulse_response(sys, 5.0, 0.25);
  ASSERT_EQ(ir.t.size(), ir.h.size());
  EXPECT_NEAR(ir.t.back(), 5.0, 1e-12);
  for (std::size_t k = 0; k < ir.t.size(); ++k) {
    const MatrixXd expected = sys.C() * proptest::taylor_expm(sys.A() * ir.t[k]) * sys.B();
    EXPECT_NEAR(ir.h[k](0, 0), expected(0, 0), 1e-12);
  }
}

TEST(TaylorOracle, AgreesWithEigenExpm) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const LtiSystem sys = proptest::random_stable_system(rng, 4, 1, 1);
    const MatrixXd M = sys.A() * 3.0;
    const MatrixXd eig = M.exp();
    EXPECT_LE((proptest::taylor_expm(M) - eig).norm(), 1e-10 * (1.0 + eig.norm()));
  }
}

TEST(DecayEnvelope, BoundsTransitionMatrix) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXd A = proptest::random_stable_system(rng, 1 + trial % 5, 1, 1).A();
    const DecayEnvelope env = decay_envelope(A);
    EXPECT_GT(env.decay, 0.0);
    EXPECT_GE(env.envelope, 1.0 - 1e-12);
    for (double t : {0.0, 0.1, 0.5, 1.0, 3.0, 10.0}) {
      const double lhs = proptest::taylor_expm(A * t).operatorNorm();
      EXPECT_LE(lhs, env.envelope * std::exp(-env.decay * t) * (1.0 + 1e-9)) << "t = " << t;
    }
  }
}
