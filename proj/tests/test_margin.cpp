#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "l1adapt/error.hpp"
#include "l1adapt/margin.hpp"

using namespace l1adapt;

namespace {

// With k = -2 the loop (Gamma + 2s)/(s(s - 1)) crosses unit gain where
// w^4 - 3 w^2 - Gamma^2 = 0 and the delay fills the remaining phase.
double mrac_margin_closed_form(double gamma) {
  const double w = std::sqrt(0.5 * (3.0 + std::sqrt(9.0 + 4.0 * gamma * gamma)));
  return (std::atan(2.0 * w / gamma) + std::atan(w) - 0.5 * std::numbers::pi) / w;
}

const TransferFunction kUnitLag{Polynomial{1.0}, Polynomial{1.0, 1.0}};

}  // namespace

TEST(DelayMargin, PureDelayLoop) {
  // 2/(s + 1): |L| = 1 at w = sqrt(3), delay = (pi - pi/3)/sqrt(3).
  DelayLoop loop;
  loop.delayed = {Polynomial{2.0}, Polynomial{1.0, 1.0}};
  const MarginResult m = time_delay_margin(loop);
  ASSERT_TRUE(m.found);
  EXPECT_NEAR(m.tau, 2.0 * std::numbers::pi / (3.0 * std::sqrt(3.0)), 1e-9);
  EXPECT_NEAR(m.crossover_frequency, std::sqrt(3.0), 1e-9);
}

TEST(DelayMargin, SmallLoopGainNeverCrosses) {
  DelayLoop loop;
  loop.delayed = {Polynomial{0.5}, Polynomial{1.0, 1.0}};
  const MarginResult m = time_delay_margin(loop);
  EXPECT_FALSE(m.found);
  EXPECT_DOUBLE_EQ(m.tau, MarginOptions{}.tau_max);
}

TEST(DelayMargin, UnstableAtZeroDelayThrows) {
  DelayLoop loop;
  loop.delayed = {Polynomial{-2.0}, Polynomial{1.0, 1.0}};  // 1 + L = (s - 1)/(s + 1)
  try {
    time_delay_margin(loop);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kUnstable);
  }
}

TEST(DelayMargin, MracMatchesClosedForm) {
  for (double gamma : {10.0, 100.0, 1000.0, 10000.0}) {
    const MarginResult m = time_delay_margin(mrac_loop(gamma, -2.0));
    ASSERT_TRUE(m.found);
    EXPECT_NEAR(m.tau, mrac_margin_closed_form(gamma), 1e-9 * mrac_margin_closed_form(gamma))
        << "gamma " << gamma;
  }
}

TEST(DelayMargin, MracLoopValue) {
  const std::complex<double> s(0.0, 2.0);
  const std::complex<double> expected = (5.0 + 2.0 * s) / (s * (s - 1.0)) * std::exp(-s * 0.1);
  EXPECT_LE(std::abs(open_loop_mrac(5.0, -2.0, 2.0, 0.1) - expected), 1e-14);
  EXPECT_LE(std::abs(mrac_loop(5.0, -2.0)(2.0, 0.1) - expected), 1e-14);
}

TEST(DelayMargin, L1LoopValue) {
  const std::complex<double> s(0.0, 3.0);
  const double gamma = 50.0, k = -2.0, am = -1.0;
  const std::complex<double> c = 1.0 / (s + 1.0);
  const std::complex<double> e = std::exp(-s * 0.2);
  const std::complex<double> expected =
      -k / (s - 1.0) * e + gamma * c / (s * s - am * s + gamma) * (e - 1.0);
  EXPECT_LE(std::abs(open_loop_l1(gamma, k, am, kUnitLag, 0.2, 3.0) - expected), 1e-13);
}

TEST(DelayMargin, L1LoopTouchesMinusOne) {
  // Scan values are slightly early by construction (they stop once |1 + L|
  // drops below 2e-3), so the exact margin sits just above them.
  const double scan[] = {0.235191, 0.375497, 0.389531, 0.390813};
  const double gammas[] = {10.0, 100.0, 1000.0, 10000.0};
  for (int i = 0; i < 4; ++i) {
    const DelayLoop loop = l1_loop(gammas[i], -2.0, -1.0, kUnitLag);
    const MarginResult m = time_delay_margin(loop);
    ASSERT_TRUE(m.found);
    EXPECT_GE(m.tau, scan[i]);
    EXPECT_LE(m.tau, scan[i] * 1.01);
    EXPECT_LE(std::abs(1.0 + loop(m.crossover_frequency, m.tau)), 1e-8);
  }
}

TEST(DelayMargin, CurveKeepsGridOrder) {
  const MarginCurve curve = margin_curve({10.0, 100.0, 1000.0});
  ASSERT_EQ(curve.gamma_values.size(), 3u);
  ASSERT_EQ(curve.l1.size(), 3u);
  for (int i = 0; i < 3; ++i)
    EXPECT_NEAR(curve.mrac[i].tau, mrac_margin_closed_form(curve.gamma_values[i]),
                1e-9 * curve.mrac[i].tau);
  EXPECT_GT(curve.l1[1].tau, curve.l1[0].tau);
  EXPECT_THROW(margin_curve({100.0, 10.0}), Error);
}

TEST(DelayMargin, CharacteristicPolynomial) {
  // (Gamma + 2s)/(s(s-1)) closes to s^2 + s + Gamma.
  const Polynomial p = mrac_loop(10.0, -2.0).characteristic();
  const auto d = p.descending();
  ASSERT_EQ(d.size(), 3u);
  EXPECT_NEAR(d[1] / d[0], 1.0, 1e-14);
  EXPECT_NEAR(d[2] / d[0], 10.0, 1e-14);
}
