#include <gtest/gtest.h>

#include <complex>
#include <random>

#include "l1adapt/error.hpp"
#include "l1adapt/interconnect.hpp"
#include "support/properties.hpp"

using namespace l1adapt;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using cd = std::complex<double>;

namespace {

const cd kPoints[] = {cd(0.0, 0.5), cd(1.0, 2.0), cd(-0.2, 7.0)};

void expect_close(const MatrixXcd& a, const MatrixXcd& b) {
  EXPECT_LE((a - b).norm(), 1e-10 * (1.0 + b.norm()));
}

struct Fixture {
  std::mt19937_64 rng{42};
  LtiSystem make(int states, int in, int out) {
    const LtiSystem s = proptest::random_stable_system(rng, states, in, out);
    std::normal_distribution<double> n01;
    MatrixXd D(out, in);
    for (int i = 0; i < out; ++i)
      for (int j = 0; j < in; ++j) D(i, j) = 0.3 * n01(rng);
    return LtiSystem(s.A(), s.B(), s.C(), D);
  }
};

}  // namespace

TEST(Interconnect, SeriesMultipliesResponses) {
  Fixture f;
  const LtiSystem a = f.make(2, 1, 2), b = f.make(3, 2, 2);
  const LtiSystem ba = series(b, a);
  EXPECT_EQ(ba.states(), 5);
  EXPECT_EQ(ba.inputs(), 1);
  for (cd s : kPoints) expect_close(evaluate(ba, s), evaluate(b, s) * evaluate(a, s));
  EXPECT_THROW(series(a, b), Error);
}

TEST(Interconnect, SumDifferenceScale) {
  Fixture f;
  const LtiSystem a = f.make(2, 2, 1), b = f.make(1, 2, 1);
  for (cd s : kPoints) {
    expect_close(evaluate(add(a, b), s), evaluate(a, s) + evaluate(b, s));
    expect_close(evaluate(subtract(a, b), s), evaluate(a, s) - evaluate(b, s));
    expect_close(evaluate(scale(a, -2.5), s), -2.5 * evaluate(a, s));
  }
  EXPECT_THROW(add(a, f.make(1, 1, 1)), Error);
}

TEST(Interconnect, AppendAndCopiesAreBlockDiagonal) {
  Fixture f;
  const LtiSystem a = f.make(2, 1, 1), b = f.make(1, 2, 1);
  for (cd s : kPoints) {
    const MatrixXcd ab = evaluate(append(a, b), s);
    ASSERT_EQ(ab.rows(), 2);
    ASSERT_EQ(ab.cols(), 3);
    expect_close(ab.block(0, 0, 1, 1), evaluate(a, s));
    expect_close(ab.block(1, 1, 1, 2), evaluate(b, s));
    EXPECT_EQ(ab(0, 1), cd(0.0));
    EXPECT_EQ(ab(1, 0), cd(0.0));
    const MatrixXcd copies = evaluate(diagonal_copies(a, 3), s);
    expect_close(copies, evaluate(a, s)(0, 0) * MatrixXcd::Identity(3, 3));
  }
}

TEST(Interconnect, FeedbackInverse) {
  Fixture f;
  const LtiSystem m = f.make(3, 2, 2);
  const LtiSystem inv = feedback_inverse(m);
  for (cd s : kPoints) {
    const MatrixXcd expected = (MatrixXcd::Identity(2, 2) - evaluate(m, s)).inverse();
    expect_close(evaluate(inv, s), expected);
  }
  EXPECT_THROW(feedback_inverse(f.make(1, 2, 1)), Error);
  EXPECT_THROW(feedback_inverse(LtiSystem::gain(1.0)), Error);
}

TEST(Interconnect, StaticGainsCompose) {
  const LtiSystem g = series(LtiSystem::gain(2.0), LtiSystem::gain(3.0));
  EXPECT_EQ(g.states(), 0);
  EXPECT_DOUBLE_EQ(g.D()(0, 0), 6.0);
}
