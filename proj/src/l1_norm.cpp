#include "l1adapt/l1_norm.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "l1adapt/error.hpp"
#include "l1adapt/linear_algebra.hpp"

namespace l1adapt {
namespace {

// Steps per unit of |pole|; a mode counts as live while |Re p| t < kLiveExponent.
constexpr double kStepsPerPole = 40.0;
constexpr double kLiveExponent = 40.0;

void require_stable(const LtiSystem& sys, const char* who) {
  require(sys.states() == 0 || sys.is_stable(), ErrorKind::kUnstable,
          std::string(who) + ": system is not stable (spectral abscissa " +
              std::to_string(spectral_abscissa(sys.A())) + ")");
}

// Exact integral of |q| over [0, 2h] where q is the quadratic through
// (0, y0), (h, y1), (2h, y2). Equals Simpson's rule when q has no root inside.
double abs_quadratic_integral(double y0, double y1, double y2, double h) {
  const double b = (-3.0 * y0 + 4.0 * y1 - y2) / 2.0;
  const double c = (y0 - 2.0 * y1 + y2) / 2.0;
  auto F = [&](double u) { return u * (y0 + u * (b / 2.0 + u * c / 3.0)); };

  double cuts[4] = {0.0, 0.0, 0.0, 2.0};
  int count = 1;
  auto add_root = [&](double u) {
    if (u > 0.0 && u < 2.0) cuts[count++] = u;
  };
  const double scale = std::abs(y0) + std::abs(y1) + std::abs(y2);
  if (std::abs(c) <= 1e-14 * scale) {
    if (b != 0.0) add_root(-y0 / b);
  } else {
    const double disc = b * b - 4.0 * c * y0;
    if (disc > 0.0) {
      const double q = -0.5 * (b + std::copysign(std::sqrt(disc), b));
      const double r1 = q / c;
      const double r2 = q != 0.0 ? y0 / q : r1;
      add_root(std::min(r1, r2));
      if (r2 != r1) add_root(std::max(r1, r2));
    }
  }
  cuts[count++] = 2.0;
  std::sort(cuts + 1, cuts + count - 1);
  double total = 0.0;
  for (int k = 0; k + 1 < count; ++k) total += std::abs(F(cuts[k + 1]) - F(cuts[k]));
  return h * total;
}

}  // namespace

DecayEnvelope decay_envelope(const Eigen::MatrixXd& A) {
  const double sigma = -spectral_abscissa(A);
  require(sigma > 0.0, ErrorKind::kUnstable, "decay_envelope: A is not Hurwitz");
  const double decay = 0.5 * sigma;
  const auto n = A.rows();
  const Eigen::MatrixXd shifted = A + decay * Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd X = solve_lyapunov(shifted, Eigen::MatrixXd::Identity(n, n));
  const double envelope = std::sqrt(max_eigenvalue(X) / min_eigenvalue(X));
  return {envelope, decay};
}

ImpulseResponse impulse_response(const LtiSystem& sys, double horizon, double step) {
  require(step > 0.0 && horizon >= step, ErrorKind::kInvalidArgument,
          "impulse_response: need step > 0 and horizon >= step");
  require_stable(sys, "impulse_response");
  const auto samples = static_cast<std::size_t>(std::floor(horizon / step + 1e-9)) + 1;
  ImpulseResponse out;
  out.direct = sys.D();
  out.t.reserve(samples);
  out.h.reserve(samples);
  if (sys.states() == 0) {
    for (std::size_t k = 0; k < samples; ++k) {
      out.t.push_back(static_cast<double>(k) * step);
      out.h.push_back(Eigen::MatrixXd::Zero(sys.outputs(), sys.inputs()));
    }
    return out;
  }
  const Eigen::MatrixXd phi = (sys.A() * step).exp();
  Eigen::MatrixXd state = sys.B();
  for (std::size_t k = 0; k < samples; ++k) {
    out.t.push_back(static_cast<double>(k) * step);
    out.h.push_back(sys.C() * state);
    state = phi * state;
  }
  return out;
}

Eigen::MatrixXd l1_entries(const LtiSystem& sys, double rel_tol) {
  require(rel_tol > 0.0 && rel_tol < 1.0, ErrorKind::kInvalidArgument,
          "l1_gain: rel_tol must lie in (0, 1)");
  require_stable(sys, "l1_gain");
  Eigen::MatrixXd result = sys.D().cwiseAbs();
  if (sys.states() == 0) return result;

  const Eigen::MatrixXd& A = sys.A();
  const Eigen::MatrixXd& C = sys.C();
  const Eigen::VectorXcd poles = A.eigenvalues();
  double fastest = 0.0;
  double slowest = std::numeric_limits<double>::infinity();
  for (const auto& p : poles) {
    fastest = std::max(fastest, std::abs(p));
    slowest = std::min(slowest, std::abs(p));
  }
  const double h0 = 1.0 / (kStepsPerPole * fastest);

  // Step allowed once every mode faster than the current one has decayed.
  auto allowed_step = [&](double t) {
    double fastest_live = slowest;
    for (const auto& p : poles)
      if (-p.real() * t < kLiveExponent) fastest_live = std::max(fastest_live, std::abs(p));
    return 1.0 / (kStepsPerPole * fastest_live);
  };

  const DecayEnvelope env = decay_envelope(A);
  Eigen::VectorXd row_norms(C.rows());
  for (Eigen::Index i = 0; i < C.rows(); ++i) row_norms(i) = C.row(i).norm();

  std::vector<Eigen::MatrixXd> propagators{(A * h0).exp()};
  constexpr long kMaxPanels = 50'000'000;

  for (Eigen::Index j = 0; j < sys.inputs(); ++j) {
    Eigen::VectorXd x = sys.B().col(j);
    Eigen::VectorXd integral = Eigen::VectorXd::Zero(C.rows());
    const Eigen::VectorXd floor = 1e-13 * row_norms * env.envelope * x.norm() / env.decay;
    std::size_t level = 0;
    double h = h0;
    double t = 0.0;
    Eigen::VectorXd y0 = C * x;
    for (long panel = 0;; ++panel) {
      require(panel < kMaxPanels, ErrorKind::kInvalidArgument,
              "l1_gain: quadrature did not converge (time scales too disparate)");
      const Eigen::VectorXd tail = row_norms * (env.envelope * x.norm() / env.decay);
      bool done = true;
      for (Eigen::Index i = 0; i < C.rows(); ++i)
        if (tail(i) > rel_tol * integral(i) && tail(i) > floor(i)) done = false;
      if (done) break;

      const double allowed = allowed_step(t);
      while (2.0 * h <= allowed && level < 60) {
        ++level;
        if (propagators.size() <= level)
          propagators.push_back(propagators[level - 1] * propagators[level - 1]);
        h *= 2.0;
      }
      const Eigen::MatrixXd& phi = propagators[level];
      const Eigen::VectorXd x1 = phi * x;
      const Eigen::VectorXd x2 = phi * x1;
      const Eigen::VectorXd y1 = C * x1;
      const Eigen::VectorXd y2 = C * x2;
      for (Eigen::Index i = 0; i < C.rows(); ++i)
        integral(i) += abs_quadratic_integral(y0(i), y1(i), y2(i), h);
      x = x2;
      y0 = y2;
      t += 2.0 * h;
    }
    result.col(j) += integral;
  }
  return result;
}

double l1_gain(const LtiSystem& sys, double rel_tol) {
  return l1_entries(sys, rel_tol).rowwise().sum().maxCoeff();
}

}  // namespace l1adapt
