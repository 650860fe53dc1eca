#include "l1adapt/reference_analysis.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <numbers>

#include "l1adapt/error.hpp"
#include "l1adapt/interconnect.hpp"
#include "l1adapt/l1_norm.hpp"
#include "l1adapt/linear_algebra.hpp"
#include "l1adapt/parallel.hpp"

namespace l1adapt {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
// Truncation tolerance for every L1 norm feeding a reported bound.
constexpr double kAnalysisTol = 1e-6;

LtiSystem row_gain(const VectorXd& v) { return LtiSystem::gain(MatrixXd(v.transpose())); }

LtiSystem filter_minus_one(const L1Config& cfg) {
  return subtract(cfg.filter, LtiSystem::gain(1.0));
}

void require_feasible(double lambda) {
  require(lambda < 1.0, ErrorKind::kInfeasibleDesign,
          "lambda = " + std::to_string(lambda) + " >= 1: infeasible design");
}

// sup over t >= 0 of max |steady(t) + C e^{At} W| (entrywise), sampled on a
// uniform grid until the transient envelope is below 1e-4 of the running peak.
SignalNorm transient_sup(const LtiSystem& sys, const MatrixXd& W,
                         const std::function<MatrixXd(double)>& steady, double steady_peak,
                         double min_horizon) {
  SignalNorm out;
  out.value = steady_peak;
  if (sys.states() == 0 || W.isZero(0.0)) {
    out.value = std::max(out.value, steady(0.0).cwiseAbs().maxCoeff());
    return out;
  }
  double fastest = 0.0;
  for (const auto& p : sys.A().eigenvalues()) fastest = std::max(fastest, std::abs(p));
  double dt = 1.0 / (20.0 * fastest);
  if (min_horizon > 0.0) dt = std::min(dt, min_horizon / 400.0);
  const DecayEnvelope env = decay_envelope(sys.A());
  double c_norm = 0.0;
  for (Eigen::Index i = 0; i < sys.C().rows(); ++i) c_norm = std::max(c_norm, sys.C().row(i).norm());

  const MatrixXd phi = (sys.A() * dt).exp();
  MatrixXd state = W;
  constexpr long kMaxSamples = 20'000'000;
  for (long k = 0;; ++k) {
    require(k < kMaxSamples, ErrorKind::kInvalidArgument,
            "sup norm: response did not settle within the sample budget");
    const double t = static_cast<double>(k) * dt;
    out.value = std::max(out.value, (steady(t) + sys.C() * state).cwiseAbs().maxCoeff());
    double tail = 0.0;
    for (Eigen::Index j = 0; j < state.cols(); ++j)
      tail = std::max(tail, c_norm * env.envelope * state.col(j).norm());
    if (t >= min_horizon && tail <= 1e-4 * out.value) {
      out.residual = tail;
      out.horizon = t;
      return out;
    }
    state = phi * state;
  }
}

}  // namespace

ThetaConstants compute_theta_constants(const ParamBox& omega_box, const ThetaTrajectory& traj,
                                       const MatrixXd& P, const MatrixXd& Q) {
  const VectorXd corner = omega_box.lo.cwiseAbs().cwiseMax(omega_box.hi.cwiseAbs());
  ThetaConstants k;
  k.theta_max = corner.sum();
  k.theta_bar_max = 4.0 * corner.squaredNorm();
  k.d_theta = theta_rate_bound(traj);
  k.theta_m = k.theta_bar_max;
  if (k.d_theta > 0.0)
    k.theta_m += 2.0 * k.d_theta * max_eigenvalue(P) / min_eigenvalue(Q) * corner.norm();
  return k;
}

LtiSystem build_Gbar(const L1Config& cfg) { return series(cfg.H_o, filter_minus_one(cfg)); }

LtiSystem build_G(const L1Config& cfg) { return scale(series(cfg.H_o, cfg.filter), cfg.k_g); }

double compute_lambda(const PlantModel& plant, const L1Config& cfg) {
  const double theta_max = compute_theta_constants(plant.omega_box, plant.theta, cfg.P, cfg.Q).theta_max;
  if (cfg.is_mrac()) return 0.0;
  const LtiSystem gbar = build_Gbar(cfg);
  require(gbar.is_stable(), ErrorKind::kUnstable, "compute_lambda: Gbar is not stable");
  return l1_gain(gbar, kAnalysisTol) * theta_max;
}

LambdaSweep lambda_sweep(const PlantModel& plant, const VectorXd& K, FilterSpec::Kind family,
                         const std::vector<double>& omega_grid) {
  require(family == FilterSpec::Kind::kFirstOrder || family == FilterSpec::Kind::kThirdOrder,
          ErrorKind::kInvalidArgument, "lambda_sweep: family must be first or third order");
  require(!omega_grid.empty(), ErrorKind::kInvalidArgument, "lambda_sweep: empty grid");
  for (std::size_t i = 0; i < omega_grid.size(); ++i) {
    require(omega_grid[i] > 0.0, ErrorKind::kInvalidArgument, "lambda_sweep: omega must be positive");
    require(i == 0 || omega_grid[i] > omega_grid[i - 1], ErrorKind::kInvalidArgument,
            "lambda_sweep: grid must be ascending");
  }
  const MatrixXd Q = MatrixXd::Identity(plant.order(), plant.order());
  LambdaSweep sweep;
  sweep.points = parallel_map<LambdaPoint>(omega_grid.size(), [&](std::size_t i) {
    FilterSpec spec = family == FilterSpec::Kind::kFirstOrder ? FilterSpec::first_order(omega_grid[i])
                                                              : FilterSpec::third_order(omega_grid[i]);
    const L1Config cfg = build_l1(plant, K, spec, 1.0, Q);
    return LambdaPoint{omega_grid[i], compute_lambda(plant, cfg)};
  });
  for (std::size_t i = 1; i < sweep.points.size(); ++i) {
    const auto& a = sweep.points[i - 1];
    const auto& b = sweep.points[i];
    if (a.lambda >= 1.0 && b.lambda < 1.0) {
      sweep.crossing = a.omega + (a.lambda - 1.0) / (a.lambda - b.lambda) * (b.omega - a.omega);
      break;
    }
  }
  return sweep;
}

LtiSystem build_H2(const PlantModel& plant, const L1Config& cfg, const VectorXd& theta) {
  require_feasible(compute_lambda(plant, cfg));
  const int n = plant.order();
  const LtiSystem loop = series(build_Gbar(cfg), row_gain(theta));
  const LtiSystem inverse = feedback_inverse(loop);
  const LtiSystem inner = add(loop, diagonal_copies(filter_minus_one(cfg), n));
  return add(LtiSystem::identity(n), series(inverse, inner));
}

LtiSystem build_H3(const PlantModel& plant, const L1Config& cfg, const VectorXd& theta) {
  require_feasible(compute_lambda(plant, cfg));
  return series(build_H4(cfg, theta), filter_minus_one(cfg));
}

LtiSystem build_H4(const L1Config& cfg, const VectorXd& theta) {
  return series(build_H5(cfg, theta), cfg.filter);
}

LtiSystem build_H5(const L1Config& cfg, const VectorXd& theta) {
  return scale(series(cfg.H_o, series(row_gain(theta), cfg.H_o)), cfg.k_g);
}

LtiSystem build_control_row(const L1Config& cfg, const VectorXd& theta) {
  return subtract(series(cfg.filter, row_gain(theta)), row_gain(cfg.K));
}

LtiSystem build_co_inverse_row(const L1Config& cfg) {
  require(!cfg.is_mrac(), ErrorKind::kUnsupported,
          "C(s)/(c_o^T H_o(s)) is improper for C = 1");
  const RelativeDegreeOneOutput co = construct_co(cfg.A_m, cfg.b);
  const TransferFunction c = filter_transfer_function(cfg.filter_spec);
  const LtiSystem scalar = LtiSystem::from_tf(c.num * co.denominator, c.den * co.numerator);
  return series(scalar, row_gain(co.c_o));
}

Gammas compute_gammas(const PlantModel& plant, const L1Config& cfg) {
  const ThetaConstants k = compute_theta_constants(plant.omega_box, plant.theta, cfg.P, cfg.Q);
  const double lambda = compute_lambda(plant, cfg);
  require_feasible(lambda);

  Gammas g;
  GammaFactors& f = g.factors;
  f.lambda_min_P = min_eigenvalue(cfg.P);
  f.lambda_max_P = max_eigenvalue(cfg.P);
  f.filter = l1_gain(cfg.filter, kAnalysisTol);
  f.k_row = cfg.K.cwiseAbs().sum();
  f.co_inverse = cfg.is_mrac() ? kInf : l1_gain(build_co_inverse_row(cfg), kAnalysisTol);

  auto combine = [&](double lambda_P, double& g1, double& g2, double& g3, double& g4) {
    if (plant.theta.is_constant()) {
      const double root = std::sqrt(k.theta_bar_max / lambda_P);
      g1 = f.h2 * root;
      g2 = std::isinf(f.co_inverse) ? kInf : f.co_inverse * root + f.control_row * g1;
    } else {
      g1 = g2 = kNaN;
    }
    const double root_m = std::sqrt(k.theta_m / (lambda_P * cfg.gamma_c));
    g3 = f.filter / (1.0 - lambda) * root_m;
    g4 = std::isinf(f.co_inverse) ? kInf
                                  : f.co_inverse * root_m + (f.k_row + f.filter * k.theta_max) * g3;
  };
  if (plant.theta.is_constant()) {
    const VectorXd& theta = plant.theta.offset;
    f.h2 = l1_gain(build_H2(plant, cfg, theta), kAnalysisTol);
    f.control_row = l1_gain(build_control_row(cfg, theta), kAnalysisTol);
  } else {
    f.h2 = f.control_row = kNaN;
  }
  combine(f.lambda_min_P, g.gamma1, g.gamma2, g.gamma3, g.gamma4);
  combine(f.lambda_max_P, g.gamma1_lmax, g.gamma2_lmax, g.gamma3_lmax, g.gamma4_lmax);
  return g;
}

SignalNorm response_sup_norm(const LtiSystem& sys, const ReferenceSignal& r) {
  require(sys.inputs() == 1, ErrorKind::kDimensionMismatch,
          "response_sup_norm: single-input system required");
  require(sys.states() == 0 || sys.is_stable(), ErrorKind::kUnstable,
          "response_sup_norm: system is not stable");
  const double r0 = r.amplitude;
  const bool step = r.kind == ReferenceSignal::Kind::kStep || r.frequency == 0.0;
  if (sys.states() == 0) return {sys.D().cwiseAbs().maxCoeff() * std::abs(r0), 0.0, 0.0};

  const int n = sys.states();
  if (step) {
    // x(t) = -A^{-1} B r0 + e^{At} A^{-1} B r0
    const MatrixXd steady_value = dc_gain(sys) * r0;
    const MatrixXd W = sys.A().fullPivLu().solve(sys.B()) * r0;
    return transient_sup(sys, W, [&](double) { return steady_value; },
                         steady_value.cwiseAbs().maxCoeff(), 0.0);
  }
  const std::complex<double> jw(0.0, r.frequency);
  const Eigen::MatrixXcd resolvent =
      (jw * Eigen::MatrixXcd::Identity(n, n) - sys.A().cast<std::complex<double>>())
          .fullPivLu()
          .solve(sys.B().cast<std::complex<double>>());
  const Eigen::MatrixXcd response = evaluate(sys, jw) * r0;
  const MatrixXd W = -resolvent.real() * r0;
  const double period = 2.0 * std::numbers::pi / r.frequency;
  auto steady = [&](double t) {
    const std::complex<double> phase = std::exp(jw * t);
    return MatrixXd((response * phase).real());
  };
  return transient_sup(sys, W, steady, response.cwiseAbs().maxCoeff(), period);
}

SignalNorm impulse_sup_norm(const LtiSystem& sys) {
  require(sys.states() == 0 || sys.is_stable(), ErrorKind::kUnstable,
          "impulse_sup_norm: system is not stable");
  const MatrixXd zero = MatrixXd::Zero(sys.outputs(), sys.inputs());
  return transient_sup(sys, sys.B(), [&](double) { return zero; }, 0.0, 0.0);
}

DesignBounds design_bounds(const PlantModel& plant, const L1Config& cfg, const ReferenceSignal& r) {
  require(plant.theta.is_constant(), ErrorKind::kUnsupported,
          "design_bounds: defined for constant theta only");
  const double lambda = compute_lambda(plant, cfg);
  require_feasible(lambda);
  const VectorXd& theta = plant.theta.offset;
  DesignBounds d;
  d.g_l1 = l1_gain(build_G(cfg), kAnalysisTol);
  const double c_l1 = plant.c.cwiseAbs().sum();
  const double row_l1 = l1_gain(build_control_row(cfg, theta), kAnalysisTol);
  const double r_sup = r.sup_norm();

  const SignalNorm h3 = response_sup_norm(build_H3(plant, cfg, theta), r);
  d.h3_sup = h3.value;
  d.h3_residual = h3.residual;
  d.output_lambda = lambda / (1.0 - lambda) * c_l1 * d.g_l1 * r_sup;
  d.output_h3 = c_l1 * d.h3_sup / (1.0 - lambda);
  d.control_lambda = lambda / (1.0 - lambda) * row_l1 * d.g_l1 * r_sup;
  d.control_h3 = row_l1 * d.h3_sup / (1.0 - lambda);

  const LtiSystem cm1 = filter_minus_one(cfg);
  const bool decaying_input = r.kind == ReferenceSignal::Kind::kStep || r.frequency == 0.0;
  if (cfg.is_mrac()) {
    d.h3_via_h4 = 0.0;
  } else if (decaying_input) {
    // ((C - 1)(s) / s) r0 is realized by (A, A^{-1} B, C) since C(0) = 1.
    const LtiSystem& fc = cfg.filter;
    const LtiSystem integrated(fc.A(), fc.A().fullPivLu().solve(fc.B()), fc.C(),
                               MatrixXd::Zero(1, 1));
    d.h3_via_h4 = std::abs(r.amplitude) * l1_gain(integrated, kAnalysisTol) *
                  impulse_sup_norm(build_H4(cfg, theta)).value;
  } else {
    d.h3_via_h4 = kInf;
  }
  d.h3_via_h5 = cfg.is_mrac() ? 0.0
                              : l1_gain(series(cfg.filter, cm1), kAnalysisTol) *
                                    response_sup_norm(build_H5(cfg, theta), r).value;
  return d;
}

double BoundsReport::state_bound() const {
  return time_varying ? gammas.gamma3 : gammas.gamma1 / std::sqrt(gamma_c);
}

double BoundsReport::control_bound() const {
  return time_varying ? gammas.gamma4 : gammas.gamma2 / std::sqrt(gamma_c);
}

double BoundsReport::output_bound() const { return c_l1 * state_bound(); }

bool BoundsReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const BoundCheck& c) { return c.passed; });
}

BoundsReport make_bounds_report(const PlantModel& plant, const L1Config& cfg,
                                const ReferenceSignal& r) {
  BoundsReport report;
  report.constants = compute_theta_constants(plant.omega_box, plant.theta, cfg.P, cfg.Q);
  report.lambda = compute_lambda(plant, cfg);
  require_feasible(report.lambda);
  report.gamma_c = cfg.gamma_c;
  report.time_varying = !plant.theta.is_constant();
  report.mrac = cfg.is_mrac();
  report.c_l1 = plant.c.cwiseAbs().sum();
  report.gammas = compute_gammas(plant, cfg);
  const double numerator =
      report.time_varying ? report.constants.theta_m : report.constants.theta_bar_max;
  report.prediction_bound =
      std::sqrt(numerator / (report.gammas.factors.lambda_min_P * cfg.gamma_c));
  if (!report.time_varying) report.design = design_bounds(plant, cfg, r);
  return report;
}

void verify_trace(const SimTrace& trace, const ReferenceSignal& r, BoundsReport& report,
                  const VerifyOptions& options) {
  require(trace.has_reference, ErrorKind::kInvalidArgument,
          "verify_trace: trace has no reference-system series");
  const SimMonitors& m = trace.monitors;
  auto add = [&](std::string name, double bound, double observed) {
    report.checks.push_back({std::move(name), bound, observed, observed <= bound});
  };
  report.checks.clear();
  add("state_error", report.state_bound(), m.sup_state_error);
  add("output_error", report.output_bound(), m.sup_output_error);
  add("control_error", report.control_bound(), m.sup_control_error);
  add("prediction_error", report.prediction_bound, m.sup_prediction_error);
  add("projection", 0.0, m.theta_hat_in_box ? 0.0 : 1.0);
  if (trace.has_lyapunov)
    add("lyapunov_decrease", options.lyapunov_rel_tol * m.lyapunov_initial,
        m.max_lyapunov_increase);
  if (r.kind == ReferenceSignal::Kind::kStep && !trace.y.empty())
    add("steady_state", options.steady_state_rel_tol * std::abs(r.amplitude),
        std::abs(trace.y.back() - r.amplitude));
  if (report.design && trace.has_design) {
    add("design_output_lambda", report.design->output_lambda, m.sup_output_design_error);
    add("design_output_h3", report.design->output_h3, m.sup_output_design_error);
    add("design_control_lambda", report.design->control_lambda, m.sup_control_design_error);
    add("design_control_h3", report.design->control_h3, m.sup_control_design_error);
  }
}

}  // namespace l1adapt
