#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "l1adapt/controllers.hpp"
#include "l1adapt/lti_system.hpp"
#include "l1adapt/sim_engine.hpp"

namespace l1adapt {

struct ThetaConstants {
  double theta_max = 0.0;      // max over the box of sum |theta_i|
  double theta_bar_max = 0.0;  // max over the box of sum 4 theta_i^2
  double theta_m = 0.0;        // theta_bar_max + 2 d_theta lmax(P)/lmin(Q) max ||theta||
  double d_theta = 0.0;
};

ThetaConstants compute_theta_constants(const ParamBox& omega_box, const ThetaTrajectory& traj,
                                       const Eigen::MatrixXd& P, const Eigen::MatrixXd& Q);

/// Gbar(s) = H_o(s)(C(s) - 1), n x 1.
LtiSystem build_Gbar(const L1Config& cfg);
/// G(s) = k_g H_o(s) C(s), n x 1.
LtiSystem build_G(const L1Config& cfg);

/// lambda = ||Gbar||_L1 theta_max.
double compute_lambda(const PlantModel& plant, const L1Config& cfg);

struct LambdaPoint {
  double omega;
  double lambda;
};

struct LambdaSweep {
  std::vector<LambdaPoint> points;
  /// First omega (linear interpolation) where lambda drops below 1 going up the grid.
  std::optional<double> crossing;
};

/// lambda over a filter family (first or third order) on an ascending omega grid.
LambdaSweep lambda_sweep(const PlantModel& plant, const Eigen::VectorXd& K,
                         FilterSpec::Kind family, const std::vector<double>& omega_grid);

/// I + (I - Gbar theta^T)^{-1} (Gbar theta^T + (C - 1) I). Requires lambda < 1.
LtiSystem build_H2(const PlantModel& plant, const L1Config& cfg, const Eigen::VectorXd& theta);
/// (C - 1) C k_g H_o theta^T H_o, driven by r. Requires lambda < 1.
LtiSystem build_H3(const PlantModel& plant, const L1Config& cfg, const Eigen::VectorXd& theta);
/// C k_g H_o theta^T H_o.
LtiSystem build_H4(const L1Config& cfg, const Eigen::VectorXd& theta);
/// k_g H_o theta^T H_o, driven by r.
LtiSystem build_H5(const L1Config& cfg, const Eigen::VectorXd& theta);

/// Row system C(s) theta^T - K^T (1 x n).
LtiSystem build_control_row(const L1Config& cfg, const Eigen::VectorXd& theta);
/// C(s) N_d(s)/N_n(s) c_o^T (1 x n), proper when C is strictly proper.
LtiSystem build_co_inverse_row(const L1Config& cfg);

/// Every L1 factor behind the bounds, kept for reporting.
struct GammaFactors {
  double h2 = 0.0;                // ||H2||
  double co_inverse = 0.0;        // ||C N_d/N_n c_o^T||, infinite for C = 1
  double control_row = 0.0;       // ||C theta^T - K^T||
  double filter = 0.0;            // ||C||
  double k_row = 0.0;             // ||K^T||
  double lambda_min_P = 0.0;
  double lambda_max_P = 0.0;
};

/// Transient bounds; the constant-theta pair is NaN for a time-varying
/// trajectory. The unbounded cases (C = 1) are +infinity, not errors.
struct Gammas {
  double gamma1 = 0.0, gamma2 = 0.0;  // ||x - x_ref|| <= gamma1/sqrt(Gc), ||u - u_ref|| <= gamma2/sqrt(Gc)
  double gamma3 = 0.0, gamma4 = 0.0;  // time-varying theta: ||x - x_ref|| <= gamma3, ||u - u_ref|| <= gamma4
  // Same expressions with lmax(P) in place of lmin(P).
  double gamma1_lmax = 0.0, gamma2_lmax = 0.0, gamma3_lmax = 0.0, gamma4_lmax = 0.0;
  GammaFactors factors;
};

Gammas compute_gammas(const PlantModel& plant, const L1Config& cfg);

/// sup_t ||y(t)||_inf of a stable single-input system driven from rest by r,
/// from the exact steady-state plus transient decomposition.
struct SignalNorm {
  double value = 0.0;
  double residual = 0.0;  // bound on what the finite horizon may have missed
  double horizon = 0.0;
};

SignalNorm response_sup_norm(const LtiSystem& sys, const ReferenceSignal& r);

/// sup_t |h(t)| over all entries of the strictly proper part.
SignalNorm impulse_sup_norm(const LtiSystem& sys);

struct DesignBounds {
  double output_lambda = 0.0;   // lambda/(1-lambda) ||c^T|| ||G|| ||r||
  double output_h3 = 0.0;       // 1/(1-lambda) ||c^T|| ||h3||
  double control_lambda = 0.0;  // lambda/(1-lambda) ||C theta^T - K^T|| ||G|| ||r||
  double control_h3 = 0.0;      // 1/(1-lambda) ||C theta^T - K^T|| ||h3||
  double h3_sup = 0.0;
  double h3_residual = 0.0;
  double h3_via_h4 = 0.0;  // ||(C-1) r||_L1 ||h4||, infinite for a non-decaying r
  double h3_via_h5 = 0.0;  // ||(C-1) C||_L1 ||h5||
  double g_l1 = 0.0;
};

DesignBounds design_bounds(const PlantModel& plant, const L1Config& cfg, const ReferenceSignal& r);

struct BoundCheck {
  std::string name;
  double bound = 0.0;
  double observed = 0.0;
  bool passed = false;
  double margin() const { return bound - observed; }
};

struct BoundsReport {
  ThetaConstants constants;
  double lambda = 0.0;
  double gamma_c = 0.0;
  bool time_varying = false;
  bool mrac = false;
  double c_l1 = 0.0;              // ||c^T||
  double prediction_bound = 0.0;  // sqrt(theta_bar_max or theta_m / (lmin(P) Gc))
  Gammas gammas;
  std::optional<DesignBounds> design;
  std::vector<BoundCheck> checks;

  /// Bounds on the two reference-tracking errors for this report's case.
  double state_bound() const;
  double control_bound() const;
  double output_bound() const;
  bool all_passed() const;
};

/// Throws kInfeasibleDesign when lambda >= 1.
BoundsReport make_bounds_report(const PlantModel& plant, const L1Config& cfg,
                                const ReferenceSignal& r);

/// Tolerances used by verify_trace.
struct VerifyOptions {
  double steady_state_rel_tol = 0.01;
  double lyapunov_rel_tol = 1e-6;
};

/// Compares the trace's running extrema with every bound; fills report.checks.
void verify_trace(const SimTrace& trace, const ReferenceSignal& r, BoundsReport& report,
                  const VerifyOptions& options = {});

}  // namespace l1adapt
