#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "l1adapt/controllers.hpp"
#include "l1adapt/lti_system.hpp"

namespace l1adapt {

/// r(t) = amplitude for a step, amplitude * cos(frequency t) for a harmonic.
struct ReferenceSignal {
  enum class Kind { kStep, kHarmonic };
  Kind kind = Kind::kStep;
  double amplitude = 0.0;
  double frequency = 0.0;

  static ReferenceSignal step(double amplitude) { return {Kind::kStep, amplitude, 0.0}; }
  static ReferenceSignal harmonic(double amplitude, double frequency) {
    return {Kind::kHarmonic, amplitude, frequency};
  }
  double sup_norm() const;
};

double eval_reference_signal(const ReferenceSignal& spec, double t);

struct ThetaSample {
  Eigen::VectorXd theta;
  Eigen::VectorXd rate;
};

ThetaSample eval_theta(const ThetaTrajectory& traj, double t);

/// Bound on ||d theta/dt||_2: 2-norm of the per-component sums of |a_ik w_ik|.
double theta_rate_bound(const ThetaTrajectory& traj);

/// Fixed-length history of a scalar signal on a uniform grid, read back with a
/// delay that is a whole number of steps. Values before the first push are 0.
class DelayLine {
 public:
  DelayLine(double delay, double dt);

  double requested_delay() const { return requested_; }
  double applied_delay() const { return static_cast<double>(steps_) * dt_; }
  int delay_steps() const { return steps_; }

  /// Appends u(t_k); must be called once per grid point in order.
  void push(double value);
  /// u(t_k + frac*dt - delay) for the most recently pushed index k, frac in [0, 1],
  /// by linear interpolation between grid samples. Requires delay_steps() >= 1.
  double delayed(double frac) const;

 private:
  double sample(long index) const;

  double requested_;
  double dt_;
  int steps_;
  long pushed_ = 0;
  std::vector<double> ring_;
};

/// u(t - tau) from a history sampled at dt (history[k] = u(k dt)), zero before tau;
/// linear interpolation between samples.
double delay_line(const std::vector<double>& history, double dt, double tau, double t);

struct SimScenario {
  double horizon = 10.0;
  double dt = 0.0;  // 0 selects default_step
  ReferenceSignal reference = ReferenceSignal::step(0.0);
  double input_delay = 0.0;
  Eigen::VectorXd x0;
  std::optional<Eigen::VectorXd> theta_hat0;
  double record_interval = 1e-3;
  /// Tracking error is also reported over t >= settle_time.
  double settle_time = 1.0;
  bool with_reference = true;
  bool with_design = true;
};

/// Running extrema over every integration step (not just recorded samples).
struct SimMonitors {
  double sup_state_error = 0.0;    // max_t ||x - x_ref||_inf
  double sup_control_error = 0.0;  // max_t |u - u_ref|
  double sup_output_error = 0.0;   // max_t |y - y_ref|
  double sup_prediction_error = 0.0;    // max_t ||x_hat - x||_2
  double final_prediction_error = 0.0;
  double sup_tracking_error = 0.0;          // max_t |y - r|
  double sup_tracking_error_settled = 0.0;  // same over t >= settle_time
  double sup_output_design_error = 0.0;     // max_t |y_ref - y_des|
  double sup_control_design_error = 0.0;    // max_t |u_ref - u_des|
  double sup_state = 0.0;                   // max_t ||x||_inf
  double sup_control = 0.0;
  double lyapunov_initial = 0.0;
  double max_lyapunov_increase = 0.0;  // max_k V(t_{k+1}) - V(t_k), may be negative
  bool theta_hat_in_box = true;
};

struct SimTrace {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x, x_hat, theta_hat;
  std::vector<double> u, y;
  std::vector<Eigen::VectorXd> x_ref;
  std::vector<double> u_ref, y_ref;
  std::vector<double> y_des, u_des;
  std::vector<double> V;
  std::vector<double> r;

  bool has_reference = false;
  bool has_design = false;
  bool has_lyapunov = false;

  double dt = 0.0;
  long steps = 0;
  double requested_delay = 0.0;
  double applied_delay = 0.0;
  SimMonitors monitors;
};

/// Step size used when the scenario leaves dt at 0.
double default_step(const PlantModel& plant, const L1Config& cfg, const SimScenario& scenario);

/// Adaptive closed loop (L1 or MRAC). When requested by the scenario the
/// reference system and (for constant theta) the design systems are integrated
/// on the same grid.
SimTrace simulate_closed_loop(const PlantModel& plant, const L1Config& cfg,
                              const SimScenario& scenario);

/// Closed loop with the static controller u = -k x + k r.
SimTrace simulate_highgain(const PlantModel& plant, const HighGainConfig& cfg,
                           const SimScenario& scenario);

struct ReferenceResponse {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x_ref;
  std::vector<double> u_ref, y_ref;
};

/// Non-adaptive reference system using the true theta(t).
ReferenceResponse simulate_reference(const PlantModel& plant, const L1Config& cfg,
                                     const SimScenario& scenario);

struct DesignResponse {
  std::vector<double> t;
  std::vector<double> y_des, u_des;
};

/// Design signals; requires a constant theta.
DesignResponse simulate_des(const PlantModel& plant, const L1Config& cfg,
                            const SimScenario& scenario);

/// Output of an LTI system driven from rest by r(t), sampled every `record_stride`
/// steps of size dt over [0, horizon].
struct LtiResponse {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> y;
};

LtiResponse simulate_lti(const LtiSystem& sys, const ReferenceSignal& input, double horizon,
                         double dt, long record_stride = 1);

/// y_des = k_g C(s) c^T H_o(s) r.
LtiSystem design_output_system(const PlantModel& plant, const L1Config& cfg);
/// u_des = k_g C(s) (1 + C(s) theta^T H_o(s) - K^T H_o(s)) r.
LtiSystem design_control_system(const L1Config& cfg, const Eigen::VectorXd& theta);

}  // namespace l1adapt
