#include "l1adapt/sim_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "l1adapt/error.hpp"
#include "l1adapt/interconnect.hpp"
#include "l1adapt/l1_norm.hpp"
#include "l1adapt/linear_algebra.hpp"

namespace l1adapt {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kDivergenceLimit = 1e9;

template <class Derivative>
VectorXd rk4_step(const Derivative& f, const VectorXd& z, double dt) {
  const VectorXd k1 = f(0.0, z);
  const VectorXd k2 = f(0.5, z + 0.5 * dt * k1);
  const VectorXd k3 = f(0.5, z + 0.5 * dt * k2);
  const VectorXd k4 = f(1.0, z + dt * k3);
  return z + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

void guard(const VectorXd& z, double t, const char* what) {
  if (!z.allFinite() || z.cwiseAbs().maxCoeff() > kDivergenceLimit)
    fail(ErrorKind::kDiverged, std::string(what) + " diverged at t = " + std::to_string(t) +
                                   " (a state exceeded 1e9); the closed loop is unstable");
}

long step_count(double horizon, double dt) {
  require(horizon > 0.0 && std::isfinite(horizon), ErrorKind::kInvalidArgument,
          "scenario: horizon must be positive");
  require(dt > 0.0 && std::isfinite(dt), ErrorKind::kInvalidArgument,
          "scenario: dt must be positive");
  const double ratio = horizon / dt;
  const long n = std::lround(ratio);
  require(n >= 1 && std::abs(ratio - static_cast<double>(n)) <= 1e-6 * std::max(1.0, ratio),
          ErrorKind::kInvalidArgument, "scenario: horizon must be an integer multiple of dt");
  return n;
}

// Grid with an integral number of steps no coarser than the requested step.
std::pair<double, long> resolve_grid(double horizon, double dt_requested, double dt_default) {
  if (dt_requested > 0.0) return {dt_requested, step_count(horizon, dt_requested)};
  require(horizon > 0.0 && std::isfinite(horizon), ErrorKind::kInvalidArgument,
          "scenario: horizon must be positive");
  const long n = static_cast<long>(std::ceil(horizon / dt_default - 1e-9));
  return {horizon / static_cast<double>(n), std::max(n, 1L)};
}

long record_stride(double record_interval, double dt) {
  if (record_interval <= dt) return 1;
  return std::max(1L, std::lround(record_interval / dt));
}

double theta_max_of(const ParamBox& box) {
  return box.lo.cwiseAbs().cwiseMax(box.hi.cwiseAbs()).sum();
}

// Integrates the reference system dx = A x + b(u_ref - theta^T x) with
// u_ref = -K^T x + C(s)(k_g r + theta^T x).
class ReferenceStepper {
 public:
  ReferenceStepper(const PlantModel& plant, const L1Config& cfg, const ReferenceSignal& r,
                   const VectorXd& x0)
      : plant_(plant), cfg_(cfg), r_(r), n_(plant.order()), nf_(cfg.filter.states()) {
    state_ = VectorXd::Zero(n_ + nf_);
    state_.head(n_) = x0;
  }

  VectorXd x() const { return state_.head(n_); }

  double control(double t, const VectorXd& z) const {
    const VectorXd xr = z.head(n_);
    const VectorXd theta = eval_theta(plant_.theta, t).theta;
    return control_with(t, z, xr, theta);
  }

  void step(double t, double dt) {
    auto f = [&](double c, const VectorXd& z) {
      const double ts = t + c * dt;
      const VectorXd xr = z.head(n_);
      const VectorXd theta = eval_theta(plant_.theta, ts).theta;
      const double v = cfg_.k_g * eval_reference_signal(r_, ts) + theta.dot(xr);
      const double u = control_with(ts, z, xr, theta);
      VectorXd dz(n_ + nf_);
      dz.head(n_) = plant_.A * xr + plant_.b * (u - theta.dot(xr));
      if (nf_ > 0)
        dz.tail(nf_) = cfg_.filter.A() * z.tail(nf_) + cfg_.filter.B().col(0) * v;
      return dz;
    };
    state_ = rk4_step(f, state_, dt);
    guard(state_, t + dt, "reference system");
  }

  const VectorXd& state() const { return state_; }

 private:
  double control_with(double t, const VectorXd& z, const VectorXd& xr,
                      const VectorXd& theta) const {
    const double v = cfg_.k_g * eval_reference_signal(r_, t) + theta.dot(xr);
    double u2 = cfg_.filter.D()(0, 0) * v;
    if (nf_ > 0) u2 += cfg_.filter.C().row(0).dot(z.tail(nf_));
    return -cfg_.K.dot(xr) + u2;
  }

  const PlantModel& plant_;
  const L1Config& cfg_;
  ReferenceSignal r_;
  int n_, nf_;
  VectorXd state_;
};

// LTI system driven from rest by a reference signal.
class LtiStepper {
 public:
  LtiStepper(LtiSystem sys, const ReferenceSignal& r)
      : sys_(std::move(sys)), r_(r), state_(VectorXd::Zero(sys_.states())) {}

  VectorXd output(double t) const {
    return sys_.C() * state_ + sys_.D().col(0) * eval_reference_signal(r_, t);
  }

  void step(double t, double dt) {
    if (sys_.states() == 0) return;
    auto f = [&](double c, const VectorXd& z) {
      return VectorXd(sys_.A() * z + sys_.B().col(0) * eval_reference_signal(r_, t + c * dt));
    };
    state_ = rk4_step(f, state_, dt);
    guard(state_, t + dt, "LTI response");
  }

 private:
  LtiSystem sys_;
  ReferenceSignal r_;
  VectorXd state_;
};

}  // namespace

double ReferenceSignal::sup_norm() const { return std::abs(amplitude); }

double eval_reference_signal(const ReferenceSignal& spec, double t) {
  switch (spec.kind) {
    case ReferenceSignal::Kind::kStep:
      return t >= 0.0 ? spec.amplitude : 0.0;
    case ReferenceSignal::Kind::kHarmonic:
      return spec.amplitude * std::cos(spec.frequency * t);
  }
  return 0.0;
}

ThetaSample eval_theta(const ThetaTrajectory& traj, double t) {
  ThetaSample s{traj.offset, VectorXd::Zero(traj.offset.size())};
  for (std::size_t i = 0; i < traj.terms.size(); ++i) {
    const auto idx = static_cast<Eigen::Index>(i);
    for (const auto& term : traj.terms[i]) {
      s.theta(idx) += term.amplitude * std::cos(term.frequency * t);
      s.rate(idx) -= term.amplitude * term.frequency * std::sin(term.frequency * t);
    }
  }
  return s;
}

double theta_rate_bound(const ThetaTrajectory& traj) {
  double sum_sq = 0.0;
  for (const auto& component : traj.terms) {
    double s = 0.0;
    for (const auto& term : component) s += std::abs(term.amplitude * term.frequency);
    sum_sq += s * s;
  }
  return std::sqrt(sum_sq);
}

DelayLine::DelayLine(double delay, double dt) : requested_(delay), dt_(dt) {
  require(delay >= 0.0 && std::isfinite(delay), ErrorKind::kInvalidArgument,
          "delay: must be nonnegative");
  require(dt > 0.0, ErrorKind::kInvalidArgument, "delay: dt must be positive");
  steps_ = static_cast<int>(std::lround(delay / dt));
  ring_.assign(static_cast<std::size_t>(steps_) + 2, 0.0);
}

void DelayLine::push(double value) {
  ring_[static_cast<std::size_t>(pushed_ % static_cast<long>(ring_.size()))] = value;
  ++pushed_;
}

double DelayLine::sample(long index) const {
  if (index < 0) return 0.0;
  return ring_[static_cast<std::size_t>(index % static_cast<long>(ring_.size()))];
}

double DelayLine::delayed(double frac) const {
  const long k = pushed_ - 1;
  const double lo = sample(k - steps_);
  if (frac == 0.0) return lo;
  const double hi = sample(k - steps_ + 1);
  return (1.0 - frac) * lo + frac * hi;
}

double delay_line(const std::vector<double>& history, double dt, double tau, double t) {
  require(dt > 0.0 && tau >= 0.0, ErrorKind::kInvalidArgument,
          "delay_line: dt must be positive and tau nonnegative");
  const double shifted = t - tau;
  if (shifted < -1e-12 * std::max(1.0, t) || history.empty()) return 0.0;
  const double pos = std::max(0.0, shifted) / dt;
  auto k = static_cast<std::size_t>(std::floor(pos + 1e-9));
  if (k + 1 >= history.size()) return history.back();
  const double frac = std::clamp(pos - static_cast<double>(k), 0.0, 1.0);
  if (frac < 1e-9) return history[k];
  return (1.0 - frac) * history[k] + frac * history[k + 1];
}

LtiSystem design_output_system(const PlantModel& plant, const L1Config& cfg) {
  const LtiSystem cHo = series(LtiSystem::gain(MatrixXd(plant.c.transpose())), cfg.H_o);
  return scale(series(cHo, cfg.filter), cfg.k_g);
}

LtiSystem design_control_system(const L1Config& cfg, const VectorXd& theta) {
  const LtiSystem theta_Ho = series(LtiSystem::gain(MatrixXd(theta.transpose())), cfg.H_o);
  const LtiSystem K_Ho = series(LtiSystem::gain(MatrixXd(cfg.K.transpose())), cfg.H_o);
  const LtiSystem inner =
      subtract(add(LtiSystem::gain(1.0), series(cfg.filter, theta_Ho)), K_Ho);
  return scale(series(cfg.filter, inner), cfg.k_g);
}

double default_step(const PlantModel& plant, const L1Config& cfg, const SimScenario& scenario) {
  const auto n = plant.order();
  const double theta_max = theta_max_of(plant.omega_box);
  const LtiSystem G = scale(series(cfg.H_o, cfg.filter), cfg.k_g);
  double lambda = 0.0;
  if (!cfg.is_mrac())
    lambda = theta_max * l1_gain(series(cfg.H_o, subtract(cfg.filter, LtiSystem::gain(1.0))));
  const double amplification = lambda < 1.0 ? 1.0 / (1.0 - lambda) : 10.0;
  const double x0_norm = scenario.x0.size() == n ? scenario.x0.cwiseAbs().maxCoeff() : 0.0;
  const double x_scale = std::sqrt(static_cast<double>(n)) *
                         (l1_gain(G) * scenario.reference.sup_norm() * amplification + x0_norm);

  double dt = 1e-3;
  for (const auto& p : cfg.filter.A().eigenvalues()) dt = std::min(dt, 0.05 / std::abs(p));
  double plant_speed = plant.b.norm() * theta_max;
  for (const auto& p : cfg.A_m.eigenvalues()) plant_speed = std::max(plant_speed, std::abs(p));
  if (plant_speed > 0.0) dt = std::min(dt, 0.1 / plant_speed);
  const double adaptation_speed = x_scale * std::sqrt(cfg.gamma_c * plant.b.dot(cfg.P * plant.b));
  if (adaptation_speed > 0.0) dt = std::min(dt, 0.5 / adaptation_speed);
  return dt;
}

SimTrace simulate_closed_loop(const PlantModel& plant, const L1Config& cfg,
                              const SimScenario& scenario) {
  validate_plant(plant);
  const int n = plant.order();
  require(cfg.A_m.rows() == n && cfg.K.size() == n, ErrorKind::kDimensionMismatch,
          "simulate: controller and plant sizes differ");
  const VectorXd x0 = scenario.x0.size() == 0 ? VectorXd::Zero(n) : scenario.x0;
  require(x0.size() == n, ErrorKind::kDimensionMismatch, "simulate: x0 has the wrong size");

  const auto [dt, steps] = resolve_grid(
      scenario.horizon, scenario.dt,
      scenario.dt > 0.0 ? scenario.dt : default_step(plant, cfg, scenario));
  const long stride = record_stride(scenario.record_interval, dt);
  const bool constant_theta = plant.theta.is_constant();

  DelayLine delay(scenario.input_delay, dt);
  const bool delayed = delay.delay_steps() > 0;

  const int nf = cfg.filter.states();
  ControllerState init = initial_controller_state(cfg, x0, scenario.theta_hat0);
  VectorXd z(3 * n + nf);
  z << x0, init.x_hat, init.theta_hat, init.filter_state;

  std::optional<ReferenceStepper> reference;
  if (scenario.with_reference) reference.emplace(plant, cfg, scenario.reference, x0);
  std::optional<LtiStepper> y_design, u_design;
  const bool with_design = scenario.with_design && constant_theta;
  if (with_design) {
    y_design.emplace(design_output_system(plant, cfg), scenario.reference);
    u_design.emplace(design_control_system(cfg, plant.theta.offset), scenario.reference);
  }

  auto unpack = [&](const VectorXd& s) {
    ControllerState st;
    st.x_hat = s.segment(n, n);
    st.theta_hat = s.segment(2 * n, n);
    st.filter_state = s.tail(nf);
    return st;
  };

  SimTrace trace;
  trace.dt = dt;
  trace.steps = steps;
  trace.requested_delay = delay.requested_delay();
  trace.applied_delay = delay.applied_delay();
  trace.has_reference = reference.has_value();
  trace.has_design = with_design;
  trace.has_lyapunov = constant_theta;
  SimMonitors& mon = trace.monitors;
  double previous_V = 0.0;

  for (long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double r = eval_reference_signal(scenario.reference, t);
    const VectorXd x = z.head(n);
    const ControllerState st = unpack(z);
    const ControlOutput ctl = control_and_derivatives(cfg, st, x, r);
    delay.push(ctl.u);
    const double y = plant.c.dot(x);
    const VectorXd x_tilde = st.x_hat - x;

    mon.sup_prediction_error = std::max(mon.sup_prediction_error, x_tilde.norm());
    mon.sup_tracking_error = std::max(mon.sup_tracking_error, std::abs(y - r));
    if (t >= scenario.settle_time - 1e-12)
      mon.sup_tracking_error_settled = std::max(mon.sup_tracking_error_settled, std::abs(y - r));
    mon.sup_state = std::max(mon.sup_state, x.cwiseAbs().maxCoeff());
    mon.sup_control = std::max(mon.sup_control, std::abs(ctl.u));
    if (!cfg.omega_box.contains(st.theta_hat, 1e-12)) mon.theta_hat_in_box = false;

    double V = 0.0;
    if (constant_theta) {
      const VectorXd theta_err = st.theta_hat - plant.theta.offset;
      V = x_tilde.dot(cfg.P * x_tilde) + theta_err.squaredNorm() / cfg.gamma_c;
      if (k == 0) {
        mon.lyapunov_initial = V;
        mon.max_lyapunov_increase = -std::numeric_limits<double>::infinity();
      } else {
        mon.max_lyapunov_increase = std::max(mon.max_lyapunov_increase, V - previous_V);
      }
      previous_V = V;
    }

    VectorXd x_ref;
    double u_ref = 0.0, y_ref = 0.0;
    if (reference) {
      x_ref = reference->x();
      u_ref = reference->control(t, reference->state());
      y_ref = plant.c.dot(x_ref);
      mon.sup_state_error = std::max(mon.sup_state_error, (x - x_ref).cwiseAbs().maxCoeff());
      mon.sup_control_error = std::max(mon.sup_control_error, std::abs(ctl.u - u_ref));
      mon.sup_output_error = std::max(mon.sup_output_error, std::abs(y - y_ref));
    }
    double y_des = 0.0, u_des = 0.0;
    if (with_design) {
      y_des = y_design->output(t)(0);
      u_des = u_design->output(t)(0);
      if (reference) {
        mon.sup_output_design_error = std::max(mon.sup_output_design_error, std::abs(y_ref - y_des));
        mon.sup_control_design_error = std::max(mon.sup_control_design_error, std::abs(u_ref - u_des));
      }
    }

    if (k % stride == 0 || k == steps) {
      trace.t.push_back(t);
      trace.r.push_back(r);
      trace.x.push_back(x);
      trace.x_hat.push_back(st.x_hat);
      trace.theta_hat.push_back(st.theta_hat);
      trace.u.push_back(ctl.u);
      trace.y.push_back(y);
      if (reference) {
        trace.x_ref.push_back(x_ref);
        trace.u_ref.push_back(u_ref);
        trace.y_ref.push_back(y_ref);
      }
      if (with_design) {
        trace.y_des.push_back(y_des);
        trace.u_des.push_back(u_des);
      }
      if (constant_theta) trace.V.push_back(V);
    }
    if (k == steps) {
      mon.final_prediction_error = x_tilde.norm();
      break;
    }

    auto f = [&](double c, const VectorXd& s) {
      const double ts = t + c * dt;
      const VectorXd xs = s.head(n);
      const ControllerState ss = unpack(s);
      const ControlOutput out =
          control_and_derivatives(cfg, ss, xs, eval_reference_signal(scenario.reference, ts));
      const VectorXd theta = constant_theta ? plant.theta.offset : eval_theta(plant.theta, ts).theta;
      const double applied = delayed ? delay.delayed(c) : out.u;
      VectorXd ds(3 * n + nf);
      ds.head(n) = plant.A * xs + plant.b * (applied - theta.dot(xs));
      ds.segment(n, n) = out.dx_hat;
      ds.segment(2 * n, n) = adaptation_rate(cfg, xs, ss.x_hat - xs);
      if (nf > 0) ds.tail(nf) = out.dfilter_state;
      return ds;
    };
    z = rk4_step(f, z, dt);
    z.segment(2 * n, n) = cfg.omega_box.clamp(z.segment(2 * n, n));
    guard(z, t + dt, "closed loop");
    if (reference) reference->step(t, dt);
    if (with_design) {
      y_design->step(t, dt);
      u_design->step(t, dt);
    }
  }
  if (!constant_theta) mon.max_lyapunov_increase = 0.0;
  return trace;
}

SimTrace simulate_highgain(const PlantModel& plant, const HighGainConfig& cfg,
                           const SimScenario& scenario) {
  validate_plant(plant);
  require(plant.order() == 1, ErrorKind::kInvalidArgument,
          "simulate_highgain: scalar plant required");
  const double a = plant.A(0, 0), b = plant.b(0);
  const double theta_max = theta_max_of(plant.omega_box);
  const double speed = std::abs(a) + std::abs(b) * (theta_max + std::abs(cfg.k));
  const auto [dt, steps] = resolve_grid(scenario.horizon, scenario.dt,
                                        std::min(1e-3, speed > 0 ? 0.02 / speed : 1e-3));
  const long stride = record_stride(scenario.record_interval, dt);
  DelayLine delay(scenario.input_delay, dt);
  const bool delayed = delay.delay_steps() > 0;
  VectorXd x = scenario.x0.size() == 0 ? VectorXd::Zero(1) : scenario.x0;
  require(x.size() == 1, ErrorKind::kDimensionMismatch, "simulate_highgain: x0 must be scalar");

  SimTrace trace;
  trace.dt = dt;
  trace.steps = steps;
  trace.requested_delay = delay.requested_delay();
  trace.applied_delay = delay.applied_delay();
  auto control = [&](double t, double xv) {
    return -cfg.k * xv + cfg.k * eval_reference_signal(scenario.reference, t);
  };
  for (long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double r = eval_reference_signal(scenario.reference, t);
    const double u = control(t, x(0));
    delay.push(u);
    const double y = plant.c(0) * x(0);
    auto& mon = trace.monitors;
    mon.sup_tracking_error = std::max(mon.sup_tracking_error, std::abs(y - r));
    if (t >= scenario.settle_time - 1e-12)
      mon.sup_tracking_error_settled = std::max(mon.sup_tracking_error_settled, std::abs(y - r));
    mon.sup_state = std::max(mon.sup_state, std::abs(x(0)));
    mon.sup_control = std::max(mon.sup_control, std::abs(u));
    if (k % stride == 0 || k == steps) {
      trace.t.push_back(t);
      trace.r.push_back(r);
      trace.x.push_back(x);
      trace.u.push_back(u);
      trace.y.push_back(y);
    }
    if (k == steps) break;
    auto f = [&](double c, const VectorXd& s) {
      const double ts = t + c * dt;
      const double theta = eval_theta(plant.theta, ts).theta(0);
      const double applied = delayed ? delay.delayed(c) : control(ts, s(0));
      VectorXd ds(1);
      ds(0) = a * s(0) + b * (applied - theta * s(0));
      return ds;
    };
    x = rk4_step(f, x, dt);
    guard(x, t + dt, "high-gain closed loop");
  }
  return trace;
}

ReferenceResponse simulate_reference(const PlantModel& plant, const L1Config& cfg,
                                     const SimScenario& scenario) {
  validate_plant(plant);
  const int n = plant.order();
  const VectorXd x0 = scenario.x0.size() == 0 ? VectorXd::Zero(n) : scenario.x0;
  require(x0.size() == n, ErrorKind::kDimensionMismatch, "simulate: x0 has the wrong size");
  const auto [dt, steps] = resolve_grid(
      scenario.horizon, scenario.dt,
      scenario.dt > 0.0 ? scenario.dt : default_step(plant, cfg, scenario));
  const long stride = record_stride(scenario.record_interval, dt);
  ReferenceStepper stepper(plant, cfg, scenario.reference, x0);
  ReferenceResponse out;
  for (long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (k % stride == 0 || k == steps) {
      out.t.push_back(t);
      out.x_ref.push_back(stepper.x());
      out.u_ref.push_back(stepper.control(t, stepper.state()));
      out.y_ref.push_back(plant.c.dot(stepper.x()));
    }
    if (k < steps) stepper.step(t, dt);
  }
  return out;
}

DesignResponse simulate_des(const PlantModel& plant, const L1Config& cfg,
                            const SimScenario& scenario) {
  validate_plant(plant);
  require(plant.theta.is_constant(), ErrorKind::kUnsupported,
          "simulate_des: design signals are defined for constant theta only");
  const auto [dt, steps] = resolve_grid(
      scenario.horizon, scenario.dt,
      scenario.dt > 0.0 ? scenario.dt : default_step(plant, cfg, scenario));
  const long stride = record_stride(scenario.record_interval, dt);
  LtiStepper ys(design_output_system(plant, cfg), scenario.reference);
  LtiStepper us(design_control_system(cfg, plant.theta.offset), scenario.reference);
  DesignResponse out;
  for (long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (k % stride == 0 || k == steps) {
      out.t.push_back(t);
      out.y_des.push_back(ys.output(t)(0));
      out.u_des.push_back(us.output(t)(0));
    }
    if (k < steps) {
      ys.step(t, dt);
      us.step(t, dt);
    }
  }
  return out;
}

LtiResponse simulate_lti(const LtiSystem& sys, const ReferenceSignal& input, double horizon,
                         double dt, long record_stride_steps) {
  require(sys.inputs() == 1, ErrorKind::kDimensionMismatch,
          "simulate_lti: single-input system required");
  const long steps = step_count(horizon, dt);
  const long stride = std::max(1L, record_stride_steps);
  LtiStepper stepper(sys, input);
  LtiResponse out;
  for (long k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    if (k % stride == 0 || k == steps) {
      out.t.push_back(t);
      out.y.push_back(stepper.output(t));
    }
    if (k < steps) stepper.step(t, dt);
  }
  return out;
}

}  // namespace l1adapt
