#include "l1adapt/controllers.hpp"

#include <cmath>
#include <string>

#include "l1adapt/error.hpp"
#include "l1adapt/linear_algebra.hpp"

namespace l1adapt {

using Eigen::MatrixXd;
using Eigen::VectorXd;

bool ParamBox::contains(const VectorXd& theta, double tol) const {
  if (theta.size() != lo.size()) return false;
  for (Eigen::Index i = 0; i < theta.size(); ++i)
    if (theta(i) < lo(i) - tol || theta(i) > hi(i) + tol) return false;
  return true;
}

VectorXd ParamBox::clamp(const VectorXd& theta) const {
  return theta.cwiseMax(lo).cwiseMin(hi);
}

ThetaTrajectory ThetaTrajectory::constant(VectorXd value) {
  ThetaTrajectory traj;
  traj.terms.resize(static_cast<std::size_t>(value.size()));
  traj.offset = std::move(value);
  return traj;
}

bool ThetaTrajectory::is_constant() const {
  for (const auto& component : terms)
    for (const auto& term : component)
      if (term.amplitude != 0.0 && term.frequency != 0.0) return false;
  return true;
}

ParamBox ThetaTrajectory::envelope() const {
  VectorXd spread = VectorXd::Zero(offset.size());
  VectorXd shift = VectorXd::Zero(offset.size());
  for (std::size_t i = 0; i < terms.size(); ++i)
    for (const auto& term : terms[i]) {
      // A zero-frequency term is a constant shift.
      if (term.frequency == 0.0)
        shift(static_cast<Eigen::Index>(i)) += term.amplitude;
      else
        spread(static_cast<Eigen::Index>(i)) += std::abs(term.amplitude);
    }
  return {offset + shift - spread, offset + shift + spread};
}

void validate_plant(const PlantModel& plant) {
  const auto n = plant.A.rows();
  require(n >= 1 && plant.A.cols() == n, ErrorKind::kDimensionMismatch,
          "plant: A must be a nonempty square matrix");
  require(plant.b.size() == n && plant.c.size() == n, ErrorKind::kDimensionMismatch,
          "plant: b and c must have one entry per state");
  require(plant.omega_box.lo.size() == n && plant.omega_box.hi.size() == n,
          ErrorKind::kDimensionMismatch, "plant: parameter box must have one interval per state");
  for (Eigen::Index i = 0; i < n; ++i)
    require(plant.omega_box.lo(i) <= plant.omega_box.hi(i), ErrorKind::kInvalidArgument,
            "plant: parameter box has lo > hi in component " + std::to_string(i + 1));
  require(plant.theta.offset.size() == n &&
              plant.theta.terms.size() == static_cast<std::size_t>(n),
          ErrorKind::kDimensionMismatch, "plant: theta must have one component per state");
  require(faddeev_numerators(plant.A, plant.b).is_full_rank(), ErrorKind::kUncontrollable,
          "plant: (A, b) is not controllable");
  const ParamBox range = plant.theta.envelope();
  require(plant.omega_box.contains(range.lo, 1e-12) && plant.omega_box.contains(range.hi, 1e-12),
          ErrorKind::kInvalidArgument, "plant: theta trajectory leaves the parameter box");
}

FilterSpec FilterSpec::first_order(double omega) {
  FilterSpec f;
  f.kind = Kind::kFirstOrder;
  f.omega = omega;
  return f;
}

FilterSpec FilterSpec::third_order(double omega) {
  FilterSpec f;
  f.kind = Kind::kThirdOrder;
  f.omega = omega;
  return f;
}

FilterSpec FilterSpec::explicit_tf(Polynomial num, Polynomial den) {
  FilterSpec f;
  f.kind = Kind::kExplicit;
  f.num = std::move(num);
  f.den = std::move(den);
  return f;
}

FilterSpec FilterSpec::identity() {
  FilterSpec f;
  f.kind = Kind::kIdentity;
  return f;
}

LtiSystem make_filter(const FilterSpec& spec) {
  switch (spec.kind) {
    case FilterSpec::Kind::kFirstOrder: {
      require(spec.omega > 0.0 && std::isfinite(spec.omega), ErrorKind::kInvalidArgument,
              "filter: omega must be positive");
      MatrixXd A(1, 1), B(1, 1), C(1, 1), D(1, 1);
      A << -spec.omega;
      B << spec.omega;
      C << 1.0;
      D << 0.0;
      return LtiSystem(A, B, C, D);
    }
    case FilterSpec::Kind::kThirdOrder: {
      require(spec.omega > 0.0 && std::isfinite(spec.omega), ErrorKind::kInvalidArgument,
              "filter: omega must be positive");
      const double w = spec.omega;
      return LtiSystem::from_tf(Polynomial{w * w * w, 3.0 * w * w}, Polynomial{w, 1.0}.pow(3));
    }
    case FilterSpec::Kind::kExplicit:
      return LtiSystem::from_tf(spec.num, spec.den);
    case FilterSpec::Kind::kIdentity:
      return LtiSystem::gain(1.0);
  }
  fail(ErrorKind::kInvalidArgument, "filter: unknown kind");
}

TransferFunction filter_transfer_function(const FilterSpec& spec) {
  const double w = spec.omega;
  switch (spec.kind) {
    case FilterSpec::Kind::kFirstOrder:
      return {Polynomial{w}, Polynomial{w, 1.0}};
    case FilterSpec::Kind::kThirdOrder:
      return {Polynomial{w * w * w, 3.0 * w * w}, Polynomial{w, 1.0}.pow(3)};
    case FilterSpec::Kind::kExplicit:
      return {spec.num, spec.den};
    case FilterSpec::Kind::kIdentity:
      return {Polynomial{1.0}, Polynomial{1.0}};
  }
  fail(ErrorKind::kInvalidArgument, "filter: unknown kind");
}

namespace {

L1Config assemble(const PlantModel& plant, const VectorXd& K, const FilterSpec& filter_spec,
                  double gamma_c, const MatrixXd& Q, Architecture architecture) {
  validate_plant(plant);
  const auto n = plant.A.rows();
  require(K.size() == n, ErrorKind::kDimensionMismatch, "controller: K must have n entries");
  require(gamma_c > 0.0 && std::isfinite(gamma_c), ErrorKind::kInvalidArgument,
          "controller: adaptation gain must be positive");
  require(Q.rows() == n && Q.cols() == n, ErrorKind::kDimensionMismatch,
          "controller: Q must be n x n");

  L1Config cfg;
  cfg.architecture = architecture;
  cfg.K = K;
  cfg.filter_spec = filter_spec;
  cfg.filter = make_filter(filter_spec);
  if (architecture == Architecture::kL1) {
    const LtiSystem& f = cfg.filter;
    require(f.is_siso(), ErrorKind::kInvalidArgument, "filter: must be SISO");
    require(f.is_strictly_proper() && f.states() > 0, ErrorKind::kInvalidArgument,
            "filter: must be strictly proper");
    require(f.is_stable(), ErrorKind::kUnstable, "filter: must be stable");
    const double dc = dc_gain(f)(0, 0);
    require(std::abs(dc - 1.0) <= 1e-9, ErrorKind::kInvalidArgument,
            "filter: DC gain must be 1 (got " + std::to_string(dc) + ")");
  }
  cfg.gamma_c = gamma_c;
  cfg.A_m = plant.A - plant.b * K.transpose();
  require(is_hurwitz(cfg.A_m), ErrorKind::kUnstable, "controller: A - b K^T is not Hurwitz");
  cfg.Q = Q;
  cfg.P = solve_lyapunov(cfg.A_m, Q);
  cfg.b = plant.b;
  cfg.k_g = compute_kg(cfg.A_m, plant.b, plant.c);
  cfg.H_o = LtiSystem(cfg.A_m, plant.b, MatrixXd::Identity(n, n), MatrixXd::Zero(n, 1));
  cfg.omega_box = plant.omega_box;
  return cfg;
}

}  // namespace

L1Config build_l1(const PlantModel& plant, const VectorXd& K, const FilterSpec& filter,
                  double gamma_c, const MatrixXd& Q) {
  require(filter.kind != FilterSpec::Kind::kIdentity, ErrorKind::kInvalidArgument,
          "build_l1: identity filter requested; use build_mrac");
  return assemble(plant, K, filter, gamma_c, Q, Architecture::kL1);
}

L1Config build_mrac(const PlantModel& plant, const VectorXd& K, double gamma_c,
                    const MatrixXd& Q) {
  return assemble(plant, K, FilterSpec::identity(), gamma_c, Q, Architecture::kMrac);
}

ControllerState initial_controller_state(const L1Config& cfg, const VectorXd& x0,
                                         const std::optional<VectorXd>& theta_hat0) {
  require(x0.size() == cfg.A_m.rows(), ErrorKind::kDimensionMismatch,
          "initial state: x0 has the wrong size");
  ControllerState state;
  state.x_hat = x0;
  state.theta_hat = theta_hat0 ? *theta_hat0 : cfg.omega_box.center();
  require(cfg.omega_box.contains(state.theta_hat), ErrorKind::kInvalidArgument,
          "initial state: theta_hat(0) is outside the parameter box");
  state.filter_state = VectorXd::Zero(cfg.filter.states());
  return state;
}

ControlOutput control_and_derivatives(const L1Config& cfg, const ControllerState& state,
                                      const VectorXd& x, double r) {
  const double filter_input = state.theta_hat.dot(x) + cfg.k_g * r;
  const LtiSystem& f = cfg.filter;
  ControlOutput out;
  out.u2 = f.D()(0, 0) * filter_input;
  if (f.states() > 0) {
    out.u2 += f.C().row(0).dot(state.filter_state);
    out.dfilter_state = f.A() * state.filter_state + f.B().col(0) * filter_input;
  } else {
    out.dfilter_state = VectorXd::Zero(0);
  }
  out.u = -cfg.K.dot(x) + out.u2;
  out.dx_hat = cfg.A_m * state.x_hat + cfg.b * (out.u2 - state.theta_hat.dot(x));
  return out;
}

VectorXd adaptation_rate(const L1Config& cfg, const VectorXd& x, const VectorXd& x_tilde) {
  const double drive = x_tilde.dot(cfg.P * cfg.b);
  return cfg.gamma_c * drive * x;
}

VectorXd adaptation_step(const L1Config& cfg, const VectorXd& theta_hat, const VectorXd& x,
                         const VectorXd& x_tilde, double dt) {
  return cfg.omega_box.clamp(theta_hat + dt * adaptation_rate(cfg, x, x_tilde));
}

HighGainConfig build_highgain(const PlantModel& plant, double k) {
  validate_plant(plant);
  require(plant.order() == 1, ErrorKind::kInvalidArgument,
          "build_highgain: the static high-gain controller needs a scalar plant");
  HighGainConfig cfg{k};
  for (double theta : {plant.omega_box.lo(0), plant.omega_box.hi(0)})
    require(highgain_closed_loop_pole(plant, cfg, theta) < -kStabilityMargin,
            ErrorKind::kUnstable,
            "build_highgain: gain k = " + std::to_string(k) +
                " does not stabilize the plant for theta = " + std::to_string(theta));
  return cfg;
}

double highgain_closed_loop_pole(const PlantModel& plant, const HighGainConfig& cfg,
                                 double theta) {
  return plant.A(0, 0) - plant.b(0) * (theta + cfg.k);
}

}  // namespace l1adapt
