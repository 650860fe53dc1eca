#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "l1adapt/lti_system.hpp"

namespace l1adapt {

/// Axis-aligned box of admissible parameter values.
struct ParamBox {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  int size() const { return static_cast<int>(lo.size()); }
  Eigen::VectorXd center() const { return 0.5 * (lo + hi); }
  bool contains(const Eigen::VectorXd& theta, double tol = 0.0) const;
  Eigen::VectorXd clamp(const Eigen::VectorXd& theta) const;
};

struct HarmonicTerm {
  double amplitude = 0.0;
  double frequency = 0.0;  // rad/s
};

/// theta_i(t) = offset_i + sum_k a_ik cos(w_ik t).
struct ThetaTrajectory {
  Eigen::VectorXd offset;
  std::vector<std::vector<HarmonicTerm>> terms;  // one list per component, may be empty

  static ThetaTrajectory constant(Eigen::VectorXd value);
  bool is_constant() const;
  /// Componentwise range [offset - sum|a|, offset + sum|a|] (tight for one term).
  ParamBox envelope() const;
};

/// dx = A x + b (u - theta(t)^T x), y = c^T x.
struct PlantModel {
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  Eigen::VectorXd c;
  ParamBox omega_box;
  ThetaTrajectory theta;

  int order() const { return static_cast<int>(A.rows()); }
};

/// Throws on inconsistent sizes, an uncontrollable (A, b) pair, or a
/// trajectory leaving the box.
void validate_plant(const PlantModel& plant);

struct FilterSpec {
  enum class Kind { kFirstOrder, kThirdOrder, kExplicit, kIdentity };
  Kind kind = Kind::kFirstOrder;
  double omega = 0.0;
  Polynomial num;  // explicit only
  Polynomial den;

  static FilterSpec first_order(double omega);
  static FilterSpec third_order(double omega);
  static FilterSpec explicit_tf(Polynomial num, Polynomial den);
  static FilterSpec identity();
};

/// Realization of the filter. First order uses dz = -w z + w v, u2 = z;
/// the others use controllable canonical form. Identity gives a static unit gain.
LtiSystem make_filter(const FilterSpec& spec);

/// Filter as numerator / denominator polynomials.
struct TransferFunction {
  Polynomial num;
  Polynomial den;
};
TransferFunction filter_transfer_function(const FilterSpec& spec);

enum class Architecture { kL1, kMrac };

struct L1Config {
  Architecture architecture = Architecture::kL1;
  Eigen::VectorXd K;
  FilterSpec filter_spec;
  LtiSystem filter = LtiSystem::gain(1.0);
  double gamma_c = 0.0;
  Eigen::MatrixXd Q;
  Eigen::MatrixXd P;
  Eigen::MatrixXd A_m;
  Eigen::VectorXd b;
  double k_g = 0.0;
  LtiSystem H_o = LtiSystem::gain(1.0);
  ParamBox omega_box;

  bool is_mrac() const { return architecture == Architecture::kMrac; }
};

L1Config build_l1(const PlantModel& plant, const Eigen::VectorXd& K, const FilterSpec& filter,
                  double gamma_c, const Eigen::MatrixXd& Q);

/// L1 pipeline with C(s) = 1.
L1Config build_mrac(const PlantModel& plant, const Eigen::VectorXd& K, double gamma_c,
                    const Eigen::MatrixXd& Q);

struct ControllerState {
  Eigen::VectorXd x_hat;
  Eigen::VectorXd theta_hat;
  Eigen::VectorXd filter_state;
};

/// x_hat(0) = x0; theta_hat(0) defaults to the box center; filter at rest.
ControllerState initial_controller_state(const L1Config& cfg, const Eigen::VectorXd& x0,
                                         const std::optional<Eigen::VectorXd>& theta_hat0 = {});

struct ControlOutput {
  double u = 0.0;   // -K^T x + u2
  double u2 = 0.0;  // filtered adaptive component
  Eigen::VectorXd dx_hat;
  Eigen::VectorXd dfilter_state;
};

ControlOutput control_and_derivatives(const L1Config& cfg, const ControllerState& state,
                                      const Eigen::VectorXd& x, double r);

/// Unprojected adaptation rate Gamma_c x (x_tilde^T P b).
Eigen::VectorXd adaptation_rate(const L1Config& cfg, const Eigen::VectorXd& x,
                                const Eigen::VectorXd& x_tilde);

/// Euler step of the adaptation law followed by clamping to the box.
Eigen::VectorXd adaptation_step(const L1Config& cfg, const Eigen::VectorXd& theta_hat,
                                const Eigen::VectorXd& x, const Eigen::VectorXd& x_tilde,
                                double dt);

/// Static scalar controller u = -k x + k r.
struct HighGainConfig {
  double k = 0.0;
};

/// Requires a scalar plant and a closed loop A - b(theta + k) < 0 for every theta in the box.
HighGainConfig build_highgain(const PlantModel& plant, double k);

/// Closed-loop pole A - b(theta + k) of the high-gain loop.
double highgain_closed_loop_pole(const PlantModel& plant, const HighGainConfig& cfg, double theta);

}  // namespace l1adapt
