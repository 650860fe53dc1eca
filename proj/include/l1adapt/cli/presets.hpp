#pragma once

#include <string>
#include <vector>

#include "l1adapt/cli/scenario_file.hpp"

namespace l1adapt::cli {

/// Second-order benchmark plant: A = [[0, 1], [-1, -1.4]], b = [0, 1], c = [1, 0],
/// box [-10, 10]^2, theta = [4, -4.5].
PlantModel benchmark_plant();

/// theta(t) = [2 + 2 cos(0.5 t), 2 + 0.3 cos(0.5 t) + 0.2 cos(t/pi)].
ThetaTrajectory benchmark_varying_theta();

/// Gamma_c = 10000 with C(s) = 160/(s + 160).
ControllerSpec first_order_controller();
/// Gamma_c = 400 with C(s) = (3*50^2 s + 50^3)/(s + 50)^3.
ControllerSpec third_order_controller();

enum class PresetKind { kSimulation, kLambdaSweep, kMargin };

struct Preset {
  std::string id;
  std::string title;
  PresetKind kind = PresetKind::kSimulation;
  std::vector<ScenarioFile> runs;      // simulation presets
  FilterSpec::Kind family = FilterSpec::Kind::kFirstOrder;  // lambda sweeps
  std::vector<double> omega_grid;
  std::vector<double> gamma_grid;      // margin
};

const std::vector<std::string>& preset_ids();

/// Throws Error(kInvalidArgument) for an unknown id.
Preset make_preset(const std::string& id);

/// Evenly spaced grid including both ends.
std::vector<double> linear_grid(double lo, double hi, int points);
/// Logarithmically spaced grid including both ends.
std::vector<double> log_grid(double lo, double hi, int points);

/// Largest pointwise deviation from proportional scaling over t >= t_from:
/// max |y_k(t) r_0 / r_k - y_0(t)| / |y_0(t)|, with y_k interpolated onto the
/// first trace's samples.
double scaling_deviation(const std::vector<const SimTrace*>& traces,
                         const std::vector<double>& amplitudes, double t_from);

}  // namespace l1adapt::cli
