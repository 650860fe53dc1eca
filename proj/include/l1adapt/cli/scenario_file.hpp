#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "l1adapt/controllers.hpp"
#include "l1adapt/sim_engine.hpp"

namespace l1adapt::cli {

enum class ControllerKind { kL1, kMrac, kHighGain };

struct ControllerSpec {
  ControllerKind kind = ControllerKind::kL1;
  Eigen::VectorXd K;
  FilterSpec filter;
  double gamma_c = 0.0;
  Eigen::MatrixXd Q;
  double highgain_k = 0.0;
};

struct OutputSpec {
  std::string directory = ".";
  std::string prefix = "trace";
  /// Column groups to write; empty means the default trace schema.
  std::vector<std::string> series;
};

struct ScenarioFile {
  std::string name;
  PlantModel plant;
  ControllerSpec controller;
  SimScenario scenario;
  OutputSpec outputs;
};

/// Recognized column groups for [outputs].series.
const std::vector<std::string>& known_series();

/// Parses and validates a scenario; errors are Error(kParse) prefixed with
/// "<source>:<line>:".
ScenarioFile parse_scenario(const std::string& text, const std::string& source_name);
ScenarioFile load_scenario(const std::string& path);

/// Serializes back to the scenario format (round-trips through parse_scenario).
std::string to_toml(const ScenarioFile& file);

/// Adaptive controller of an l1 or mrac scenario.
L1Config build_controller(const ScenarioFile& file);

}  // namespace l1adapt::cli
