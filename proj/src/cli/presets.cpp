#include "l1adapt/cli/presets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "l1adapt/error.hpp"

namespace l1adapt::cli {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kStepHorizon = 10.0;
constexpr double kHarmonicHorizon = 50.0;

ScenarioFile base_run(const std::string& name, const ControllerSpec& controller,
                      ReferenceSignal reference, double horizon) {
  ScenarioFile file;
  file.name = name;
  file.plant = benchmark_plant();
  file.controller = controller;
  file.scenario.horizon = horizon;
  file.scenario.reference = reference;
  file.scenario.x0 = VectorXd::Zero(2);
  file.outputs.prefix = name;
  return file;
}

std::vector<ScenarioFile> step_runs(const std::string& id, const ControllerSpec& controller) {
  std::vector<ScenarioFile> runs;
  for (double r : {25.0, 100.0, 400.0})
    runs.push_back(base_run(id + "_r" + std::to_string(static_cast<int>(r)), controller,
                            ReferenceSignal::step(r), kStepHorizon));
  return runs;
}

ScenarioFile harmonic_run(const std::string& id, const ControllerSpec& controller,
                          bool varying) {
  ScenarioFile run =
      base_run(id, controller, ReferenceSignal::harmonic(100.0, 0.2), kHarmonicHorizon);
  if (varying) run.plant.theta = benchmark_varying_theta();
  return run;
}

}  // namespace

PlantModel benchmark_plant() {
  PlantModel p;
  p.A = (MatrixXd(2, 2) << 0.0, 1.0, -1.0, -1.4).finished();
  p.b = VectorXd::Unit(2, 1);
  p.c = VectorXd::Unit(2, 0);
  p.omega_box = {VectorXd::Constant(2, -10.0), VectorXd::Constant(2, 10.0)};
  p.theta = ThetaTrajectory::constant((VectorXd(2) << 4.0, -4.5).finished());
  return p;
}

ThetaTrajectory benchmark_varying_theta() {
  ThetaTrajectory traj;
  traj.offset = VectorXd::Constant(2, 2.0);
  traj.terms = {{{2.0, 0.5}}, {{0.3, 0.5}, {0.2, 1.0 / std::numbers::pi}}};
  return traj;
}

ControllerSpec first_order_controller() {
  ControllerSpec c;
  c.kind = ControllerKind::kL1;
  c.K = VectorXd::Zero(2);
  c.filter = FilterSpec::first_order(160.0);
  c.gamma_c = 10000.0;
  c.Q = MatrixXd::Identity(2, 2);
  return c;
}

ControllerSpec third_order_controller() {
  ControllerSpec c = first_order_controller();
  c.filter = FilterSpec::third_order(50.0);
  c.gamma_c = 400.0;
  return c;
}

const std::vector<std::string>& preset_ids() {
  static const std::vector<std::string> ids{"fig4",        "fig5",         "fig6",
                                            "fig7",        "fig8",         "lambda-first",
                                            "lambda-third", "margin"};
  return ids;
}

Preset make_preset(const std::string& id) {
  Preset p;
  p.id = id;
  if (id == "fig4") {
    p.title = "first-order filter, steps r = 25, 100, 400";
    p.runs = step_runs(id, first_order_controller());
  } else if (id == "fig5") {
    p.title = "first-order filter, r = 100 cos(0.2 t)";
    p.runs = {harmonic_run(id, first_order_controller(), false)};
  } else if (id == "fig6") {
    p.title = "first-order filter, r = 100 cos(0.2 t), time-varying theta";
    p.runs = {harmonic_run(id, first_order_controller(), true)};
  } else if (id == "fig7") {
    p.title = "third-order filter, steps r = 25, 100, 400";
    p.runs = step_runs(id, third_order_controller());
  } else if (id == "fig8") {
    p.title = "third-order filter, r = 100 cos(0.2 t), time-varying theta";
    p.runs = {harmonic_run(id, third_order_controller(), true)};
  } else if (id == "lambda-first" || id == "lambda-third") {
    const bool first = id == "lambda-first";
    p.title = std::string("lambda against omega, ") + (first ? "first" : "third") + "-order filter";
    p.kind = PresetKind::kLambdaSweep;
    p.family = first ? FilterSpec::Kind::kFirstOrder : FilterSpec::Kind::kThirdOrder;
    p.omega_grid = linear_grid(1.0, 200.0, 399);
  } else if (id == "margin") {
    p.title = "time-delay margin against adaptive gain";
    p.kind = PresetKind::kMargin;
    p.gamma_grid = log_grid(10.0, 1e4, 25);
  } else {
    fail(ErrorKind::kInvalidArgument, "unknown preset '" + id + "'");
  }
  return p;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  require(points >= 1, ErrorKind::kInvalidArgument, "grid needs at least one point");
  if (points == 1) return {lo};
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[i] = lo + (hi - lo) * i / (points - 1);
  return g;
}

std::vector<double> log_grid(double lo, double hi, int points) {
  require(lo > 0.0 && hi > 0.0, ErrorKind::kInvalidArgument, "log grid needs positive ends");
  std::vector<double> g = linear_grid(std::log10(lo), std::log10(hi), points);
  for (double& v : g) v = std::pow(10.0, v);
  g.front() = lo;
  g.back() = hi;
  return g;
}

double scaling_deviation(const std::vector<const SimTrace*>& traces,
                         const std::vector<double>& amplitudes, double t_from) {
  require(traces.size() == amplitudes.size() && !traces.empty(), ErrorKind::kInvalidArgument,
          "scaling_deviation: one amplitude per trace");
  const SimTrace& base = *traces.front();
  double worst = 0.0;
  for (std::size_t k = 1; k < traces.size(); ++k) {
    const SimTrace& other = *traces[k];
    const double scale = amplitudes.front() / amplitudes[k];
    std::size_t j = 0;
    for (std::size_t i = 0; i < base.t.size(); ++i) {
      const double t = base.t[i];
      if (t < t_from) continue;
      while (j + 1 < other.t.size() && other.t[j + 1] < t) ++j;
      if (j + 1 >= other.t.size()) break;
      const double w = (t - other.t[j]) / (other.t[j + 1] - other.t[j]);
      const double y = (1.0 - w) * other.y[j] + w * other.y[j + 1];
      worst = std::max(worst, std::abs(y * scale - base.y[i]) / std::abs(base.y[i]));
    }
  }
  return worst;
}

}  // namespace l1adapt::cli
