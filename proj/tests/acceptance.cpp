// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "l1adapt/cli/presets.hpp"
#include "l1adapt/cli/scenario_file.hpp"
#include "l1adapt/error.hpp"
#include "l1adapt/l1_norm.hpp"
#include "l1adapt/margin.hpp"
#include "l1adapt/parallel.hpp"
#include "l1adapt/reference_analysis.hpp"
#include "l1adapt/sim_engine.hpp"
#include "support/properties.hpp"

using namespace l1adapt;
using namespace l1adapt::cli;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* pattern, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
    passed = passed && ok;
  }
};

// A finished closed-loop run with its bounds report.
struct Run {
  std::string name;
  double amplitude = 0.0;
  SimTrace trace;
  BoundsReport report;
  double seconds = 0.0;
};

Run execute(const ScenarioFile& file) {
  const auto start = Clock::now();
  Run run;
  run.name = file.name;
  run.amplitude = file.scenario.reference.amplitude;
  const L1Config cfg = build_controller(file);
  run.report = make_bounds_report(file.plant, cfg, file.scenario.reference);
  run.trace = simulate_closed_loop(file.plant, cfg, file.scenario);
  verify_trace(run.trace, file.scenario.reference, run.report);
  run.seconds = seconds_since(start);
  return run;
}

std::vector<Run> execute_all(const std::vector<ScenarioFile>& files) {
  return parallel_map<Run>(files.size(), [&](std::size_t i) { return execute(files[i]); });
}

L1Config preset_config(const ControllerSpec& spec) {
  return build_l1(benchmark_plant(), spec.K, spec.filter, spec.gamma_c, spec.Q);
}

bool theta_hat_stays_in_box(const SimTrace& trace, const ParamBox& box) {
  if (!trace.monitors.theta_hat_in_box) return false;
  return std::all_of(trace.theta_hat.begin(), trace.theta_hat.end(),
                     [&](const Eigen::VectorXd& th) { return box.contains(th); });
}

Outcome lambda_reproduction() {
  Outcome out;
  const PlantModel plant = benchmark_plant();
  const struct {
    const char* label;
    ControllerSpec spec;
    double expected;
  } cases[] = {{"first-order", first_order_controller(), 0.1725},
               {"third-order", third_order_controller(), 0.3984}};
  for (const auto& c : cases) {
    const auto start = Clock::now();
    const double lambda = compute_lambda(plant, preset_config(c.spec));
    const double took = seconds_since(start);
    out.require(std::abs(lambda - c.expected) <= 0.005,
                std::string(c.label) + " lambda " + fmt("%.6f", lambda) + " vs " +
                    fmt("%.4f", c.expected));
    out.require(took < 5.0, fmt("%.3f s", took));
  }
  return out;
}

Outcome feasibility_thresholds() {
  Outcome out;
  const PlantModel plant = benchmark_plant();
  const Eigen::VectorXd K = Eigen::VectorXd::Zero(2);
  for (const char* id : {"lambda-first", "lambda-third"}) {
    const Preset preset = make_preset(id);
    const double expected = preset.family == FilterSpec::Kind::kFirstOrder ? 30.0 : 25.0;
    const auto start = Clock::now();
    const LambdaSweep sweep = lambda_sweep(plant, K, preset.family, preset.omega_grid);
    const double took = seconds_since(start);
    if (!sweep.crossing) {
      out.require(false, std::string(id) + " no crossing on the grid");
    } else {
      out.require(std::abs(*sweep.crossing - expected) <= 0.2 * expected,
                  std::string(id) + " crossing " + fmt("%.3f", *sweep.crossing) + " vs " +
                      fmt("%.0f", expected));
    }
    out.require(took < 60.0, fmt("%.2f s", took));
  }
  return out;
}

Outcome first_order_gain() {
  Outcome out;
  for (double omega : {1.0, 160.0, 1000.0}) {
    const LtiSystem sys = LtiSystem::from_tf(Polynomial{1.0}, Polynomial{omega, 1.0});
    const double gain = l1_gain(sys, 1e-9);
    const double rel = std::abs(gain * omega - 1.0);
    out.require(rel <= 1e-6, "omega " + fmt("%g", omega) + " rel err " + fmt("%.2e", rel));
  }
  return out;
}

Outcome tracking_and_scaling(const std::vector<Run>& steps) {
  Outcome out;
  std::vector<const SimTrace*> traces;
  std::vector<double> amplitudes;
  for (const Run& run : steps) {
    const double final_t = run.trace.t.back();
    const double err = std::abs(run.trace.y.back() - run.amplitude);
    out.require(std::abs(final_t - 10.0) < 1e-9 && err <= 0.01 * run.amplitude,
                "r=" + fmt("%g", run.amplitude) + " |y(10)-r| " + fmt("%.4g", err));
    out.require(run.seconds < 30.0, fmt("%.2f s", run.seconds));
    traces.push_back(&run.trace);
    amplitudes.push_back(run.amplitude);
  }
  const double dev = scaling_deviation(traces, amplitudes, 1.0);
  out.require(dev <= 0.02, "scaling deviation " + fmt("%.3g", dev));
  return out;
}

Outcome transient_bounds(const std::vector<Run>& steps, const std::vector<Run>& sweep,
                         const std::vector<double>& gains) {
  Outcome out;
  for (const Run& run : steps) {
    const double root = std::sqrt(run.report.gamma_c);
    const double xb = run.report.gammas.gamma1 / root, ub = run.report.gammas.gamma2 / root;
    const SimMonitors& m = run.trace.monitors;
    out.require(m.sup_state_error <= xb && m.sup_control_error <= ub,
                "r=" + fmt("%g", run.amplitude) + " x " + fmt("%.4g", m.sup_state_error) + "<=" +
                    fmt("%.4g", xb) + " u " + fmt("%.4g", m.sup_control_error) + "<=" +
                    fmt("%.4g", ub));
  }
  std::string xs = "state errors", us = "control errors";
  bool monotone = true;
  for (std::size_t i = 0; i < sweep.size(); ++i) {
    const SimMonitors& m = sweep[i].trace.monitors;
    xs += " " + fmt("%.4g", m.sup_state_error);
    us += " " + fmt("%.4g", m.sup_control_error);
    if (i > 0) {
      const SimMonitors& prev = sweep[i - 1].trace.monitors;
      monotone = monotone && m.sup_state_error <= prev.sup_state_error &&
                 m.sup_control_error <= prev.sup_control_error;
    }
  }
  std::string grid = "gamma_c";
  for (double g : gains) grid += " " + fmt("%g", g);
  out.require(monotone, grid + ": " + xs + ", " + us);
  return out;
}

Outcome lyapunov_and_projection(const std::vector<const Run*>& runs) {
  Outcome out;
  const ParamBox box = benchmark_plant().omega_box;
  double worst = -INFINITY;
  int violations = 0;
  for (const Run* run : runs) {
    const SimMonitors& m = run->trace.monitors;
    const bool ok = m.max_lyapunov_increase <= 1e-6 * m.lyapunov_initial &&
                    theta_hat_stays_in_box(run->trace, box);
    if (!ok) ++violations;
    if (m.lyapunov_initial > 0) worst = std::max(worst, m.max_lyapunov_increase / m.lyapunov_initial);
  }
  out.require(violations == 0, std::to_string(runs.size()) + " runs, largest V increase / V(0) " +
                                   fmt("%.3g", worst));
  return out;
}

Outcome prediction_bound(const std::vector<Run>& steps) {
  Outcome out;
  for (const Run& run : steps) {
    const double bound = std::sqrt(run.report.constants.theta_bar_max /
                                   (run.report.gammas.factors.lambda_min_P * run.report.gamma_c));
    const double seen = run.trace.monitors.sup_prediction_error;
    out.require(seen <= 1.02 * bound, "r=" + fmt("%g", run.amplitude) + " " + fmt("%.4g", seen) +
                                          "<=" + fmt("%.4g", 1.02 * bound));
  }
  return out;
}

Outcome time_varying(const Run& first, const Run& first_constant, const Run& third,
                     const Run& third_constant) {
  Outcome out;
  for (const auto& [run, constant] : {std::pair{&first, &first_constant}, {&third, &third_constant}}) {
    const SimMonitors& m = run->trace.monitors;
    const Gammas& g = run->report.gammas;
    out.require(m.sup_state_error <= g.gamma3 && m.sup_control_error <= g.gamma4,
                run->name + " x " + fmt("%.4g", m.sup_state_error) + "<=" + fmt("%.4g", g.gamma3) +
                    " u " + fmt("%.4g", m.sup_control_error) + "<=" + fmt("%.4g", g.gamma4));
    const double varying = m.sup_tracking_error_settled;
    const double fixed = constant->trace.monitors.sup_tracking_error_settled;
    const double ratio = varying / fixed;
    out.require(ratio <= 2.0 && ratio >= 0.5,
                "tracking " + fmt("%.4g", varying) + " vs constant " + fmt("%.4g", fixed));
  }
  return out;
}

Outcome delay_margins() {
  Outcome out;
  const std::vector<double> gammas{10.0, 100.0, 1000.0, 10000.0};
  const auto start = Clock::now();
  const MarginCurve curve = margin_curve(gammas);
  const double took = seconds_since(start);
  bool decreasing = true, found = true;
  std::string taus = "tau_mrac";
  for (std::size_t i = 0; i < gammas.size(); ++i) {
    taus += " " + fmt("%.4g", curve.mrac[i].tau);
    found = found && curve.mrac[i].found && curve.l1[i].found;
    if (i > 0) decreasing = decreasing && curve.mrac[i].tau < curve.mrac[i - 1].tau;
  }
  out.require(found, "all margins found");
  out.require(decreasing, taus);
  out.require(curve.mrac[3].tau < 0.1 * curve.mrac[0].tau,
              "ratio " + fmt("%.3g", curve.mrac[3].tau / curve.mrac[0].tau));
  const double lo = std::min(curve.l1[2].tau, curve.l1[3].tau);
  const double hi = std::max(curve.l1[2].tau, curve.l1[3].tau);
  out.require((hi - lo) / lo < 0.2, "tau_l1 " + fmt("%.4g", curve.l1[2].tau) + " " +
                                        fmt("%.4g", curve.l1[3].tau));
  out.require(took < 120.0, fmt("%.2f s", took));
  return out;
}

Outcome property_suites() {
  Outcome out;
  using Check = proptest::PropertyResult (*)(int, std::uint64_t);
  const std::pair<Check, std::uint64_t> suites[] = {
      {proptest::check_cascade_submultiplicativity, 7001},
      {proptest::check_induced_norm_bound, 7002},
      {proptest::check_small_gain_certificate, 7003},
      {proptest::check_lyapunov_residual, 7004},
      {proptest::check_faddeev_reconstruction, 7005}};
  for (const auto& [check, seed] : suites) {
    const proptest::PropertyResult r = check(100, seed);
    out.require(r.passed() && r.instances == 100,
                r.name + " " + std::to_string(r.failures) + "/" + std::to_string(r.instances) +
                    (r.first_failure.empty() ? "" : " (" + r.first_failure + ")"));
  }
  return out;
}

}  // namespace

int main() {
  int failed = 0;
  auto report = [&](int id, const std::function<Outcome()>& body) {
    Outcome o;
    try {
      o = body();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.passed) ++failed;
    std::printf("criterion %d: %s  %s\n", id, o.passed ? "PASS" : "FAIL", o.detail.c_str());
    std::fflush(stdout);
  };

  report(1, lambda_reproduction);
  report(2, feasibility_thresholds);
  report(3, first_order_gain);

  // Closed-loop runs shared by criteria 4 to 8.
  std::vector<ScenarioFile> files = make_preset("fig4").runs;
  const std::vector<double> gains{400.0, 1600.0, 6400.0};
  ScenarioFile r100 = files[1];
  for (double g : gains) {
    ScenarioFile f = r100;
    f.controller.gamma_c = g;
    f.name += "_gc" + fmt("%g", g);
    files.push_back(f);
  }
  const ScenarioFile fig5 = make_preset("fig5").runs.at(0);
  const ScenarioFile fig6 = make_preset("fig6").runs.at(0);
  const ScenarioFile fig8 = make_preset("fig8").runs.at(0);
  ScenarioFile third_constant = fig8;
  third_constant.plant.theta = benchmark_plant().theta;
  third_constant.name = "third_order_cos_constant";
  for (const auto& f : {fig5, fig6, fig8, third_constant}) files.push_back(f);
  for (const auto& f : make_preset("fig7").runs) files.push_back(f);

  std::vector<Run> runs;
  std::string run_error;
  try {
    runs = execute_all(files);
  } catch (const std::exception& e) {
    run_error = e.what();
  }
  if (!run_error.empty()) {
    for (int id : {4, 5, 6, 7, 8}) {
      std::printf("criterion %d: FAIL  simulation error: %s\n", id, run_error.c_str());
      ++failed;
    }
  } else {
    const std::vector<Run> steps(runs.begin(), runs.begin() + 3);
    std::vector<Run> sweep(runs.begin() + 3, runs.begin() + 6);
    sweep.push_back(runs[1]);
    std::vector<double> sweep_gains = gains;
    sweep_gains.push_back(runs[1].report.gamma_c);
    const Run& fig5_run = runs[6];
    const Run& fig6_run = runs[7];
    const Run& fig8_run = runs[8];
    const Run& third_constant_run = runs[9];

    std::vector<const Run*> constant_runs;
    for (const Run& run : runs)
      if (!run.report.time_varying) constant_runs.push_back(&run);

    report(4, [&] { return tracking_and_scaling(steps); });
    report(5, [&] { return transient_bounds(steps, sweep, sweep_gains); });
    report(6, [&] { return lyapunov_and_projection(constant_runs); });
    report(7, [&] { return prediction_bound(steps); });
    report(8, [&] { return time_varying(fig6_run, fig5_run, fig8_run, third_constant_run); });
  }

  report(9, delay_margins);
  report(10, property_suites);

  std::printf("%d of 10 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
