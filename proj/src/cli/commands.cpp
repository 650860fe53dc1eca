#include "l1adapt/cli/commands.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "l1adapt/cli/output.hpp"
#include "l1adapt/cli/presets.hpp"
#include "l1adapt/cli/scenario_file.hpp"
#include "l1adapt/cli/tf_expression.hpp"
#include "l1adapt/l1_norm.hpp"
#include "l1adapt/margin.hpp"
#include "l1adapt/parallel.hpp"
#include "l1adapt/reference_analysis.hpp"

namespace l1adapt::cli {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInfeasibleDesign:
      return kExitInfeasible;
    case ErrorKind::kDiverged:
      return kExitDiverged;
    default:
      return kExitUsage;
  }
}

namespace {

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary);
  require(static_cast<bool>(f), ErrorKind::kInvalidArgument,
          "cannot write " + path.string());
  f << text;
}

ScenarioFile first_run(const std::string& preset_id) {
  Preset p = make_preset(preset_id);
  require(p.kind == PresetKind::kSimulation, ErrorKind::kInvalidArgument,
          "preset '" + preset_id + "' has no plant scenario");
  return p.runs.front();
}

struct RunOutcome {
  SimTrace trace;
  std::optional<BoundsReport> report;
};

RunOutcome run_scenario(ScenarioFile file, bool allow_infeasible) {
  RunOutcome outcome;
  const PlantModel& plant = file.plant;
  if (file.controller.kind == ControllerKind::kHighGain) {
    outcome.trace = simulate_highgain(plant, build_highgain(plant, file.controller.highgain_k),
                                      file.scenario);
    return outcome;
  }
  const L1Config cfg = build_controller(file);
  try {
    outcome.report = make_bounds_report(plant, cfg, file.scenario.reference);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::kInfeasibleDesign || !allow_infeasible) throw;
    file.scenario.with_reference = false;
    file.scenario.with_design = false;
  }
  outcome.trace = simulate_closed_loop(plant, cfg, file.scenario);
  if (outcome.report) verify_trace(outcome.trace, file.scenario.reference, *outcome.report);
  return outcome;
}

void print_run_summary(std::ostream& out, const std::string& name, const RunOutcome& run) {
  const SimTrace& tr = run.trace;
  const SimMonitors& m = tr.monitors;
  out << name << ": " << tr.steps << " steps, dt = " << format_number(tr.dt)
      << ", y(end) = " << format_number(tr.y.back()) << "\n";
  out << "  sup |y - r| = " << format_number(m.sup_tracking_error)
      << ", after settling = " << format_number(m.sup_tracking_error_settled) << "\n";
  if (tr.requested_delay > 0.0)
    out << "  input delay " << format_number(tr.requested_delay) << " applied as "
        << format_number(tr.applied_delay) << "\n";
  if (!run.report) return;
  out << "  lambda = " << format_number(run.report->lambda) << "\n";
  for (const BoundCheck& c : run.report->checks)
    out << "  " << (c.passed ? "PASS " : "FAIL ") << c.name << ": observed "
        << format_number(c.observed) << ", bound " << format_number(c.bound) << "\n";
}

void write_run_outputs(const ScenarioFile& file, const RunOutcome& run, const fs::path& dir,
                       const std::string& prefix, std::ostream& out) {
  std::ostringstream csv;
  write_trace_csv(csv, run.trace, file.outputs.series);
  const fs::path csv_path = dir / (prefix + ".csv");
  write_file(csv_path, csv.str());
  out << "wrote " << csv_path.string() << "\n";
  if (run.report) {
    const fs::path json_path = dir / (prefix + "_bounds.json");
    write_file(json_path, bounds_report_json(*run.report).dump(2) + "\n");
    out << "wrote " << json_path.string() << "\n";
  }
}

std::vector<double> sweep_grid(const std::vector<double>& explicit_values, double lo, double hi,
                               int points, bool logarithmic) {
  if (!explicit_values.empty()) return explicit_values;
  return logarithmic ? log_grid(lo, hi, points) : linear_grid(lo, hi, points);
}

FilterSpec::Kind parse_family(const std::string& name) {
  if (name == "first_order") return FilterSpec::Kind::kFirstOrder;
  if (name == "third_order") return FilterSpec::Kind::kThirdOrder;
  fail(ErrorKind::kParse, "--family: expected first_order or third_order, got '" + name + "'");
}

// l1gain --------------------------------------------------------------------

struct L1GainArgs {
  std::string tf, scenario, preset, system = "gbar";
  double tol = 1e-6;
};

LtiSystem named_system(const ScenarioFile& file, const std::string& name) {
  require(file.controller.kind != ControllerKind::kHighGain, ErrorKind::kInvalidArgument,
          "l1gain: high-gain scenarios have no composite systems");
  const L1Config cfg = build_controller(file);
  const Eigen::VectorXd theta = eval_theta(file.plant.theta, 0.0).theta;
  if (name == "gbar") return build_Gbar(cfg);
  if (name == "g") return build_G(cfg);
  if (name == "filter") return cfg.filter;
  if (name == "ho") return cfg.H_o;
  if (name == "h2") return build_H2(file.plant, cfg, theta);
  if (name == "h3") return build_H3(file.plant, cfg, theta);
  if (name == "h4") return build_H4(cfg, theta);
  if (name == "h5") return build_H5(cfg, theta);
  fail(ErrorKind::kParse, "--system: unknown system '" + name + "'");
}

int cmd_l1gain(const L1GainArgs& a, std::ostream& out) {
  const int sources = !a.tf.empty() + !a.scenario.empty() + !a.preset.empty();
  require(sources == 1, ErrorKind::kParse, "l1gain: give exactly one of --tf, --scenario, --preset");
  require(a.tol > 0.0, ErrorKind::kParse, "l1gain: --tol must be positive");
  LtiSystem sys = LtiSystem::gain(0.0);
  if (!a.tf.empty()) {
    const TransferFunction tf = parse_tf_expression(a.tf);
    require(tf.num.degree() <= tf.den.degree(), ErrorKind::kInvalidArgument,
            "l1gain: transfer function is improper");
    sys = LtiSystem::from_tf(tf.num, tf.den);
  } else {
    sys = named_system(a.scenario.empty() ? first_run(a.preset) : load_scenario(a.scenario),
                       a.system);
  }
  out << format_number(l1_gain(sys, a.tol)) << "\n";
  return kExitOk;
}

// design --------------------------------------------------------------------

struct DesignArgs {
  std::string scenario, preset, family, output;
  std::vector<double> omega;
  double omega_min = 1.0, omega_max = 200.0;
  int points = 399;
  std::optional<double> filter_omega;
};

int cmd_design(const DesignArgs& a, std::ostream& out) {
  require(a.scenario.empty() != a.preset.empty(), ErrorKind::kParse,
          "design: give exactly one of --scenario, --preset");
  std::optional<ScenarioFile> file;
  FilterSpec::Kind family = FilterSpec::Kind::kFirstOrder;
  PlantModel plant = benchmark_plant();
  Eigen::VectorXd K = Eigen::VectorXd::Zero(plant.order());
  if (!a.preset.empty()) {
    Preset p = make_preset(a.preset);
    if (p.kind == PresetKind::kLambdaSweep) {
      family = p.family;
    } else {
      file = first_run(a.preset);
    }
  } else {
    file = load_scenario(a.scenario);
  }
  if (file) {
    plant = file->plant;
    K = file->controller.K;
    if (file->controller.kind == ControllerKind::kL1) {
      const auto kind = file->controller.filter.kind;
      if (kind == FilterSpec::Kind::kFirstOrder || kind == FilterSpec::Kind::kThirdOrder)
        family = kind;
      if (a.filter_omega) {
        require(kind == FilterSpec::Kind::kFirstOrder || kind == FilterSpec::Kind::kThirdOrder,
                ErrorKind::kParse, "--filter-omega needs a first- or third-order filter");
        file->controller.filter.omega = *a.filter_omega;
      }
    }
  }
  if (!a.family.empty()) family = parse_family(a.family);
  require(a.points >= 1, ErrorKind::kParse, "--points must be at least 1");
  const std::vector<double> grid = sweep_grid(a.omega, a.omega_min, a.omega_max, a.points, false);
  for (double w : grid) require(w > 0.0, ErrorKind::kParse, "omega values must be positive");

  const LambdaSweep sweep = lambda_sweep(plant, K, family, grid);
  std::ostringstream csv;
  write_lambda_csv(csv, sweep);
  const bool csv_to_stdout = a.output.empty();
  const std::string note = csv_to_stdout ? "# " : "";
  if (csv_to_stdout) {
    out << csv.str();
  } else {
    write_file(a.output, csv.str());
    out << "wrote " << a.output << "\n";
  }
  out << note << "family: " << (family == FilterSpec::Kind::kFirstOrder ? "first_order" : "third_order")
      << "\n";
  if (sweep.crossing)
    out << note << "lambda < 1 for omega above " << format_number(*sweep.crossing) << "\n";
  else
    out << note << "lambda does not cross 1 on this grid\n";

  if (!file || file->controller.kind != ControllerKind::kL1) return kExitOk;
  const L1Config cfg = build_controller(*file);
  const double lambda = compute_lambda(plant, cfg);
  if (lambda >= 1.0) {
    out << note << "verdict: λ ≥ 1: infeasible (lambda = " << format_number(lambda) << ")\n";
    return kExitInfeasible;
  }
  out << note << "verdict: λ < 1: feasible (lambda = " << format_number(lambda) << ")\n";
  return kExitOk;
}

// simulate ------------------------------------------------------------------

struct SimulateArgs {
  std::string scenario, output_dir, prefix;
  bool allow_infeasible = false;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  ScenarioFile file = load_scenario(a.scenario);
  if (!a.output_dir.empty()) file.outputs.directory = a.output_dir;
  if (!a.prefix.empty()) file.outputs.prefix = a.prefix;
  const RunOutcome run = run_scenario(file, a.allow_infeasible);
  print_run_summary(out, file.name.empty() ? file.outputs.prefix : file.name, run);
  write_run_outputs(file, run, file.outputs.directory, file.outputs.prefix, out);
  return kExitOk;
}

// margin --------------------------------------------------------------------

struct MarginArgs {
  std::vector<double> gamma;
  double gamma_min = 10.0, gamma_max = 1e4;
  int points = 25;
  double k = -2.0, a_m = -1.0, tau_max = 10.0;
  std::string filter = "1/(s+1)", output;
};

MarginCurve compute_margin(const MarginArgs& a) {
  require(a.points >= 1, ErrorKind::kParse, "--points must be at least 1");
  require(a.tau_max > 0.0, ErrorKind::kParse, "--tau-max must be positive");
  const std::vector<double> grid = sweep_grid(a.gamma, a.gamma_min, a.gamma_max, a.points, true);
  for (double g : grid)
    require(g > 0.0, ErrorKind::kParse, "gamma values must be positive, got " + format_number(g));
  MarginParams params;
  params.k = a.k;
  params.a_m = a.a_m;
  params.filter = parse_tf_expression(a.filter);
  MarginOptions options;
  options.tau_max = a.tau_max;
  return margin_curve(grid, params, options);
}

int cmd_margin(const MarginArgs& a, std::ostream& out) {
  require(a.gamma_min > 0.0 && a.gamma_max > 0.0, ErrorKind::kParse,
          "gamma values must be positive");
  const MarginCurve curve = compute_margin(a);
  std::ostringstream csv;
  write_margin_csv(csv, curve);
  if (a.output.empty()) {
    out << csv.str();
  } else {
    write_file(a.output, csv.str());
    out << "wrote " << a.output << "\n";
  }
  return kExitOk;
}

// repro ---------------------------------------------------------------------

struct ReproArgs {
  std::string id, output_dir = ".";
  bool dump = false, deviate = false;
  std::optional<double> horizon, dt, gamma_c, record_interval;
};

int cmd_repro(const ReproArgs& a, std::ostream& out) {
  if (a.id == "list") {
    for (const auto& id : preset_ids()) out << id << ": " << make_preset(id).title << "\n";
    return kExitOk;
  }
  Preset preset = make_preset(a.id);
  const bool overrides = a.horizon || a.dt || a.gamma_c || a.record_interval;
  require(!overrides || a.deviate, ErrorKind::kParse,
          "repro " + a.id + ": preset parameters are fixed; pass --deviate to override them");
  require(!overrides || preset.kind == PresetKind::kSimulation, ErrorKind::kParse,
          "repro " + a.id + ": overrides apply to simulation presets only");
  for (ScenarioFile& run : preset.runs) {
    if (a.horizon) run.scenario.horizon = *a.horizon;
    if (a.dt) run.scenario.dt = *a.dt;
    if (a.record_interval) run.scenario.record_interval = *a.record_interval;
    if (a.gamma_c) run.controller.gamma_c = *a.gamma_c;
    run.outputs.directory = a.output_dir;
  }
  const fs::path dir = a.output_dir;

  if (a.dump) {
    require(preset.kind == PresetKind::kSimulation, ErrorKind::kParse,
            "repro " + a.id + ": only simulation presets have scenario files");
    for (std::size_t i = 0; i < preset.runs.size(); ++i)
      out << (i ? "\n" : "") << "# run " << preset.runs[i].name << "\n"
          << to_toml(preset.runs[i]);
    return kExitOk;
  }

  out << a.id << ": " << preset.title << "\n";
  if (preset.kind == PresetKind::kLambdaSweep) {
    const PlantModel plant = benchmark_plant();
    const LambdaSweep sweep =
        lambda_sweep(plant, Eigen::VectorXd::Zero(plant.order()), preset.family, preset.omega_grid);
    std::ostringstream csv;
    write_lambda_csv(csv, sweep);
    write_file(dir / (a.id + ".csv"), csv.str());
    out << "wrote " << (dir / (a.id + ".csv")).string() << "\n";
    if (sweep.crossing)
      out << "lambda < 1 for omega above " << format_number(*sweep.crossing) << "\n";
    else
      out << "lambda does not cross 1 on this grid\n";
    return kExitOk;
  }
  if (preset.kind == PresetKind::kMargin) {
    MarginArgs m;
    m.gamma = preset.gamma_grid;
    const MarginCurve curve = compute_margin(m);
    std::ostringstream csv;
    write_margin_csv(csv, curve);
    write_file(dir / "margin.csv", csv.str());
    out << "wrote " << (dir / "margin.csv").string() << "\n" << csv.str();
    return kExitOk;
  }

  const std::vector<RunOutcome> runs = parallel_map<RunOutcome>(
      preset.runs.size(), [&](std::size_t i) { return run_scenario(preset.runs[i], false); });
  for (std::size_t i = 0; i < runs.size(); ++i) {
    print_run_summary(out, preset.runs[i].name, runs[i]);
    write_run_outputs(preset.runs[i], runs[i], dir, preset.runs[i].outputs.prefix, out);
  }
  if (runs.size() > 1) {
    std::vector<const SimTrace*> traces;
    std::vector<double> amplitudes;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      traces.push_back(&runs[i].trace);
      amplitudes.push_back(preset.runs[i].scenario.reference.amplitude);
    }
    out << "largest deviation from proportional scaling after t = 1: "
        << format_number(scaling_deviation(traces, amplitudes, 1.0)) << "\n";
  }
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"L1 adaptive control analysis and simulation", "l1adapt"};
  app.require_subcommand(1);

  L1GainArgs l1a;
  auto* l1 = app.add_subcommand("l1gain", "L1 gain of a transfer function or scenario system");
  l1->add_option("--tf", l1a.tf, "Transfer function in s, e.g. 1/(s+160)");
  l1->add_option("--scenario", l1a.scenario, "Scenario file");
  l1->add_option("--preset", l1a.preset, "Simulation preset id");
  l1->add_option("--system", l1a.system, "gbar, g, filter, ho, h2, h3, h4 or h5")
      ->capture_default_str();
  l1->add_option("--tol", l1a.tol, "Relative tolerance of the integral")->capture_default_str();

  DesignArgs da;
  auto* design = app.add_subcommand("design", "Lambda against filter bandwidth, with a verdict");
  design->add_option("--scenario", da.scenario, "Scenario file");
  design->add_option("--preset", da.preset, "Preset id");
  design->add_option("--family", da.family, "first_order or third_order");
  design->add_option("--omega", da.omega, "Explicit omega grid")->delimiter(',');
  design->add_option("--omega-min", da.omega_min)->capture_default_str();
  design->add_option("--omega-max", da.omega_max)->capture_default_str();
  design->add_option("--points", da.points)->capture_default_str();
  design->add_option("--filter-omega", da.filter_omega, "Bandwidth of the checked design");
  design->add_option("--output", da.output, "CSV path (stdout by default)");

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "Simulate a scenario file");
  simulate->add_option("scenario", sa.scenario, "Scenario file")->required();
  simulate->add_option("--output-dir", sa.output_dir, "Overrides outputs.directory");
  simulate->add_option("--prefix", sa.prefix, "Overrides outputs.prefix");
  simulate->add_flag("--allow-infeasible", sa.allow_infeasible,
                     "Simulate even when lambda >= 1 (no reference system or bounds)");

  MarginArgs ma;
  auto* margin = app.add_subcommand("margin", "Time-delay margin against adaptive gain");
  margin->add_option("--gamma", ma.gamma, "Explicit gain grid")->delimiter(',');
  margin->add_option("--gamma-min", ma.gamma_min)->capture_default_str();
  margin->add_option("--gamma-max", ma.gamma_max)->capture_default_str();
  margin->add_option("--points", ma.points)->capture_default_str();
  margin->add_option("--k", ma.k, "Loop coefficient")->capture_default_str();
  margin->add_option("--am", ma.a_m, "Reference model pole")->capture_default_str();
  margin->add_option("--filter", ma.filter, "Filter transfer function")->capture_default_str();
  margin->add_option("--tau-max", ma.tau_max)->capture_default_str();
  margin->add_option("--output", ma.output, "CSV path (stdout by default)");

  ReproArgs ra;
  auto* repro = app.add_subcommand("repro", "Run a built-in benchmark preset");
  repro->add_option("id", ra.id, "Preset id, or 'list'")->required();
  repro->add_option("--output-dir", ra.output_dir)->capture_default_str();
  repro->add_flag("--dump-scenario", ra.dump, "Print the preset as scenario files and exit");
  repro->add_flag("--deviate", ra.deviate, "Allow the overrides below");
  repro->add_option("--horizon", ra.horizon);
  repro->add_option("--dt", ra.dt);
  repro->add_option("--gamma-c", ra.gamma_c);
  repro->add_option("--record-interval", ra.record_interval);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*l1) return cmd_l1gain(l1a, out);
    if (*design) return cmd_design(da, out);
    if (*simulate) return cmd_simulate(sa, out);
    if (*margin) return cmd_margin(ma, out);
    return cmd_repro(ra, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace l1adapt::cli
