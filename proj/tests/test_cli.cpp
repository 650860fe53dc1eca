#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "l1adapt/cli/commands.hpp"
#include "l1adapt/cli/output.hpp"
#include "l1adapt/cli/presets.hpp"
#include "l1adapt/cli/scenario_file.hpp"
#include "l1adapt/cli/tf_expression.hpp"
#include "l1adapt/error.hpp"
#include "json.hpp"

using namespace l1adapt;
using namespace l1adapt::cli;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int code;
  std::string out, err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("l1adapt_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string read_file(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

const char* kScenario = R"(name = "short"

[plant]
A = [[0, 1], [-1, -1.4]]
b = [0, 1]
c = [1, 0]
omega_box = [[-10, 10], [-10, 10]]
theta = { kind = "constant", value = [4, -4.5] }

[controller]
architecture = "l1"
K = [0, 0]
filter = { kind = "third_order", omega = 50 }
gamma_c = 400
Q = [[1, 0], [0, 1]]

[scenario]
horizon = 0.5
reference = { kind = "step", amplitude = 10 }
x0 = [0, 0]

[outputs]
prefix = "short"
)";

std::string with_line(const std::string& text, const std::string& from, const std::string& to) {
  std::string s = text;
  const auto pos = s.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return s.replace(pos, from.size(), to);
}

std::string parse_error(const std::string& text) {
  try {
    parse_scenario(text, "case.toml");
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kParse);
    return e.what();
  }
  ADD_FAILURE() << "scenario accepted";
  return {};
}

}  // namespace

TEST(TfExpression, ParsesCommonForms) {
  TransferFunction tf = parse_tf_expression("1/(s+160)");
  EXPECT_EQ(tf.num.descending(), (std::vector<double>{1.0}));
  EXPECT_EQ(tf.den.descending(), (std::vector<double>{1.0, 160.0}));
  tf = parse_tf_expression("(3*50^2 s + 50^3)/(s+50)^3");
  EXPECT_EQ(tf.num.descending(), (std::vector<double>{7500.0, 125000.0}));
  EXPECT_EQ(tf.den.descending(), (std::vector<double>{1.0, 150.0, 7500.0, 125000.0}));
  tf = parse_tf_expression("2s/(s^2+1.4s+1)");
  EXPECT_EQ(tf.num.descending(), (std::vector<double>{2.0, 0.0}));
  tf = parse_tf_expression("-1/(-s-2)");
  EXPECT_GT(tf.den.leading(), 0.0);
  EXPECT_EQ(tf.num.descending(), (std::vector<double>{1.0}));
  tf = parse_tf_expression("s+1");
  EXPECT_EQ(tf.den.descending(), (std::vector<double>{1.0}));
  tf = parse_tf_expression("1e2/(s+1e2)");
  EXPECT_EQ(tf.num.descending(), (std::vector<double>{100.0}));
}

TEST(TfExpression, ReportsColumn) {
  for (const char* bad : {"1/(s+", "1/(s+160))", "s^-1", "1/x", "", "1/0"}) {
    try {
      parse_tf_expression(bad);
      ADD_FAILURE() << bad;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kParse) << bad;
    }
  }
  try {
    parse_tf_expression("1/(s+x)");
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("column 6"), std::string::npos) << e.what();
  }
}

TEST(ScenarioFile, ParsesAndRoundTrips) {
  const ScenarioFile f = parse_scenario(kScenario, "case.toml");
  EXPECT_EQ(f.name, "short");
  EXPECT_EQ(f.controller.kind, ControllerKind::kL1);
  EXPECT_EQ(f.controller.filter.kind, FilterSpec::Kind::kThirdOrder);
  EXPECT_DOUBLE_EQ(f.controller.gamma_c, 400.0);
  EXPECT_DOUBLE_EQ(f.scenario.reference.amplitude, 10.0);
  EXPECT_DOUBLE_EQ(f.plant.A(1, 1), -1.4);
  const ScenarioFile again = parse_scenario(to_toml(f), "again.toml");
  EXPECT_EQ(to_toml(again), to_toml(f));
  EXPECT_EQ(again.plant.A, f.plant.A);
}

TEST(ScenarioFile, PresetsRoundTripExactly) {
  for (const auto& id : {"fig4", "fig6", "fig8"}) {
    for (const ScenarioFile& run : make_preset(id).runs) {
      const ScenarioFile again = parse_scenario(to_toml(run), "preset.toml");
      EXPECT_EQ(again.plant.theta.offset, run.plant.theta.offset);
      ASSERT_EQ(again.plant.theta.terms.size(), run.plant.theta.terms.size());
      for (std::size_t i = 0; i < run.plant.theta.terms.size(); ++i)
        for (std::size_t k = 0; k < run.plant.theta.terms[i].size(); ++k)
          EXPECT_EQ(again.plant.theta.terms[i][k].frequency, run.plant.theta.terms[i][k].frequency);
      EXPECT_EQ(to_toml(again), to_toml(run));
    }
  }
}

TEST(ScenarioFile, ErrorsAreLineAnchored) {
  EXPECT_NE(parse_error(with_line(kScenario, "gamma_c = 400", "gamma_c = -1")).find("case.toml:14:"),
            std::string::npos);
  EXPECT_NE(parse_error(with_line(kScenario, "omega = 50", "omega = -50")).find("case.toml:13:"),
            std::string::npos);
  EXPECT_NE(parse_error(with_line(kScenario, "value = [4, -4.5]", "value = [40, -4.5]"))
                .find("case.toml:3:"),
            std::string::npos);
  EXPECT_NE(parse_error(with_line(kScenario, "b = [0, 1]", "b = [0, 1, 2]")).find("case.toml:5:"),
            std::string::npos);
  EXPECT_NE(parse_error(with_line(kScenario, "x0 = [0, 0]", "x0 = [0]")).find("case.toml:20:"),
            std::string::npos);
  EXPECT_NE(parse_error(with_line(kScenario, "horizon = 0.5", "horizon = [")).find("case.toml:"),
            std::string::npos);
  EXPECT_NE(parse_error(with_line(kScenario, "architecture = \"l1\"", "architecture = \"pid\""))
                .find("case.toml:11:"),
            std::string::npos);
  EXPECT_NE(parse_error(with_line(kScenario, "prefix = \"short\"", "series = [\"bogus\"]"))
                .find("unknown series"),
            std::string::npos);
  EXPECT_NE(parse_error(with_line(kScenario, "[scenario]", "[scenarios]")).find("[scenario]"),
            std::string::npos);
}

TEST(ScenarioFile, ExplicitFilterAndMrac) {
  ScenarioFile f = parse_scenario(
      with_line(kScenario, "{ kind = \"third_order\", omega = 50 }",
                "{ kind = \"explicit\", num = [100], den = [1, 100] }"),
      "case.toml");
  EXPECT_EQ(f.controller.filter.kind, FilterSpec::Kind::kExplicit);
  EXPECT_NO_THROW(build_controller(f));
  f = parse_scenario(with_line(kScenario, "architecture = \"l1\"", "architecture = \"mrac\""),
                     "case.toml");
  EXPECT_TRUE(build_controller(f).is_mrac());
}

TEST(Output, NumberFormatting) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(1e300 * 1e10), "inf");
}

TEST(Commands, L1GainOfTransferFunction) {
  const CliRun r = run({"l1gain", "--tf", "1/(s+160)"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NEAR(std::stod(r.out), 0.00625, 0.00625 * 1e-6);
  const CliRun unstable = run({"l1gain", "--tf", "1/(s-1)"});
  EXPECT_EQ(unstable.code, 2);
  EXPECT_NE(unstable.err.find("not stable"), std::string::npos);
  EXPECT_EQ(run({"l1gain", "--tf", "s^2/(s+1)"}).code, 2);
  EXPECT_EQ(run({"l1gain"}).code, 2);
}

TEST(Commands, L1GainOfPresetSystem) {
  const CliRun r = run({"l1gain", "--preset", "fig4", "--system", "gbar"});
  ASSERT_EQ(r.code, 0);
  EXPECT_NEAR(std::stod(r.out), 0.014739501553848207, 1e-8);
  EXPECT_EQ(run({"l1gain", "--preset", "fig4", "--system", "nope"}).code, 2);
}

TEST(Commands, DesignVerdicts) {
  const CliRun ok = run({"design", "--preset", "fig4", "--omega", "100,200"});
  EXPECT_EQ(ok.code, 0);
  EXPECT_NE(ok.out.find("feasible"), std::string::npos);
  EXPECT_EQ(ok.out.rfind("omega,lambda\n", 0), 0u);
  const CliRun bad = run({"design", "--preset", "fig4", "--filter-omega", "10", "--omega", "10"});
  EXPECT_EQ(bad.code, 3);
  EXPECT_NE(bad.out.find("λ ≥ 1: infeasible"), std::string::npos);
}

TEST(Commands, MarginRowsAndValidation) {
  const CliRun one = run({"margin", "--gamma", "100"});
  ASSERT_EQ(one.code, 0);
  EXPECT_EQ(one.out.substr(0, one.out.find('\n')), "gamma,tau_mrac,tau_l1");
  EXPECT_EQ(std::count(one.out.begin(), one.out.end(), '\n'), 2);
  EXPECT_EQ(run({"margin", "--gamma", "-5"}).code, 2);
  EXPECT_EQ(run({"margin", "--gamma", "0"}).code, 2);
  EXPECT_EQ(run({"margin", "--gamma", "10", "--filter", "1/(s+"}).code, 2);
}

TEST(Commands, SimulateIsDeterministic) {
  const fs::path dir = scratch_dir("sim");
  const fs::path scenario = dir / "short.toml";
  std::ofstream(scenario) << kScenario;
  const CliRun a = run({"simulate", scenario.string(), "--output-dir", (dir / "a").string()});
  const CliRun b = run({"simulate", scenario.string(), "--output-dir", (dir / "b").string()});
  ASSERT_EQ(a.code, 0) << a.err;
  ASSERT_EQ(b.code, 0) << b.err;
  const std::string csv = read_file(dir / "a" / "short.csv");
  EXPECT_EQ(csv, read_file(dir / "b" / "short.csv"));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "t,x1,x2,xhat1,xhat2,thetahat1,thetahat2,u,y,xref1,xref2,uref,yref,ydes,udes");
  EXPECT_TRUE(fs::exists(dir / "a" / "short_bounds.json"));
  // Half a second is too short to settle, so only the error bounds are expected to hold.
  const auto bounds = nlohmann::json::parse(read_file(dir / "a" / "short_bounds.json"));
  EXPECT_FALSE(bounds.at("all_passed").get<bool>());
  int checked = 0;
  for (const auto& check : bounds.at("checks")) {
    const std::string name = check.at("name");
    if (name == "state_error" || name == "control_error" || name == "prediction_error") {
      EXPECT_TRUE(check.at("passed").get<bool>()) << name;
      ++checked;
    }
  }
  EXPECT_EQ(checked, 3);
}

TEST(Commands, SimulateExitCodes) {
  const fs::path dir = scratch_dir("codes");
  const fs::path infeasible = dir / "infeasible.toml";
  std::ofstream(infeasible) << with_line(kScenario, "omega = 50", "omega = 5");
  EXPECT_EQ(run({"simulate", infeasible.string(), "--output-dir", dir.string()}).code, 3);
  const fs::path broken = dir / "broken.toml";
  std::ofstream(broken) << with_line(kScenario, "gamma_c = 400", "gamma_c = \"fast\"");
  const CliRun r = run({"simulate", broken.string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("broken.toml:14:"), std::string::npos) << r.err;
  EXPECT_EQ(run({"simulate", (dir / "missing.toml").string()}).code, 2);

  const fs::path diverging = dir / "diverging.toml";
  std::ofstream(diverging) << R"([plant]
A = [[1]]
b = [1]
c = [1]
omega_box = [[-2, 2]]
theta = { kind = "constant", value = [1] }
[controller]
architecture = "highgain"
k = 50
[scenario]
horizon = 30
input_delay = 0.2
reference = { kind = "step", amplitude = 1 }
)";
  EXPECT_EQ(run({"simulate", diverging.string(), "--output-dir", dir.string()}).code, 4);
}

TEST(Commands, ReproRefusesSilentOverrides) {
  const CliRun r = run({"repro", "fig4", "--horizon", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("--deviate"), std::string::npos);
  EXPECT_EQ(run({"repro", "fig99"}).code, 2);
  const CliRun dump = run({"repro", "fig7", "--dump-scenario"});
  ASSERT_EQ(dump.code, 0);
  EXPECT_NE(dump.out.find("omega = 50.0"), std::string::npos);
  EXPECT_NE(dump.out.find("gamma_c = 400.0"), std::string::npos);
  const CliRun list = run({"repro", "list"});
  EXPECT_NE(list.out.find("lambda-third"), std::string::npos);
}

TEST(Commands, ReproDeviationRuns) {
  const fs::path dir = scratch_dir("repro");
  const CliRun r = run({"repro", "fig7", "--deviate", "--horizon", "0.2", "--output-dir", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"fig7_r25.csv", "fig7_r100.csv", "fig7_r400.csv"})
    EXPECT_TRUE(fs::exists(dir / name)) << name;
}

TEST(Commands, HelpAndUnknownCommand) {
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({}).code, 2);
}

TEST(Commands, OmittedColumnsAreAnnounced) {
  SimTrace tr;
  tr.t = {0.0};
  tr.x = {Eigen::VectorXd::Zero(1)};
  tr.u = {0.0};
  tr.y = {0.0};
  tr.r = {1.0};
  std::ostringstream out;
  write_trace_csv(out, tr);
  EXPECT_EQ(out.str(), "# omitted: xhat,thetahat,xref,uref,yref,ydes,udes\nt,x1,u,y\n0,0,0,0\n");
}
