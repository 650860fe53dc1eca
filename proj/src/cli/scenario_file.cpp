#include "l1adapt/cli/scenario_file.hpp"

#include <toml.hpp>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numbers>
#include <sstream>

#include "l1adapt/error.hpp"

namespace l1adapt::cli {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

class Reader {
 public:
  explicit Reader(std::string source) : source_(std::move(source)) {}

  [[noreturn]] void error(const toml::node* at, const std::string& what) const {
    const auto line = at ? at->source().begin.line : 0;
    fail(ErrorKind::kParse, source_ + ":" + std::to_string(line) + ": " + what);
  }

  const toml::table& table(const toml::table& parent, const std::string& key,
                           const std::string& path) const {
    const toml::node* node = parent.get(key);
    if (!node) error(&parent, "missing table [" + path + "]");
    if (!node->is_table()) error(node, path + ": expected a table");
    return *node->as_table();
  }

  const toml::node* get(const toml::table& parent, const std::string& key) const {
    return parent.get(key);
  }

  const toml::node& need(const toml::table& parent, const std::string& key,
                         const std::string& path) const {
    const toml::node* node = parent.get(key);
    if (!node) error(&parent, "missing key " + path);
    return *node;
  }

  double number(const toml::node& node, const std::string& path) const {
    if (auto v = node.value<double>()) return *v;
    error(&node, path + ": expected a number");
  }

  std::string string(const toml::node& node, const std::string& path) const {
    if (auto v = node.value<std::string>()) return *v;
    error(&node, path + ": expected a string");
  }

  VectorXd vector(const toml::node& node, const std::string& path) const {
    const toml::array* arr = node.as_array();
    if (!arr) error(&node, path + ": expected an array of numbers");
    VectorXd v(static_cast<Eigen::Index>(arr->size()));
    for (std::size_t i = 0; i < arr->size(); ++i)
      v(static_cast<Eigen::Index>(i)) = number(*arr->get(i), path + "[" + std::to_string(i) + "]");
    return v;
  }

  MatrixXd matrix(const toml::node& node, const std::string& path) const {
    const toml::array* rows = node.as_array();
    if (!rows || rows->empty()) error(&node, path + ": expected a nonempty array of rows");
    std::vector<VectorXd> parsed;
    for (std::size_t i = 0; i < rows->size(); ++i)
      parsed.push_back(vector(*rows->get(i), path + "[" + std::to_string(i) + "]"));
    const auto cols = parsed.front().size();
    MatrixXd m(static_cast<Eigen::Index>(parsed.size()), cols);
    for (std::size_t i = 0; i < parsed.size(); ++i) {
      if (parsed[i].size() != cols) error(rows->get(i), path + ": rows have different lengths");
      m.row(static_cast<Eigen::Index>(i)) = parsed[i].transpose();
    }
    return m;
  }

  // Runs a validation step, re-anchoring its error at `at`.
  template <class Fn>
  auto anchored(const toml::node* at, Fn fn) const {
    try {
      return fn();
    } catch (const Error& e) {
      error(at, e.what());
    }
  }

 private:
  std::string source_;
};

ThetaTrajectory parse_theta(const Reader& rd, const toml::node& node, int n) {
  const toml::table* t = node.as_table();
  if (!t) rd.error(&node, "plant.theta: expected a table with a kind");
  const std::string kind = rd.string(rd.need(*t, "kind", "plant.theta.kind"), "plant.theta.kind");
  if (kind == "constant") {
    const VectorXd v = rd.vector(rd.need(*t, "value", "plant.theta.value"), "plant.theta.value");
    if (v.size() != n) rd.error(t, "plant.theta.value: expected " + std::to_string(n) + " entries");
    return ThetaTrajectory::constant(v);
  }
  if (kind != "harmonic") rd.error(t, "plant.theta.kind: expected \"constant\" or \"harmonic\"");
  ThetaTrajectory traj;
  traj.offset = rd.vector(rd.need(*t, "offset", "plant.theta.offset"), "plant.theta.offset");
  if (traj.offset.size() != n)
    rd.error(t, "plant.theta.offset: expected " + std::to_string(n) + " entries");
  traj.terms.resize(static_cast<std::size_t>(n));
  if (const toml::node* terms_node = rd.get(*t, "terms")) {
    const toml::array* terms = terms_node->as_array();
    if (!terms || terms->size() != static_cast<std::size_t>(n))
      rd.error(terms_node, "plant.theta.terms: expected one list of terms per component");
    for (std::size_t i = 0; i < terms->size(); ++i) {
      const std::string path = "plant.theta.terms[" + std::to_string(i) + "]";
      const toml::array* list = terms->get(i)->as_array();
      if (!list) rd.error(terms->get(i), path + ": expected an array of {amplitude, frequency}");
      for (std::size_t k = 0; k < list->size(); ++k) {
        const toml::table* term = list->get(k)->as_table();
        if (!term) rd.error(list->get(k), path + ": expected {amplitude, frequency}");
        traj.terms[i].push_back(
            {rd.number(rd.need(*term, "amplitude", path + ".amplitude"), path + ".amplitude"),
             rd.number(rd.need(*term, "frequency", path + ".frequency"), path + ".frequency")});
      }
    }
  }
  return traj;
}

FilterSpec parse_filter(const Reader& rd, const toml::node& node) {
  const toml::table* t = node.as_table();
  if (!t) rd.error(&node, "controller.filter: expected a table with a kind");
  const std::string kind =
      rd.string(rd.need(*t, "kind", "controller.filter.kind"), "controller.filter.kind");
  auto omega = [&] {
    return rd.number(rd.need(*t, "omega", "controller.filter.omega"), "controller.filter.omega");
  };
  if (kind == "first_order") return FilterSpec::first_order(omega());
  if (kind == "third_order") return FilterSpec::third_order(omega());
  if (kind == "explicit") {
    auto coeffs = [&](const char* key) {
      const VectorXd v = rd.vector(rd.need(*t, key, std::string("controller.filter.") + key),
                                   std::string("controller.filter.") + key);
      return Polynomial::from_descending(std::vector<double>(v.data(), v.data() + v.size()));
    };
    return FilterSpec::explicit_tf(coeffs("num"), coeffs("den"));
  }
  rd.error(t, "controller.filter.kind: expected \"first_order\", \"third_order\" or \"explicit\"");
}

ReferenceSignal parse_reference(const Reader& rd, const toml::node& node) {
  const toml::table* t = node.as_table();
  if (!t) rd.error(&node, "scenario.reference: expected a table with a kind");
  const std::string kind =
      rd.string(rd.need(*t, "kind", "scenario.reference.kind"), "scenario.reference.kind");
  const double amplitude = rd.number(rd.need(*t, "amplitude", "scenario.reference.amplitude"),
                                     "scenario.reference.amplitude");
  if (kind == "step") return ReferenceSignal::step(amplitude);
  if (kind == "harmonic")
    return ReferenceSignal::harmonic(
        amplitude, rd.number(rd.need(*t, "frequency", "scenario.reference.frequency"),
                             "scenario.reference.frequency"));
  rd.error(t, "scenario.reference.kind: expected \"step\" or \"harmonic\"");
}

std::string fmt(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, end);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string fmt(const VectorXd& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + fmt(v(i));
  return s + "]";
}

std::string fmt(const MatrixXd& m) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    s += (i ? ", " : "") + fmt(VectorXd(m.row(i).transpose()));
  return s + "]";
}

std::string fmt(const Polynomial& p) {
  const auto d = p.descending();
  return fmt(VectorXd(Eigen::Map<const VectorXd>(d.data(), static_cast<Eigen::Index>(d.size()))));
}

}  // namespace

const std::vector<std::string>& known_series() {
  static const std::vector<std::string> names{"x",   "xhat", "thetahat", "u",    "y", "xref",
                                              "uref", "yref", "ydes",    "udes", "r", "V"};
  return names;
}

ScenarioFile parse_scenario(const std::string& text, const std::string& source_name) {
  toml::table root;
  try {
    root = toml::parse(text, source_name);
  } catch (const toml::parse_error& e) {
    fail(ErrorKind::kParse, source_name + ":" + std::to_string(e.source().begin.line) + ": " +
                                std::string(e.description()));
  }
  const Reader rd(source_name);
  ScenarioFile file;
  if (const toml::node* name = rd.get(root, "name")) file.name = rd.string(*name, "name");

  // [plant]
  const toml::table& plant = rd.table(root, "plant", "plant");
  PlantModel& pm = file.plant;
  pm.A = rd.matrix(rd.need(plant, "A", "plant.A"), "plant.A");
  const int n = static_cast<int>(pm.A.rows());
  if (pm.A.cols() != n) rd.error(plant.get("A"), "plant.A: must be square");
  pm.b = rd.vector(rd.need(plant, "b", "plant.b"), "plant.b");
  pm.c = rd.vector(rd.need(plant, "c", "plant.c"), "plant.c");
  if (pm.b.size() != n) rd.error(plant.get("b"), "plant.b: expected " + std::to_string(n) + " entries");
  if (pm.c.size() != n) rd.error(plant.get("c"), "plant.c: expected " + std::to_string(n) + " entries");
  const toml::node& box_node = rd.need(plant, "omega_box", "plant.omega_box");
  const MatrixXd box = rd.matrix(box_node, "plant.omega_box");
  if (box.rows() != n || box.cols() != 2)
    rd.error(&box_node, "plant.omega_box: expected " + std::to_string(n) + " rows of [lo, hi]");
  pm.omega_box = {box.col(0), box.col(1)};
  pm.theta = parse_theta(rd, rd.need(plant, "theta", "plant.theta"), n);
  rd.anchored(&plant, [&] { validate_plant(pm); });

  // [controller]
  const toml::table& ctl = rd.table(root, "controller", "controller");
  ControllerSpec& cs = file.controller;
  const toml::node& arch_node = rd.need(ctl, "architecture", "controller.architecture");
  const std::string arch = rd.string(arch_node, "controller.architecture");
  if (arch == "l1") {
    cs.kind = ControllerKind::kL1;
  } else if (arch == "mrac") {
    cs.kind = ControllerKind::kMrac;
  } else if (arch == "highgain") {
    cs.kind = ControllerKind::kHighGain;
  } else {
    rd.error(&arch_node, "controller.architecture: expected \"l1\", \"mrac\" or \"highgain\"");
  }
  if (cs.kind == ControllerKind::kHighGain) {
    cs.highgain_k = rd.number(rd.need(ctl, "k", "controller.k"), "controller.k");
    rd.anchored(&ctl, [&] { build_highgain(pm, cs.highgain_k); });
  } else {
    const toml::node* K = rd.get(ctl, "K");
    cs.K = K ? rd.vector(*K, "controller.K") : VectorXd::Zero(n);
    if (cs.K.size() != n) rd.error(K, "controller.K: expected " + std::to_string(n) + " entries");
    const toml::node* Q = rd.get(ctl, "Q");
    cs.Q = Q ? rd.matrix(*Q, "controller.Q") : MatrixXd::Identity(n, n);
    cs.gamma_c = rd.number(rd.need(ctl, "gamma_c", "controller.gamma_c"), "controller.gamma_c");
    if (!(cs.gamma_c > 0.0)) rd.error(ctl.get("gamma_c"), "controller.gamma_c: must be positive");
    if (cs.kind == ControllerKind::kL1) {
      const toml::node& filter_node = rd.need(ctl, "filter", "controller.filter");
      cs.filter = parse_filter(rd, filter_node);
      rd.anchored(&filter_node, [&] { make_filter(cs.filter); });
    } else
      cs.filter = FilterSpec::identity();
    rd.anchored(&ctl, [&] { build_controller(file); });
  }

  // [scenario]
  const toml::table& sc = rd.table(root, "scenario", "scenario");
  SimScenario& s = file.scenario;
  s.horizon = rd.number(rd.need(sc, "horizon", "scenario.horizon"), "scenario.horizon");
  if (!(s.horizon > 0.0)) rd.error(sc.get("horizon"), "scenario.horizon: must be positive");
  if (const toml::node* dt = rd.get(sc, "dt")) {
    s.dt = rd.number(*dt, "scenario.dt");
    if (s.dt < 0.0) rd.error(dt, "scenario.dt: must be nonnegative (0 selects the default)");
    if (s.dt > 0.0) {
      const double steps = s.horizon / s.dt;
      if (std::abs(steps - std::round(steps)) > 1e-6 * std::max(1.0, steps))
        rd.error(dt, "scenario.dt: horizon must be an integer multiple of dt");
    }
  }
  s.reference = parse_reference(rd, rd.need(sc, "reference", "scenario.reference"));
  if (const toml::node* d = rd.get(sc, "input_delay")) {
    s.input_delay = rd.number(*d, "scenario.input_delay");
    if (s.input_delay < 0.0) rd.error(d, "scenario.input_delay: must be nonnegative");
  }
  if (const toml::node* x0 = rd.get(sc, "x0")) {
    s.x0 = rd.vector(*x0, "scenario.x0");
    if (s.x0.size() != n) rd.error(x0, "scenario.x0: expected " + std::to_string(n) + " entries");
  } else {
    s.x0 = VectorXd::Zero(n);
  }
  if (const toml::node* th = rd.get(sc, "theta_hat0")) {
    const VectorXd v = rd.vector(*th, "scenario.theta_hat0");
    if (v.size() != n || !pm.omega_box.contains(v))
      rd.error(th, "scenario.theta_hat0: must have " + std::to_string(n) +
                       " entries inside plant.omega_box");
    s.theta_hat0 = v;
  }
  if (const toml::node* ri = rd.get(sc, "record_interval")) {
    s.record_interval = rd.number(*ri, "scenario.record_interval");
    if (s.record_interval < 0.0) rd.error(ri, "scenario.record_interval: must be nonnegative");
  }
  if (const toml::node* st = rd.get(sc, "settle_time"))
    s.settle_time = rd.number(*st, "scenario.settle_time");

  // [outputs]
  if (const toml::node* out_node = rd.get(root, "outputs")) {
    const toml::table* out = out_node->as_table();
    if (!out) rd.error(out_node, "outputs: expected a table");
    if (const toml::node* d = rd.get(*out, "directory"))
      file.outputs.directory = rd.string(*d, "outputs.directory");
    if (const toml::node* p = rd.get(*out, "prefix"))
      file.outputs.prefix = rd.string(*p, "outputs.prefix");
    if (const toml::node* series = rd.get(*out, "series")) {
      const toml::array* arr = series->as_array();
      if (!arr) rd.error(series, "outputs.series: expected an array of names");
      for (std::size_t i = 0; i < arr->size(); ++i) {
        const std::string name = rd.string(*arr->get(i), "outputs.series");
        const auto& known = known_series();
        if (std::find(known.begin(), known.end(), name) == known.end())
          rd.error(arr->get(i), "outputs.series: unknown series \"" + name + "\"");
        file.outputs.series.push_back(name);
      }
    }
  }
  return file;
}

ScenarioFile load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::kParse, path + ": cannot open scenario file");
  std::ostringstream text;
  text << in.rdbuf();
  return parse_scenario(text.str(), path);
}

std::string to_toml(const ScenarioFile& file) {
  std::ostringstream o;
  if (!file.name.empty()) o << "name = \"" << file.name << "\"\n\n";
  const PlantModel& p = file.plant;
  o << "[plant]\n";
  o << "A = " << fmt(p.A) << "\n";
  o << "b = " << fmt(p.b) << "\n";
  o << "c = " << fmt(p.c) << "\n";
  MatrixXd box(p.omega_box.size(), 2);
  box << p.omega_box.lo, p.omega_box.hi;
  o << "omega_box = " << fmt(box) << "\n";
  if (p.theta.is_constant()) {
    o << "theta = { kind = \"constant\", value = " << fmt(eval_theta(p.theta, 0.0).theta) << " }\n";
  } else {
    o << "theta = { kind = \"harmonic\", offset = " << fmt(p.theta.offset) << ", terms = [";
    for (std::size_t i = 0; i < p.theta.terms.size(); ++i) {
      o << (i ? ", " : "") << "[";
      for (std::size_t k = 0; k < p.theta.terms[i].size(); ++k)
        o << (k ? ", " : "") << "{ amplitude = " << fmt(p.theta.terms[i][k].amplitude)
          << ", frequency = " << fmt(p.theta.terms[i][k].frequency) << " }";
      o << "]";
    }
    o << "] }\n";
  }

  const ControllerSpec& c = file.controller;
  o << "\n[controller]\n";
  if (c.kind == ControllerKind::kHighGain) {
    o << "architecture = \"highgain\"\nk = " << fmt(c.highgain_k) << "\n";
  } else {
    o << "architecture = \"" << (c.kind == ControllerKind::kL1 ? "l1" : "mrac") << "\"\n";
    o << "K = " << fmt(c.K) << "\n";
    if (c.kind == ControllerKind::kL1) {
      switch (c.filter.kind) {
        case FilterSpec::Kind::kFirstOrder:
          o << "filter = { kind = \"first_order\", omega = " << fmt(c.filter.omega) << " }\n";
          break;
        case FilterSpec::Kind::kThirdOrder:
          o << "filter = { kind = \"third_order\", omega = " << fmt(c.filter.omega) << " }\n";
          break;
        default:
          o << "filter = { kind = \"explicit\", num = " << fmt(c.filter.num)
            << ", den = " << fmt(c.filter.den) << " }\n";
      }
    }
    o << "gamma_c = " << fmt(c.gamma_c) << "\n";
    o << "Q = " << fmt(c.Q) << "\n";
  }

  const SimScenario& s = file.scenario;
  o << "\n[scenario]\n";
  o << "horizon = " << fmt(s.horizon) << "\n";
  o << "dt = " << fmt(s.dt) << "\n";
  if (s.reference.kind == ReferenceSignal::Kind::kStep)
    o << "reference = { kind = \"step\", amplitude = " << fmt(s.reference.amplitude) << " }\n";
  else
    o << "reference = { kind = \"harmonic\", amplitude = " << fmt(s.reference.amplitude)
      << ", frequency = " << fmt(s.reference.frequency) << " }\n";
  o << "input_delay = " << fmt(s.input_delay) << "\n";
  o << "x0 = " << fmt(s.x0) << "\n";
  if (s.theta_hat0) o << "theta_hat0 = " << fmt(*s.theta_hat0) << "\n";
  o << "record_interval = " << fmt(s.record_interval) << "\n";
  o << "settle_time = " << fmt(s.settle_time) << "\n";

  o << "\n[outputs]\n";
  o << "directory = \"" << file.outputs.directory << "\"\n";
  o << "prefix = \"" << file.outputs.prefix << "\"\n";
  if (!file.outputs.series.empty()) {
    o << "series = [";
    for (std::size_t i = 0; i < file.outputs.series.size(); ++i)
      o << (i ? ", " : "") << "\"" << file.outputs.series[i] << "\"";
    o << "]\n";
  }
  return o.str();
}

L1Config build_controller(const ScenarioFile& file) {
  const ControllerSpec& c = file.controller;
  require(c.kind != ControllerKind::kHighGain, ErrorKind::kInvalidArgument,
          "build_controller: high-gain scenarios have no adaptive controller");
  if (c.kind == ControllerKind::kMrac) return build_mrac(file.plant, c.K, c.gamma_c, c.Q);
  return build_l1(file.plant, c.K, c.filter, c.gamma_c, c.Q);
}

}  // namespace l1adapt::cli
