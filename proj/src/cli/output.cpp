#include "l1adapt/cli/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>

namespace l1adapt::cli {

using nlohmann::json;

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
  return buf;
}

namespace {

struct Column {
  std::string header;
  std::function<double(std::size_t)> value;
};

bool selected(const std::vector<std::string>& series, const std::string& name) {
  if (series.empty()) return name != "r" && name != "V";
  return std::find(series.begin(), series.end(), name) != series.end();
}

void add_vector(std::vector<Column>& cols, const std::string& prefix,
                const std::vector<Eigen::VectorXd>& data, Eigen::Index n) {
  for (Eigen::Index i = 0; i < n; ++i)
    cols.push_back({prefix + std::to_string(i + 1),
                    [&data, i](std::size_t k) { return data[k](i); }});
}

void add_scalar(std::vector<Column>& cols, const std::string& name,
                const std::vector<double>& data) {
  cols.push_back({name, [&data](std::size_t k) { return data[k]; }});
}

json number_or_unbounded(double v) {
  if (std::isinf(v)) return "unbounded";
  if (std::isnan(v)) return nullptr;
  return v;
}

}  // namespace

void write_trace_csv(std::ostream& out, const SimTrace& trace,
                     const std::vector<std::string>& series) {
  const Eigen::Index n = trace.x.empty() ? 0 : trace.x.front().size();
  const Eigen::Index m = trace.theta_hat.empty() ? 0 : trace.theta_hat.front().size();
  std::vector<Column> cols;
  std::vector<std::string> omitted;
  add_scalar(cols, "t", trace.t);

  auto group = [&](const std::string& name, bool available, auto add) {
    if (!selected(series, name)) return;
    if (available)
      add();
    else
      omitted.push_back(name);
  };
  group("x", true, [&] { add_vector(cols, "x", trace.x, n); });
  group("xhat", !trace.x_hat.empty(), [&] { add_vector(cols, "xhat", trace.x_hat, n); });
  group("thetahat", !trace.theta_hat.empty(),
        [&] { add_vector(cols, "thetahat", trace.theta_hat, m); });
  group("u", true, [&] { add_scalar(cols, "u", trace.u); });
  group("y", true, [&] { add_scalar(cols, "y", trace.y); });
  group("xref", trace.has_reference, [&] { add_vector(cols, "xref", trace.x_ref, n); });
  group("uref", trace.has_reference, [&] { add_scalar(cols, "uref", trace.u_ref); });
  group("yref", trace.has_reference, [&] { add_scalar(cols, "yref", trace.y_ref); });
  group("ydes", trace.has_design, [&] { add_scalar(cols, "ydes", trace.y_des); });
  group("udes", trace.has_design, [&] { add_scalar(cols, "udes", trace.u_des); });
  group("r", true, [&] { add_scalar(cols, "r", trace.r); });
  group("V", trace.has_lyapunov, [&] { add_scalar(cols, "V", trace.V); });

  if (!omitted.empty()) {
    out << "# omitted:";
    for (std::size_t i = 0; i < omitted.size(); ++i) out << (i ? "," : " ") << omitted[i];
    out << "\n";
  }
  for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c].header;
  out << "\n";
  for (std::size_t k = 0; k < trace.t.size(); ++k) {
    for (std::size_t c = 0; c < cols.size(); ++c)
      out << (c ? "," : "") << format_number(cols[c].value(k));
    out << "\n";
  }
}

void write_lambda_csv(std::ostream& out, const LambdaSweep& sweep) {
  out << "omega,lambda\n";
  for (const auto& p : sweep.points)
    out << format_number(p.omega) << "," << format_number(p.lambda) << "\n";
}

void write_margin_csv(std::ostream& out, const MarginCurve& curve) {
  out << "gamma,tau_mrac,tau_l1\n";
  for (std::size_t i = 0; i < curve.gamma_values.size(); ++i) {
    auto tau = [](const MarginResult& m) {
      return m.found ? m.tau : std::numeric_limits<double>::infinity();
    };
    out << format_number(curve.gamma_values[i]) << "," << format_number(tau(curve.mrac[i])) << ","
        << format_number(tau(curve.l1[i])) << "\n";
  }
}

json bounds_report_json(const BoundsReport& report) {
  json j;
  j["lambda"] = report.lambda;
  j["gamma_c"] = report.gamma_c;
  j["time_varying"] = report.time_varying;
  j["mrac"] = report.mrac;
  j["constants"] = {{"theta_max", report.constants.theta_max},
                    {"theta_bar_max", report.constants.theta_bar_max},
                    {"theta_m", number_or_unbounded(report.constants.theta_m)},
                    {"d_theta", report.constants.d_theta}};
  const Gammas& g = report.gammas;
  j["gammas"] = {{"gamma1", number_or_unbounded(g.gamma1)},
                 {"gamma2", number_or_unbounded(g.gamma2)},
                 {"gamma3", number_or_unbounded(g.gamma3)},
                 {"gamma4", number_or_unbounded(g.gamma4)},
                 {"gamma1_lmax", number_or_unbounded(g.gamma1_lmax)},
                 {"gamma2_lmax", number_or_unbounded(g.gamma2_lmax)},
                 {"gamma3_lmax", number_or_unbounded(g.gamma3_lmax)},
                 {"gamma4_lmax", number_or_unbounded(g.gamma4_lmax)}};
  j["factors"] = {{"h2", number_or_unbounded(g.factors.h2)},
                  {"co_inverse", number_or_unbounded(g.factors.co_inverse)},
                  {"control_row", number_or_unbounded(g.factors.control_row)},
                  {"filter", number_or_unbounded(g.factors.filter)},
                  {"k_row", g.factors.k_row},
                  {"lambda_min_P", g.factors.lambda_min_P},
                  {"lambda_max_P", g.factors.lambda_max_P}};
  j["prediction_bound"] = number_or_unbounded(report.prediction_bound);
  j["state_bound"] = number_or_unbounded(report.state_bound());
  j["control_bound"] = number_or_unbounded(report.control_bound());
  j["output_bound"] = number_or_unbounded(report.output_bound());
  if (report.design) {
    const DesignBounds& d = *report.design;
    j["design"] = {{"output_lambda", number_or_unbounded(d.output_lambda)},
                   {"output_h3", number_or_unbounded(d.output_h3)},
                   {"control_lambda", number_or_unbounded(d.control_lambda)},
                   {"control_h3", number_or_unbounded(d.control_h3)},
                   {"h3_sup", number_or_unbounded(d.h3_sup)},
                   {"h3_via_h4", number_or_unbounded(d.h3_via_h4)},
                   {"h3_via_h5", number_or_unbounded(d.h3_via_h5)},
                   {"g_l1", number_or_unbounded(d.g_l1)}};
  }
  json checks = json::array();
  for (const BoundCheck& c : report.checks)
    checks.push_back({{"name", c.name},
                      {"bound", number_or_unbounded(c.bound)},
                      {"observed", number_or_unbounded(c.observed)},
                      {"passed", c.passed}});
  j["checks"] = checks;
  j["all_passed"] = report.all_passed();
  return j;
}

}  // namespace l1adapt::cli
