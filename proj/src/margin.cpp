#include "l1adapt/margin.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "l1adapt/error.hpp"
#include "l1adapt/parallel.hpp"

namespace l1adapt {

namespace {

using cd = std::complex<double>;

cd eval_tf(const TransferFunction& tf, cd s) { return tf.num(s) / tf.den(s); }

// Dense samples around lightly damped poles and zeros, where the gain curves
// can change quickly between coarse grid points.
void add_resonance_points(const Polynomial& p, const MarginOptions& o, std::vector<double>& grid) {
  if (p.degree() < 1) return;
  for (const cd& root : p.roots()) {
    const double center = std::abs(root.imag());
    const double width = std::max(std::abs(root.real()), 1e-9 * std::abs(root));
    if (center <= 0.0 || width >= 0.5 * center) continue;
    const double lo = std::max(o.omega_min, center - 20.0 * width);
    const double hi = std::min(o.omega_max, center + 20.0 * width);
    constexpr int kPoints = 400;
    for (int i = 0; i <= kPoints; ++i) grid.push_back(lo + (hi - lo) * i / kPoints);
  }
}

}  // namespace

cd DelayLoop::operator()(double omega, double tau) const {
  const cd s(0.0, omega);
  return eval_tf(delayed, s) * std::exp(-s * tau) + eval_tf(undelayed, s);
}

Polynomial DelayLoop::characteristic() const {
  return delayed.den * undelayed.den + delayed.num * undelayed.den + undelayed.num * delayed.den;
}

DelayLoop mrac_loop(double gamma, double k) {
  DelayLoop loop;
  loop.delayed = {Polynomial{gamma, -k}, Polynomial{0.0, -1.0, 1.0}};
  return loop;
}

DelayLoop l1_loop(double gamma, double k, double a_m, const TransferFunction& filter) {
  // Delayed part -k/(s-1) + Gamma C/D, undelayed part -Gamma C/D, D = s^2 - a_m s + Gamma.
  const Polynomial d{gamma, -a_m, 1.0};
  const Polynomial pole{-1.0, 1.0};
  DelayLoop loop;
  loop.delayed = {-k * filter.den * d + gamma * filter.num * pole, pole * filter.den * d};
  loop.undelayed = {-gamma * filter.num, filter.den * d};
  return loop;
}

cd open_loop_mrac(double gamma, double k, double omega, double tau) {
  return mrac_loop(gamma, k)(omega, tau);
}

cd open_loop_l1(double gamma, double k, double a_m, const TransferFunction& filter, double tau,
                double omega) {
  return l1_loop(gamma, k, a_m, filter)(omega, tau);
}

MarginResult time_delay_margin(const DelayLoop& loop, const MarginOptions& o) {
  require(o.tau_max > 0.0 && o.omega_min > 0.0 && o.omega_max > o.omega_min && o.grid_points >= 2,
          ErrorKind::kInvalidArgument, "time_delay_margin: invalid options");
  require(loop.characteristic().is_hurwitz(), ErrorKind::kUnstable,
          "time_delay_margin: closed loop is unstable without delay");

  std::vector<double> grid;
  const double ratio = std::log(o.omega_max / o.omega_min);
  for (int i = 0; i < o.grid_points; ++i)
    grid.push_back(o.omega_min * std::exp(ratio * i / (o.grid_points - 1)));
  for (const Polynomial* p : {&loop.delayed.num, &loop.delayed.den, &loop.undelayed.num,
                              &loop.undelayed.den})
    add_resonance_points(*p, o, grid);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  // Roots reach the axis where |delayed| = |1 + undelayed|.
  auto gap = [&](double w) {
    const cd s(0.0, w);
    return std::abs(eval_tf(loop.delayed, s)) - std::abs(1.0 + eval_tf(loop.undelayed, s));
  };

  MarginResult best{o.tau_max, false, 0.0};
  double prev_w = grid.front();
  double prev_gap = gap(prev_w);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double w = grid[i];
    const double g = gap(w);
    if ((prev_gap > 0.0) != (g > 0.0)) {
      double lo = prev_w, hi = w, glo = prev_gap;
      while (hi - lo > o.omega_tol * hi) {
        const double mid = std::sqrt(lo * hi);
        const double gm = gap(mid);
        if ((gm > 0.0) == (glo > 0.0)) {
          lo = mid;
          glo = gm;
        } else {
          hi = mid;
        }
      }
      const double wc = 0.5 * (lo + hi);
      const cd s(0.0, wc);
      const cd required = -(1.0 + eval_tf(loop.undelayed, s)) / eval_tf(loop.delayed, s);
      double phase = std::fmod(-std::arg(required), 2.0 * std::numbers::pi);
      if (phase <= 0.0) phase += 2.0 * std::numbers::pi;
      const double tau = phase / wc;
      if (tau <= o.tau_max && (!best.found || tau < best.tau)) best = {tau, true, wc};
    }
    prev_w = w;
    prev_gap = g;
  }
  return best;
}

MarginCurve margin_curve(const std::vector<double>& gamma_grid, const MarginParams& params,
                         const MarginOptions& options) {
  require(!gamma_grid.empty(), ErrorKind::kInvalidArgument, "margin_curve: empty grid");
  for (std::size_t i = 0; i < gamma_grid.size(); ++i) {
    require(gamma_grid[i] > 0.0, ErrorKind::kInvalidArgument,
            "margin_curve: adaptive gains must be positive");
    require(i == 0 || gamma_grid[i] > gamma_grid[i - 1], ErrorKind::kInvalidArgument,
            "margin_curve: grid must be ascending");
  }
  MarginCurve curve;
  curve.gamma_values = gamma_grid;
  curve.params = params;
  using Pair = std::pair<MarginResult, MarginResult>;
  const auto results = parallel_map<Pair>(gamma_grid.size(), [&](std::size_t i) {
    const double g = gamma_grid[i];
    return Pair{time_delay_margin(mrac_loop(g, params.k), options),
                time_delay_margin(l1_loop(g, params.k, params.a_m, params.filter), options)};
  });
  for (const auto& [m, l] : results) {
    curve.mrac.push_back(m);
    curve.l1.push_back(l);
  }
  return curve;
}

}  // namespace l1adapt
