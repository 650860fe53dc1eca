#pragma once

#include <complex>
#include <vector>

#include "l1adapt/controllers.hpp"
#include "l1adapt/polynomial.hpp"

namespace l1adapt {

/// Loop with an input delay: L(s; tau) = delayed(s) e^{-s tau} + undelayed(s).
/// The closed loop is 1 + L = 0.
struct DelayLoop {
  TransferFunction delayed;
  TransferFunction undelayed{Polynomial{0.0}, Polynomial{1.0}};

  std::complex<double> operator()(double omega, double tau) const;
  /// Characteristic polynomial of 1 + L at tau = 0.
  Polynomial characteristic() const;
};

/// (-k s + Gamma) / (s (s - 1)) e^{-s tau}. k is the signed loop coefficient.
DelayLoop mrac_loop(double gamma, double k);
/// -k/(s - 1) e^{-s tau} + Gamma C(s)/(s^2 - a_m s + Gamma) (e^{-s tau} - 1).
DelayLoop l1_loop(double gamma, double k, double a_m, const TransferFunction& filter);

std::complex<double> open_loop_mrac(double gamma, double k, double omega, double tau);
std::complex<double> open_loop_l1(double gamma, double k, double a_m, const TransferFunction& filter,
                                  double tau, double omega);

struct MarginOptions {
  double tau_max = 10.0;
  double omega_min = 1e-3;
  double omega_max = 1e5;
  int grid_points = 600;
  /// Relative bracket width at which the crossing-frequency bisection stops.
  double omega_tol = 1e-12;
};

struct MarginResult {
  double tau = 0.0;  // tau_max when no crossing was found below it
  bool found = false;
  double crossover_frequency = 0.0;
};

/// Smallest delay at which a closed-loop root reaches the imaginary axis.
/// Throws kUnstable when the loop is unstable at tau = 0.
MarginResult time_delay_margin(const DelayLoop& loop, const MarginOptions& options = {});

/// Default loop parameters: k = -2, a_m = -1, C(s) = 1/(s+1).
struct MarginParams {
  double k = -2.0;
  double a_m = -1.0;
  TransferFunction filter{Polynomial{1.0}, Polynomial{1.0, 1.0}};
};

struct MarginCurve {
  std::vector<double> gamma_values;
  std::vector<MarginResult> mrac;
  std::vector<MarginResult> l1;
  MarginParams params;
};

MarginCurve margin_curve(const std::vector<double>& gamma_grid, const MarginParams& params = {},
                         const MarginOptions& options = {});

}  // namespace l1adapt
