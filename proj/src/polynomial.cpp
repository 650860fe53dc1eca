#include "l1adapt/polynomial.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "l1adapt/error.hpp"

namespace l1adapt {

Polynomial::Polynomial(std::vector<double> ascending) : coeffs_(std::move(ascending)) {
  if (coeffs_.empty()) coeffs_.push_back(0.0);
  trim();
}

Polynomial Polynomial::from_descending(const std::vector<double>& descending) {
  return Polynomial(std::vector<double>(descending.rbegin(), descending.rend()));
}

Polynomial Polynomial::from_roots(const std::vector<std::complex<double>>& roots) {
  std::vector<std::complex<double>> c{1.0};
  for (const auto& r : roots) {
    std::vector<std::complex<double>> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= r * c[k];
    }
    c = std::move(next);
  }
  std::vector<double> re(c.size());
  std::transform(c.begin(), c.end(), re.begin(), [](auto z) { return z.real(); });
  return Polynomial(std::move(re));
}

std::vector<double> Polynomial::descending() const {
  return {coeffs_.rbegin(), coeffs_.rend()};
}

double Polynomial::operator[](int k) const {
  if (k < 0 || k > degree()) return 0.0;
  return coeffs_[static_cast<std::size_t>(k)];
}

void Polynomial::trim() {
  while (coeffs_.size() > 1 && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double Polynomial::operator()(double s) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

std::complex<double> Polynomial::operator()(std::complex<double> s) const {
  std::complex<double> acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * s + *it;
  return acc;
}

std::vector<std::complex<double>> Polynomial::roots() const {
  const int n = degree();
  if (n <= 0) return {};
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) companion(0, j) = -coeffs_[n - 1 - j] / leading();
  for (int i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
  const auto& ev = solver.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

bool Polynomial::is_hurwitz(double margin) const {
  require(!is_zero(), ErrorKind::kInvalidArgument, "zero polynomial has no roots");
  for (const auto& r : roots())
    if (!(r.real() < -margin)) return false;
  return true;
}

Polynomial Polynomial::pow(int k) const {
  require(k >= 0, ErrorKind::kInvalidArgument, "negative polynomial power");
  Polynomial out = constant(1.0);
  for (int i = 0; i < k; ++i) out *= *this;
  return out;
}

Polynomial Polynomial::derivative() const {
  if (degree() == 0) return {};
  std::vector<double> d(coeffs_.size() - 1);
  for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = static_cast<double>(k) * coeffs_[k];
  return Polynomial(std::move(d));
}

Polynomial& Polynomial::operator+=(const Polynomial& o) {
  coeffs_.resize(std::max(coeffs_.size(), o.coeffs_.size()), 0.0);
  for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& o) {
  coeffs_.resize(std::max(coeffs_.size(), o.coeffs_.size()), 0.0);
  for (std::size_t k = 0; k < o.coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& o) {
  std::vector<double> out(coeffs_.size() + o.coeffs_.size() - 1, 0.0);
  for (std::size_t i = 0; i < coeffs_.size(); ++i)
    for (std::size_t j = 0; j < o.coeffs_.size(); ++j) out[i + j] += coeffs_[i] * o.coeffs_[j];
  coeffs_ = std::move(out);
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(double k) {
  for (auto& c : coeffs_) c *= k;
  trim();
  return *this;
}

}  // namespace l1adapt
