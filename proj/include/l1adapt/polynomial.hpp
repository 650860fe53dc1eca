#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace l1adapt {

/// Real polynomial in s, stored in ascending powers: coeffs()[k] multiplies s^k.
/// Trailing (highest-power) zeros are stripped on construction; the zero
/// polynomial is the single coefficient {0}.
class Polynomial {
 public:
  Polynomial() : coeffs_{0.0} {}
  explicit Polynomial(std::vector<double> ascending);
  Polynomial(std::initializer_list<double> ascending)
      : Polynomial(std::vector<double>(ascending)) {}

  static Polynomial constant(double c) { return Polynomial({c}); }
  static Polynomial s() { return Polynomial({0.0, 1.0}); }
  /// Builds from descending-power coefficients, the usual num/den notation.
  static Polynomial from_descending(const std::vector<double>& descending);
  /// Monic polynomial with the given roots (complex roots must come in
  /// conjugate pairs; imaginary residue is discarded).
  static Polynomial from_roots(const std::vector<std::complex<double>>& roots);

  const std::vector<double>& coeffs() const { return coeffs_; }
  std::vector<double> descending() const;
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  double leading() const { return coeffs_.back(); }
  double operator[](int k) const;
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == 0.0; }

  double operator()(double s) const;
  std::complex<double> operator()(std::complex<double> s) const;

  /// Roots via eigenvalues of the companion matrix.
  std::vector<std::complex<double>> roots() const;
  /// True when every root has real part < -margin.
  bool is_hurwitz(double margin = 1e-9) const;

  Polynomial pow(int k) const;
  Polynomial derivative() const;

  Polynomial& operator+=(const Polynomial& o);
  Polynomial& operator-=(const Polynomial& o);
  Polynomial& operator*=(const Polynomial& o);
  Polynomial& operator*=(double k);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const Polynomial& b) { return a *= b; }
  friend Polynomial operator*(Polynomial a, double k) { return a *= k; }
  friend Polynomial operator*(double k, Polynomial a) { return a *= k; }
  friend Polynomial operator-(Polynomial a) { return a *= -1.0; }
  friend bool operator==(const Polynomial& a, const Polynomial& b) {
    return a.coeffs_ == b.coeffs_;
  }

 private:
  void trim();
  std::vector<double> coeffs_;
};

}  // namespace l1adapt
