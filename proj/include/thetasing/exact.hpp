#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "thetasing/rational.hpp"

namespace thetasing {

/// Dense univariate polynomial over Q, coefficient k multiplies t^k. No trailing zeros.
class UPoly {
 public:
  UPoly() = default;
  explicit UPoly(std::vector<Rational> coeffs);
  static UPoly constant(const Rational& c);
  static UPoly monomial(const Rational& c, int k);

  int degree() const { return static_cast<int>(c_.size()) - 1; }  // -1 for zero
  bool is_zero() const { return c_.empty(); }
  Rational coeff(int k) const;
  const Rational& leading() const { return c_.back(); }
  const std::vector<Rational>& coeffs() const { return c_; }

  Rational evaluate(const Rational& t) const;
  UPoly derivative() const;
  UPoly monic() const;
  UPoly scaled(const Rational& s) const;

  UPoly operator+(const UPoly& o) const;
  UPoly operator-(const UPoly& o) const;
  UPoly operator-() const;
  UPoly operator*(const UPoly& o) const;
  bool operator==(const UPoly& o) const { return c_ == o.c_; }

  std::string to_string(const std::string& var = "t") const;

 private:
  void trim();
  std::vector<Rational> c_;
};

/// Quotient and remainder; throws InvalidInput on division by zero.
std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b);
/// Exact quotient; throws InvalidInput when b does not divide a.
UPoly exact_div(const UPoly& a, const UPoly& b);
/// Monic gcd (zero when both are zero).
UPoly gcd(const UPoly& a, const UPoly& b);
/// s, with s a = g mod m, for gcd(a, m) = 1. Throws InvalidInput otherwise.
UPoly inverse_mod(const UPoly& a, const UPoly& m);

/// Yun square-free decomposition: monic factors f_i with f = c * prod f_i^i, non-constant only.
std::vector<std::pair<UPoly, int>> square_free(const UPoly& f);

/// Distinct rational roots, by the rational root test on the integer-scaled polynomial.
std::vector<Rational> rational_roots(const UPoly& f);

/// Multiplicity of the factor h in f (h non-constant, f non-zero).
int multiplicity(const UPoly& f, const UPoly& h);

template <class T>
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<T> a;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * static_cast<std::size_t>(c)) {}
  T& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
  const T& operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }
};

using QMat = Mat<Rational>;
using PMat = Mat<UPoly>;
using QVec = std::vector<Rational>;
using PVec = std::vector<UPoly>;

QMat identity_q(int n);
QMat transpose(const QMat& m);
QMat operator*(const QMat& x, const QMat& y);
bool is_zero(const QMat& m);
bool is_symmetric(const QMat& m);

int rank(const QMat& m);
/// Basis of the right null space, one vector per free column of the reduced echelon form.
std::vector<QVec> kernel(const QMat& m);
Rational determinant(const QMat& m);

/// x + t y with polynomial entries.
PMat linear_pencil(const QMat& x, const QMat& y);
PMat submatrix(const PMat& m, const std::vector<int>& rows, const std::vector<int>& cols);
/// Bareiss fraction-free determinant over Q[t].
UPoly determinant(const PMat& m);
/// Rank over the field Q(t).
int rank(const PMat& m);
/// Polynomial basis of the null space over Q(t); each vector has coprime entries.
std::vector<PVec> kernel(const PMat& m);
QMat evaluate(const PMat& m, const Rational& t);

/// Monic gcd of the entries; dividing by it leaves a primitive vector.
UPoly content(const PVec& v);
PVec primitive(const PVec& v);

/// Rank of m over Q[t]/(f_j) for the coprime factors f_j of a square-free s. Splits s
/// whenever a pivot turns out to be a zero divisor, so each part is a field or a product
/// on which the rank is constant. Returns (factor, rank) pairs whose product is s.
std::vector<std::pair<UPoly, int>> rank_modulo(const PMat& m, const UPoly& s);

}  // namespace thetasing
