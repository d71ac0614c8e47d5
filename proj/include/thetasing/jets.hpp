#pragma once

#include <map>
#include <optional>
#include <vector>

#include "thetasing/local_function.hpp"
#include "thetasing/polynomial.hpp"
#include "thetasing/rational.hpp"

namespace thetasing {

/// Exponent vector (h_1, ..., h_k) of the commuting monomial D_1^h_1 ... D_k^h_k.
using FieldMonomial = std::vector<int>;
/// Rational combination of field monomials; every key has length k.
using JetTerms = std::map<FieldMonomial, Rational>;

inline constexpr int kMaxJetOrder = 12;

/// The operators Delta^(0..N); Delta^(0) is the identity.
struct JetOperator {
  int order = 0;
  std::vector<JetTerms> terms;
};

/// Delta^(k) from its closed form: all h with h_1 + 2 h_2 + ... + k h_k = k, coefficient 1 / prod h_i!.
JetTerms delta_expand(int k);

/// Delta^(k) from the graded recursion i D^(k)_i = sum_j D_j D^(k-j)_{i-1}.
JetTerms delta_recursive(int k);

JetOperator build_jet_operator(int order);

/// Applies a field monomial combination to a polynomial with D_i = sum_l fields[i-1][l] d_l.
QPolynomial apply_jet_terms(const JetTerms& terms, const std::vector<std::vector<Rational>>& fields,
                            const QPolynomial& f);

/// Checks Delta^(k)(f g) = sum_r Delta^(r) f Delta^(k-r) g exactly. The operator table
/// (entry r = Delta^(r)) defaults to the closed form and can be replaced to test corruption.
bool leibniz_check(int k, const QPolynomial& f, const QPolynomial& g,
                   const std::vector<std::vector<Rational>>& fields,
                   const std::vector<JetTerms>* table = nullptr);

struct ReparametrizeResult {
  std::vector<CVector> literal;    // D'_i = sum_j c_j^(i-j+1) D_j, read literally
  std::vector<CVector> composed;   // D'_k = sum_i [t^k] phi(t)^i D_i
  double discrepancy = 0.0;        // max_i |literal_i - composed_i|
  double literal_series_error = 0.0;   // mismatch against exp(sum_i d_i phi(t)^i)
  double composed_series_error = 0.0;
};

/// Reparametrizes the curvi-linear jet along t -> c_1 t + ... + c_N t^N.
ReparametrizeResult reparametrize(const std::vector<CVector>& fields, const std::vector<cplx>& c);

struct ResidualReport {
  std::vector<CVector> vectors;
  std::vector<double> raw;
  std::vector<double> normalized;  // divided by max(1, |M|_F)
};

/// Order-k containment residual |(d_j Delta^(k) f(z0))_j| for k = 1..N.
ResidualReport curvilinear_residuals(const LocalFunction& f, const CVector& z0, const std::vector<CVector>& fields);

/// |b . d_b^j M| for j = 0..N-1 (all fields equal to b).
ResidualReport constant_field_residuals(const LocalFunction& f, const CVector& z0, const CVector& b, int n);

struct JetExtension {
  CVector eta;
  double residual = 0.0;  // normalized like curvilinear_residuals
};

/// Solves the order-(k+1) condition M eta = -(lower-order terms) for the next field.
std::optional<JetExtension> jet_extend(const LocalFunction& f, const CVector& z0, const std::vector<CVector>& fields,
                                       double tol = 1e-8);

/// Delta^(k) with D_i replaced by the constant-coefficient operator sum_l fields[i][l] d_l.
CPolynomial delta_symbol(const JetTerms& terms, const std::vector<CVector>& fields);

}  // namespace thetasing
