#pragma once

#include <map>
#include <vector>

#include "thetasing/multi_index.hpp"
#include "thetasing/rational.hpp"

namespace thetasing {

namespace detail {
inline bool is_zero(const Rational& q) { return sgn(q) == 0; }
inline bool is_zero(const cplx& c) { return c == cplx{0.0, 0.0}; }
}  // namespace detail

/// Sparse multivariate polynomial in g commuting variables.
template <class T>
class Polynomial {
 public:
  using Terms = std::map<MultiIndex, T>;

  Polynomial() = default;
  explicit Polynomial(int g) : g_(g) {}

  static Polynomial constant(int g, const T& c) {
    Polynomial p(g);
    p.add_term(MultiIndex(g), c);
    return p;
  }

  static Polynomial variable(int g, int i) {
    Polynomial p(g);
    p.add_term(MultiIndex::unit(g, i), T(1));
    return p;
  }

  static Polynomial monomial(const MultiIndex& m, const T& c) {
    Polynomial p(m.dim());
    p.add_term(m, c);
    return p;
  }

  /// Linear form sum_l coeffs[l] x_l.
  static Polynomial linear(const std::vector<T>& coeffs) {
    const int g = static_cast<int>(coeffs.size());
    Polynomial p(g);
    for (int l = 0; l < g; ++l) p.add_term(MultiIndex::unit(g, l), coeffs[static_cast<std::size_t>(l)]);
    return p;
  }

  int dim() const { return g_; }
  const Terms& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  int degree() const {
    int d = -1;
    for (const auto& [m, c] : terms_) d = std::max(d, m.length());
    return d;
  }

  T coefficient(const MultiIndex& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? T(0) : it->second;
  }

  void add_term(const MultiIndex& m, const T& c) {
    if (detail::is_zero(c)) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (detail::is_zero(it->second)) terms_.erase(it);
    }
  }

  Polynomial& operator+=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Polynomial& operator-=(const Polynomial& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, T(-c));
    return *this;
  }
  Polynomial& operator*=(const T& s) {
    if (detail::is_zero(s)) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, const T& s) { return a *= s; }

  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    Polynomial out(a.g_ > 0 ? a.g_ : b.g_);
    for (const auto& [ma, ca] : a.terms_) {
      for (const auto& [mb, cb] : b.terms_) out.add_term(ma + mb, T(ca * cb));
    }
    return out;
  }

  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

  Polynomial derivative(int i) const {
    Polynomial out(g_);
    for (const auto& [m, c] : terms_) {
      const int e = m[i];
      if (e == 0) continue;
      std::vector<int> ent = m.entries();
      --ent[static_cast<std::size_t>(i)];
      out.add_term(MultiIndex(std::move(ent)), T(c * T(e)));
    }
    return out;
  }

  Polynomial derivative(const MultiIndex& index) const {
    Polynomial out = *this;
    for (int i = 0; i < index.dim(); ++i) {
      for (int k = 0; k < index[i]; ++k) out = out.derivative(i);
    }
    return out;
  }

  /// Directional derivative sum_l v_l d_l.
  Polynomial directional(const std::vector<T>& v) const {
    Polynomial out(g_);
    for (int l = 0; l < g_; ++l) {
      if (detail::is_zero(v[static_cast<std::size_t>(l)])) continue;
      out += derivative(l) * v[static_cast<std::size_t>(l)];
    }
    return out;
  }

  /// Value at a point; V must accept multiplication by T converted through V(T).
  template <class V, class Convert>
  V evaluate(const std::vector<V>& point, Convert convert) const {
    V sum{};
    for (const auto& [m, c] : terms_) {
      V term = convert(c);
      for (int l = 0; l < g_; ++l) {
        for (int k = 0; k < m[l]; ++k) term *= point[static_cast<std::size_t>(l)];
      }
      sum += term;
    }
    return sum;
  }

 private:
  int g_ = 0;
  Terms terms_;
};

using QPolynomial = Polynomial<Rational>;
using CPolynomial = Polynomial<cplx>;

inline CPolynomial to_complex(const QPolynomial& p) {
  CPolynomial out(p.dim());
  for (const auto& [m, c] : p.terms()) out.add_term(m, cplx(c.get_d(), 0.0));
  return out;
}

}  // namespace thetasing
