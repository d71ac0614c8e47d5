#include "thetasing/exact.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include "thetasing/types.hpp"

namespace thetasing {

// ---------------------------------------------------------------- UPoly

UPoly::UPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) {
  for (Rational& q : c_) q.canonicalize();
  trim();
}

UPoly UPoly::constant(const Rational& c) { return UPoly(std::vector<Rational>{c}); }

UPoly UPoly::monomial(const Rational& c, int k) {
  std::vector<Rational> v(static_cast<std::size_t>(k) + 1, Rational(0));
  v.back() = c;
  return UPoly(std::move(v));
}

void UPoly::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

Rational UPoly::coeff(int k) const {
  return k >= 0 && k < static_cast<int>(c_.size()) ? c_[static_cast<std::size_t>(k)] : Rational(0);
}

Rational UPoly::evaluate(const Rational& t) const {
  Rational acc = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * t + *it;
  return acc;
}

UPoly UPoly::derivative() const {
  if (c_.size() <= 1) return {};
  std::vector<Rational> d(c_.size() - 1);
  for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = c_[k] * static_cast<long>(k);
  return UPoly(std::move(d));
}

UPoly UPoly::monic() const {
  if (is_zero()) return {};
  return scaled(1 / leading());
}

UPoly UPoly::scaled(const Rational& s) const {
  if (s == 0) return {};
  UPoly out = *this;
  for (Rational& q : out.c_) q *= s;
  return out;
}

UPoly UPoly::operator+(const UPoly& o) const {
  std::vector<Rational> r(std::max(c_.size(), o.c_.size()), Rational(0));
  for (std::size_t k = 0; k < c_.size(); ++k) r[k] += c_[k];
  for (std::size_t k = 0; k < o.c_.size(); ++k) r[k] += o.c_[k];
  return UPoly(std::move(r));
}

UPoly UPoly::operator-() const { return scaled(-1); }
UPoly UPoly::operator-(const UPoly& o) const { return *this + (-o); }

UPoly UPoly::operator*(const UPoly& o) const {
  if (is_zero() || o.is_zero()) return {};
  std::vector<Rational> r(c_.size() + o.c_.size() - 1, Rational(0));
  for (std::size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  }
  return UPoly(std::move(r));
}

std::string UPoly::to_string(const std::string& var) const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = degree(); k >= 0; --k) {
    const Rational& q = c_[static_cast<std::size_t>(k)];
    if (q == 0) continue;
    const bool neg = q < 0;
    const Rational mag = neg ? Rational(-q) : q;
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    const bool unit = mag == 1;
    if (!unit || k == 0) os << format_rational(mag);
    if (k > 0) {
      if (!unit) os << "*";
      os << var;
      if (k > 1) os << "^" << k;
    }
  }
  return os.str();
}

std::pair<UPoly, UPoly> divmod(const UPoly& a, const UPoly& b) {
  if (b.is_zero()) throw Error(ErrorCode::InvalidInput, "polynomial division by zero");
  std::vector<Rational> rem = a.coeffs();
  const int db = b.degree();
  if (a.degree() < db) return {UPoly(), a};
  std::vector<Rational> quo(static_cast<std::size_t>(a.degree() - db + 1), Rational(0));
  const Rational lead_inv = 1 / b.leading();
  for (int k = a.degree(); k >= db; --k) {
    const Rational c = rem[static_cast<std::size_t>(k)] * lead_inv;
    quo[static_cast<std::size_t>(k - db)] = c;
    if (c == 0) continue;
    for (int j = 0; j <= db; ++j) rem[static_cast<std::size_t>(k - db + j)] -= c * b.coeff(j);
  }
  return {UPoly(std::move(quo)), UPoly(std::move(rem))};
}

UPoly exact_div(const UPoly& a, const UPoly& b) {
  auto [q, r] = divmod(a, b);
  if (!r.is_zero()) throw Error(ErrorCode::InvalidInput, "polynomial division is not exact");
  return q;
}

UPoly gcd(const UPoly& a, const UPoly& b) {
  UPoly x = a, y = b;
  while (!y.is_zero()) {
    UPoly r = divmod(x, y).second;
    x = std::move(y);
    y = std::move(r);
  }
  return x.monic();
}

UPoly inverse_mod(const UPoly& a, const UPoly& m) {
  // Extended Euclid on (a, m), tracking the coefficient of a.
  UPoly r0 = divmod(a, m).second, r1 = m;
  UPoly s0 = UPoly::constant(1), s1;
  while (!r1.is_zero()) {
    auto [q, r] = divmod(r0, r1);
    UPoly s = s0 - q * s1;
    r0 = std::move(r1);
    r1 = std::move(r);
    s0 = std::move(s1);
    s1 = std::move(s);
  }
  if (r0.degree() != 0) throw Error(ErrorCode::InvalidInput, "polynomial is not invertible modulo m");
  return divmod(s0.scaled(1 / r0.leading()), m).second;
}

std::vector<std::pair<UPoly, int>> square_free(const UPoly& f) {
  std::vector<std::pair<UPoly, int>> out;
  if (f.degree() < 1) return out;
  const UPoly fp = f.derivative();
  UPoly a = gcd(f, fp);
  UPoly b = exact_div(f, a);
  UPoly c = exact_div(fp, a);
  UPoly d = c - b.derivative();
  for (int i = 1; b.degree() >= 1; ++i) {
    const UPoly g = gcd(b, d);
    if (g.degree() >= 1) out.emplace_back(g, i);
    b = exact_div(b, g);
    c = exact_div(d, g);
    d = c - b.derivative();
  }
  return out;
}

namespace {

// Positive divisors of |n| by trial division; nullopt when n is too large to factor this way.
std::optional<std::vector<Integer>> divisors(Integer n) {
  n = abs(n);
  if (n == 0) return std::vector<Integer>{};
  if (n > Integer("1000000000000")) return std::nullopt;
  std::vector<Integer> small, large;
  for (Integer d = 1; d * d <= n; ++d) {
    if (n % d == 0) {
      small.push_back(d);
      if (d * d != n) large.push_back(n / d);
    }
  }
  small.insert(small.end(), large.rbegin(), large.rend());
  return small;
}

}  // namespace

std::vector<Rational> rational_roots(const UPoly& f) {
  std::vector<Rational> roots;
  if (f.degree() < 1) return roots;
  // Strip the root at 0 first so the constant term is non-zero.
  UPoly g = f;
  int zeros = 0;
  while (g.coeff(0) == 0) {
    g = exact_div(g, UPoly::monomial(1, 1));
    ++zeros;
  }
  if (zeros > 0) roots.emplace_back(0);
  if (g.degree() < 1) return roots;
  Integer den_lcm = 1;
  for (const Rational& q : g.coeffs()) mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), q.get_den_mpz_t());
  std::vector<Integer> ints;
  for (const Rational& q : g.coeffs()) ints.push_back(Integer(q * den_lcm));
  const auto ps = divisors(ints.front());
  const auto qs = divisors(ints.back());
  if (!ps || !qs) return roots;
  std::set<Rational> found;
  for (const Integer& p : *ps) {
    for (const Integer& q : *qs) {
      for (int sgn : {1, -1}) {
        Rational cand(sgn * p, q);
        cand.canonicalize();
        if (!found.count(cand) && g.evaluate(cand) == 0) found.insert(cand);
      }
    }
  }
  roots.insert(roots.end(), found.begin(), found.end());
  return roots;
}

int multiplicity(const UPoly& f, const UPoly& h) {
  if (h.degree() < 1 || f.is_zero()) throw Error(ErrorCode::InvalidInput, "multiplicity needs non-constant h");
  int k = 0;
  UPoly cur = f;
  for (;;) {
    auto [q, r] = divmod(cur, h);
    if (!r.is_zero()) return k;
    cur = std::move(q);
    ++k;
  }
}

// ---------------------------------------------------------------- matrices over Q

QMat identity_q(int n) {
  QMat m(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) m(i, j) = i == j ? 1 : 0;
  }
  return m;
}

QMat transpose(const QMat& m) {
  QMat t(m.cols, m.rows);
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) t(j, i) = m(i, j);
  }
  return t;
}

QMat operator*(const QMat& x, const QMat& y) {
  if (x.cols != y.rows) throw Error(ErrorCode::InvalidInput, "matrix shapes do not match");
  QMat r(x.rows, y.cols);
  for (int i = 0; i < x.rows; ++i) {
    for (int j = 0; j < y.cols; ++j) {
      Rational s = 0;
      for (int k = 0; k < x.cols; ++k) s += x(i, k) * y(k, j);
      r(i, j) = s;
    }
  }
  return r;
}

bool is_zero(const QMat& m) {
  return std::all_of(m.a.begin(), m.a.end(), [](const Rational& q) { return q == 0; });
}

bool is_symmetric(const QMat& m) {
  if (m.rows != m.cols) return false;
  for (int i = 0; i < m.rows; ++i) {
    for (int j = i + 1; j < m.cols; ++j) {
      if (m(i, j) != m(j, i)) return false;
    }
  }
  return true;
}

namespace {

// Reduced row echelon form in place; returns the pivot columns.
std::vector<int> rref(QMat& m) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < m.cols && row < m.rows; ++col) {
    int p = row;
    while (p < m.rows && m(p, col) == 0) ++p;
    if (p == m.rows) continue;
    for (int j = 0; j < m.cols; ++j) std::swap(m(row, j), m(p, j));
    const Rational inv = 1 / m(row, col);
    for (int j = 0; j < m.cols; ++j) m(row, j) *= inv;
    for (int i = 0; i < m.rows; ++i) {
      if (i == row || m(i, col) == 0) continue;
      const Rational f = m(i, col);
      for (int j = 0; j < m.cols; ++j) m(i, j) -= f * m(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

int rank(const QMat& m) {
  QMat c = m;
  return static_cast<int>(rref(c).size());
}

std::vector<QVec> kernel(const QMat& m) {
  QMat c = m;
  const std::vector<int> pivots = rref(c);
  std::vector<bool> is_pivot(static_cast<std::size_t>(m.cols), false);
  for (int p : pivots) is_pivot[static_cast<std::size_t>(p)] = true;
  std::vector<QVec> basis;
  for (int f = 0; f < m.cols; ++f) {
    if (is_pivot[static_cast<std::size_t>(f)]) continue;
    QVec v(static_cast<std::size_t>(m.cols), Rational(0));
    v[static_cast<std::size_t>(f)] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) {
      v[static_cast<std::size_t>(pivots[r])] = -c(static_cast<int>(r), f);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

Rational determinant(const QMat& m) {
  if (m.rows != m.cols) throw Error(ErrorCode::InvalidInput, "determinant of a non-square matrix");
  QMat c = m;
  Rational det = 1;
  for (int col = 0; col < c.cols; ++col) {
    int p = col;
    while (p < c.rows && c(p, col) == 0) ++p;
    if (p == c.rows) return 0;
    if (p != col) {
      for (int j = 0; j < c.cols; ++j) std::swap(c(col, j), c(p, j));
      det = -det;
    }
    det *= c(col, col);
    const Rational inv = 1 / c(col, col);
    for (int i = col + 1; i < c.rows; ++i) {
      if (c(i, col) == 0) continue;
      const Rational f = c(i, col) * inv;
      for (int j = col; j < c.cols; ++j) c(i, j) -= f * c(col, j);
    }
  }
  return det;
}

// ---------------------------------------------------------------- matrices over Q[t]

PMat linear_pencil(const QMat& x, const QMat& y) {
  PMat m(x.rows, x.cols);
  for (int i = 0; i < x.rows; ++i) {
    for (int j = 0; j < x.cols; ++j) m(i, j) = UPoly(std::vector<Rational>{x(i, j), y(i, j)});
  }
  return m;
}

PMat submatrix(const PMat& m, const std::vector<int>& rows, const std::vector<int>& cols) {
  PMat s(static_cast<int>(rows.size()), static_cast<int>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      s(static_cast<int>(i), static_cast<int>(j)) = m(rows[i], cols[j]);
    }
  }
  return s;
}

UPoly determinant(const PMat& m) {
  if (m.rows != m.cols) throw Error(ErrorCode::InvalidInput, "determinant of a non-square matrix");
  const int n = m.rows;
  if (n == 0) return UPoly::constant(1);
  PMat c = m;
  UPoly prev = UPoly::constant(1);
  bool negate = false;
  for (int k = 0; k < n - 1; ++k) {
    int p = k;
    while (p < n && c(p, k).is_zero()) ++p;
    if (p == n) return {};
    if (p != k) {
      for (int j = 0; j < n; ++j) std::swap(c(k, j), c(p, j));
      negate = !negate;
    }
    for (int i = k + 1; i < n; ++i) {
      for (int j = k + 1; j < n; ++j) {
        c(i, j) = exact_div(c(k, k) * c(i, j) - c(i, k) * c(k, j), prev);
      }
      c(i, k) = UPoly();
    }
    prev = c(k, k);
  }
  return negate ? -c(n - 1, n - 1) : c(n - 1, n - 1);
}

UPoly content(const PVec& v) {
  UPoly g;
  for (const UPoly& p : v) g = gcd(g, p);
  return g;
}

PVec primitive(const PVec& v) {
  const UPoly g = content(v);
  if (g.is_zero()) return v;
  PVec out;
  out.reserve(v.size());
  for (const UPoly& p : v) out.push_back(exact_div(p, g));
  // Fix the scalar: the first non-zero entry becomes monic.
  for (const UPoly& p : out) {
    if (!p.is_zero()) {
      const Rational s = 1 / p.leading();
      for (UPoly& q : out) q = q.scaled(s);
      break;
    }
  }
  return out;
}

namespace {

// Fraction-free Gauss-Jordan over Q[t]: every pivot row keeps its pivot, other rows are
// cleared in the pivot columns, and rows are divided by their content to limit growth.
std::vector<int> reduce_polynomial(PMat& c) {
  std::vector<int> pivots;
  int row = 0;
  for (int col = 0; col < c.cols && row < c.rows; ++col) {
    int p = -1;
    for (int i = row; i < c.rows; ++i) {
      if (!c(i, col).is_zero() && (p < 0 || c(i, col).degree() < c(p, col).degree())) p = i;
    }
    if (p < 0) continue;
    for (int j = 0; j < c.cols; ++j) std::swap(c(row, j), c(p, j));
    for (int i = 0; i < c.rows; ++i) {
      if (i == row || c(i, col).is_zero()) continue;
      const UPoly piv = c(row, col);
      const UPoly e = c(i, col);
      const UPoly g = gcd(piv, e);
      const UPoly a = exact_div(piv, g), b = exact_div(e, g);
      PVec r(static_cast<std::size_t>(c.cols));
      for (int j = 0; j < c.cols; ++j) r[static_cast<std::size_t>(j)] = a * c(i, j) - b * c(row, j);
      const UPoly ct = content(r);
      for (int j = 0; j < c.cols; ++j) {
        c(i, j) = ct.is_zero() ? UPoly() : exact_div(r[static_cast<std::size_t>(j)], ct);
      }
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

int rank(const PMat& m) {
  PMat c = m;
  return static_cast<int>(reduce_polynomial(c).size());
}

std::vector<PVec> kernel(const PMat& m) {
  PMat c = m;
  const std::vector<int> pivots = reduce_polynomial(c);
  std::vector<bool> is_pivot(static_cast<std::size_t>(m.cols), false);
  for (int p : pivots) is_pivot[static_cast<std::size_t>(p)] = true;
  std::vector<PVec> basis;
  for (int f = 0; f < m.cols; ++f) {
    if (is_pivot[static_cast<std::size_t>(f)]) continue;
    // Row k reads piv_k x_{p_k} + c(k, f) x_f = 0 once the other free variables are zero.
    PVec v(static_cast<std::size_t>(m.cols));
    UPoly all = UPoly::constant(1);
    for (std::size_t k = 0; k < pivots.size(); ++k) all = all * c(static_cast<int>(k), pivots[k]);
    v[static_cast<std::size_t>(f)] = all;
    for (std::size_t k = 0; k < pivots.size(); ++k) {
      const UPoly others = exact_div(all, c(static_cast<int>(k), pivots[k]));
      v[static_cast<std::size_t>(pivots[k])] = -(c(static_cast<int>(k), f) * others);
    }
    basis.push_back(primitive(v));
  }
  return basis;
}

QMat evaluate(const PMat& m, const Rational& t) {
  QMat r(m.rows, m.cols);
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) r(i, j) = m(i, j).evaluate(t);
  }
  return r;
}

std::vector<std::pair<UPoly, int>> rank_modulo(const PMat& m, const UPoly& s) {
  if (s.degree() < 1) throw Error(ErrorCode::InvalidInput, "modulus must be non-constant");
  std::vector<std::pair<UPoly, int>> out;
  // Work list of (modulus, matrix state, next column, next row).
  struct State {
    UPoly mod;
    PMat mat;
    int col;
    int row;
  };
  std::vector<State> work;
  PMat start = m;
  for (UPoly& e : start.a) e = divmod(e, s).second;
  work.push_back({s.monic(), std::move(start), 0, 0});
  while (!work.empty()) {
    State st = std::move(work.back());
    work.pop_back();
    bool split = false;
    while (st.col < st.mat.cols && st.row < st.mat.rows && !split) {
      int p = -1;
      for (int i = st.row; i < st.mat.rows; ++i) {
        if (!st.mat(i, st.col).is_zero()) {
          p = i;
          break;
        }
      }
      if (p < 0) {
        ++st.col;
        continue;
      }
      const UPoly g = gcd(st.mat(p, st.col), st.mod);
      if (g.degree() >= 1) {
        // Zero divisor: the entry vanishes on g and is a unit on mod / g.
        const UPoly other = exact_div(st.mod, g);
        for (const UPoly& part : {g, other}) {
          PMat reduced = st.mat;
          for (UPoly& e : reduced.a) e = divmod(e, part).second;
          work.push_back({part, std::move(reduced), st.col, st.row});
        }
        split = true;
        break;
      }
      for (int j = 0; j < st.mat.cols; ++j) std::swap(st.mat(st.row, j), st.mat(p, j));
      const UPoly inv = inverse_mod(st.mat(st.row, st.col), st.mod);
      for (int i = st.row + 1; i < st.mat.rows; ++i) {
        if (st.mat(i, st.col).is_zero()) continue;
        const UPoly f = divmod(st.mat(i, st.col) * inv, st.mod).second;
        for (int j = st.col; j < st.mat.cols; ++j) {
          st.mat(i, j) = divmod(st.mat(i, j) - f * st.mat(st.row, j), st.mod).second;
        }
      }
      ++st.row;
      ++st.col;
    }
    if (!split) out.emplace_back(st.mod, st.row);
  }
  return out;
}

}  // namespace thetasing
