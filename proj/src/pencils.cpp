#include "thetasing/pencils.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "thetasing/local_function.hpp"
#include "thetasing/types.hpp"

namespace thetasing {

namespace {

QVec apply(const QMat& m, const QVec& v) {
  QVec out(static_cast<std::size_t>(m.rows), Rational(0));
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) out[static_cast<std::size_t>(i)] += m(i, j) * v[static_cast<std::size_t>(j)];
  }
  return out;
}

Rational dot(const QVec& a, const QVec& b) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

bool is_zero_vec(const QVec& v) {
  return std::all_of(v.begin(), v.end(), [](const Rational& q) { return q == 0; });
}

// Some c with m c = h, or nothing when h is outside the image.
std::optional<QVec> solve(const QMat& m, const QVec& h) {
  QMat aug(m.rows, m.cols + 1);
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) aug(i, j) = m(i, j);
    aug(i, m.cols) = -h[static_cast<std::size_t>(i)];
  }
  for (const QVec& k : kernel(aug)) {
    const Rational last = k.back();
    if (last == 0) continue;
    QVec c(k.begin(), k.end() - 1);
    for (Rational& x : c) x /= last;
    return c;
  }
  return std::nullopt;
}

// All increasing k-subsets of {0, ..., n-1}.
std::vector<std::vector<int>> subsets(int n, int k) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) cur[static_cast<std::size_t>(i)] = i;
  if (k > n) return out;
  for (;;) {
    out.push_back(cur);
    int i = k - 1;
    while (i >= 0 && cur[static_cast<std::size_t>(i)] == n - k + i) --i;
    if (i < 0) return out;
    ++cur[static_cast<std::size_t>(i)];
    for (int j = i + 1; j < k; ++j) cur[static_cast<std::size_t>(j)] = cur[static_cast<std::size_t>(j - 1)] + 1;
  }
}

UPoly linear_factor(const Rational& a) { return UPoly(std::vector<Rational>{-a, Rational(1)}); }

// Rank and clause data of the member q, with `other` any second member of the pencil.
RootInfo rational_member(int n, const QMat& q, const QMat& other, int mult) {
  RootInfo ri;
  ri.multiplicity = mult;
  ri.rank = rank(q);
  ri.kernel = kernel(q);
  ri.kernel_dim = n + 1 - ri.rank;
  ri.clauses_evaluated = true;
  ri.bound_ok = mult >= n + 1 - ri.rank;
  if (ri.rank == n) {
    const QVec& vtx = ri.kernel.front();
    const QVec h = apply(other, vtx);
    ri.base_point = dot(vtx, h) == 0;
    if (ri.base_point) {
      // h lies in the image of q, which is the polar hyperplane of the vertex.
      const auto c = solve(q, h);
      if (!c) throw Error(ErrorCode::InvalidInput, "base-point vertex without a polar solution");
      const bool transverse = !is_zero_vec(h) && dot(*c, apply(q, *c)) != 0;
      ri.tangent_along_line = !transverse;
      ri.exactly_two_ok = (mult == 2) == transverse;
    }
  }
  ri.double_ok = (mult >= 2) == (ri.rank < n || ri.base_point);
  return ri;
}

// Greedy row basis of the span of the given vectors.
std::vector<QVec> row_basis(const std::vector<QVec>& rows, int width) {
  std::vector<QVec> basis;
  for (const QVec& v : rows) {
    QMat m(static_cast<int>(basis.size()) + 1, width);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      for (int j = 0; j < width; ++j) m(static_cast<int>(i), j) = basis[i][static_cast<std::size_t>(j)];
    }
    for (int j = 0; j < width; ++j) m(static_cast<int>(basis.size()), j) = v[static_cast<std::size_t>(j)];
    if (rank(m) > static_cast<int>(basis.size())) basis.push_back(v);
  }
  return basis;
}

std::string rational_text(const Rational& q) { return format_rational(q); }

}  // namespace

// ---------------------------------------------------------------- Pencil

Pencil::Pencil(QMat a, QMat b) : A(std::move(a)), B(std::move(b)) {
  if (A.rows != A.cols || B.rows != B.cols || A.rows != B.rows) {
    throw Error(ErrorCode::InvalidInput, "pencil matrices must be square of equal size");
  }
  if (A.rows < 2) throw Error(ErrorCode::InvalidInput, "pencil needs n >= 1");
  if (!is_symmetric(A) || !is_symmetric(B)) throw Error(ErrorCode::NotSymmetric, "pencil matrices must be symmetric");
  if (is_zero(A) && is_zero(B)) throw Error(ErrorCode::InvalidInput, "both pencil generators vanish");
  n = A.rows - 1;
}

bool BinaryForm::is_zero() const {
  return std::all_of(coeffs.begin(), coeffs.end(), [](const Rational& q) { return q == 0; });
}

std::string BinaryForm::to_string() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int k = degree; k >= 0; --k) {
    const Rational& c = coeffs[static_cast<std::size_t>(k)];
    if (c == 0) continue;
    const bool neg = c < 0;
    const Rational mag = neg ? Rational(-c) : c;
    os << (first ? (neg ? "-" : "") : (neg ? " - " : " + "));
    first = false;
    std::vector<std::string> factors;
    if (mag != 1 || degree == 0) factors.push_back(rational_text(mag));
    if (k > 0) factors.push_back(k == 1 ? "lambda" : "lambda^" + std::to_string(k));
    const int j = degree - k;
    if (j > 0) factors.push_back(j == 1 ? "mu" : "mu^" + std::to_string(j));
    for (std::size_t i = 0; i < factors.size(); ++i) os << (i ? "*" : "") << factors[i];
  }
  return os.str();
}

BinaryForm discriminant(const Pencil& p) {
  const UPoly f = determinant(p.member());
  BinaryForm form;
  form.degree = p.n + 1;
  form.coeffs.assign(static_cast<std::size_t>(form.degree) + 1, Rational(0));
  // F(lambda, mu) = lambda^(n+1) f(mu / lambda): t^j pairs with lambda^(n+1-j) mu^j.
  for (int j = 0; j <= f.degree(); ++j) form.coeffs[static_cast<std::size_t>(form.degree - j)] = f.coeff(j);
  return form;
}

// ---------------------------------------------------------------- singular members

std::vector<RootInfo> singular_members(const Pencil& p) {
  const PMat member = p.member();
  const UPoly f = determinant(member);
  if (f.is_zero()) throw Error(ErrorCode::DegeneratePencil, "discriminant vanishes identically");
  std::vector<RootInfo> out;
  for (const auto& [h, mult] : square_free(f)) {
    UPoly rest = h;
    for (const Rational& a : rational_roots(h)) {
      rest = exact_div(rest, linear_factor(a));
      RootInfo ri = rational_member(p.n, evaluate(member, a), p.B, mult);
      ri.factor = linear_factor(a);
      ri.value = a;
      out.push_back(std::move(ri));
    }
    if (rest.degree() < 1) continue;
    for (const auto& [part, rk] : rank_modulo(member, rest)) {
      RootInfo ri;
      ri.factor = part;
      ri.multiplicity = mult;
      ri.rank = rk;
      ri.kernel_dim = p.n + 1 - rk;
      ri.bound_ok = mult >= p.n + 1 - rk;
      out.push_back(std::move(ri));
    }
  }
  const int at_inf = p.n + 1 - f.degree();
  if (at_inf > 0) {
    RootInfo ri = rational_member(p.n, p.B, p.A, at_inf);
    ri.at_infinity = true;
    out.push_back(std::move(ri));
  }
  std::stable_sort(out.begin(), out.end(), [](const RootInfo& a, const RootInfo& b) {
    if (a.at_infinity != b.at_infinity) return b.at_infinity;
    if (a.value.has_value() != b.value.has_value()) return a.value.has_value();
    if (a.value && b.value) return *a.value < *b.value;
    return a.factor.degree() < b.factor.degree();
  });
  return out;
}

// ---------------------------------------------------------------- generic corank and vertices

GenericCorank generic_corank(const Pencil& p) {
  const PMat member = p.member();
  GenericCorank gc;
  gc.kernel = kernel(member);
  gc.r = static_cast<int>(gc.kernel.size());
  if (gc.r == 1) gc.vertex_curve = gc.kernel.front();
  return gc;
}

VertexAnalysis vertex_analysis(const Pencil& p) {
  const GenericCorank gc = generic_corank(p);
  if (gc.r == 0) throw Error(ErrorCode::InvalidInput, "vertex analysis needs generic corank >= 1");
  const int width = p.n + 1;
  std::vector<QVec> coefficient_rows;
  for (const PVec& v : gc.kernel) {
    int d = 0;
    for (const UPoly& e : v) d = std::max(d, e.degree());
    for (int k = 0; k <= d; ++k) {
      QVec row(static_cast<std::size_t>(width));
      for (int j = 0; j < width; ++j) row[static_cast<std::size_t>(j)] = v[static_cast<std::size_t>(j)].coeff(k);
      coefficient_rows.push_back(std::move(row));
    }
  }
  VertexAnalysis va;
  va.r = gc.r;
  va.span_basis = row_basis(coefficient_rows, width);
  va.m = static_cast<int>(va.span_basis.size()) - 1;
  if (va.m == va.r - 1) throw Error(ErrorCode::ConstantVertex, "the generic vertex does not move");

  PMat basis(width, gc.r);
  for (int j = 0; j < gc.r; ++j) {
    for (int i = 0; i < width; ++i) basis(i, j) = gc.kernel[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  }
  std::vector<int> all_cols(static_cast<std::size_t>(gc.r));
  for (int j = 0; j < gc.r; ++j) all_cols[static_cast<std::size_t>(j)] = j;
  UPoly g;
  int top = -1;
  for (const auto& rows : subsets(width, gc.r)) {
    const UPoly minor = determinant(submatrix(basis, rows, all_cols));
    if (minor.is_zero()) continue;
    g = gcd(g, minor);
    top = std::max(top, minor.degree());
  }
  va.degree = top - g.degree();
  va.degree_ok = va.degree == va.m - va.r + 1;
  va.bounds_ok = va.r <= va.m && 2 * va.m <= p.n + va.r - 1;
  return va;
}

// ---------------------------------------------------------------- lower-rank members

LowerRankCount lower_rank_count(const Pencil& p, std::uint64_t seed) {
  const VertexAnalysis va = vertex_analysis(p);
  const PMat member = p.member();
  const int width = p.n + 1;
  const int generic_rank = width - va.r;

  LowerRankCount out;
  out.expected = p.n + va.r - 2 * va.m - 1;
  out.seed = seed;

  // gcd of the generic-size minors, plus the order of vanishing at infinity.
  UPoly g;
  int inf_weight = generic_rank;
  for (const auto& rows : subsets(width, generic_rank)) {
    for (const auto& cols : subsets(width, generic_rank)) {
      const UPoly minor = determinant(submatrix(member, rows, cols));
      if (minor.is_zero()) continue;
      g = gcd(g, minor);
      inf_weight = std::min(inf_weight, generic_rank - minor.degree());
    }
  }
  out.by_minors = std::max(g.degree(), 0) + inf_weight;
  for (const auto& [h, mult] : square_free(g)) {
    for (const auto& [part, rk] : rank_modulo(member, h)) {
      LowerRankMember lm;
      lm.factor = part;
      lm.rank = rk;
      lm.weight_minors = mult;
      out.members.push_back(lm);
    }
  }
  if (inf_weight > 0) {
    LowerRankMember lm;
    lm.at_infinity = true;
    lm.rank = rank(p.B);
    lm.weight_minors = inf_weight;
    out.members.push_back(lm);
  }

  const int k = p.n - va.r + 1;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> entry(-5, 5);
  for (int attempt = 1; attempt <= 10; ++attempt) {
    QMat s(width, k);
    for (Rational& q : s.a) q = entry(rng);
    const QMat st = transpose(s);
    const UPoly restricted = determinant(linear_pencil(st * p.A * s, st * p.B * s));
    if (restricted.is_zero()) continue;
    UPoly rest = restricted;
    int remainder_inf = k - restricted.degree();
    for (LowerRankMember& lm : out.members) {
      if (lm.at_infinity) {
        lm.weight_restricted = remainder_inf;
        remainder_inf = 0;
        continue;
      }
      lm.weight_restricted = multiplicity(rest, lm.factor);
      for (int i = 0; i < lm.weight_restricted; ++i) rest = exact_div(rest, lm.factor);
    }
    // What is left should be the vertex meetings, each counted exactly twice.
    const auto parts = square_free(rest);
    const bool squares = std::all_of(parts.begin(), parts.end(), [](const auto& pr) { return pr.second == 2; });
    if (!squares || (remainder_inf != 0 && remainder_inf != 2)) continue;
    out.meetings = remainder_inf / 2;
    for (const auto& pr : parts) out.meetings += pr.first.degree();
    out.by_restriction = k - 2 * out.meetings;
    out.restricted_disc_nonzero = true;
    out.attempts = attempt;
    for (LowerRankMember& lm : out.members) lm.weight_ok = lm.weight_restricted >= generic_rank - lm.rank;
    return out;
  }
  throw Error(ErrorCode::UnluckySubspace, "no general restriction found in 10 attempts");
}

// ---------------------------------------------------------------- intersection bound and corollary

IntersectionBound segre_intersection_bound(const Pencil& p) {
  const int width = p.n + 1;
  QMat stacked(2 * width, width);
  for (int i = 0; i < width; ++i) {
    for (int j = 0; j < width; ++j) {
      stacked(i, j) = p.A(i, j);
      stacked(width + i, j) = p.B(i, j);
    }
  }
  IntersectionBound ib;
  ib.r = width - rank(p.member());
  ib.s = width - rank(stacked) - 1;
  ib.holds = 3 * ib.r <= p.n + 2 * ib.s + 3;
  return ib;
}

TangencyCriterion tangency_criterion(const Pencil& p) {
  TangencyCriterion tc;
  const int r = p.n + 1 - rank(p.member());
  if (r == 0) return tc;
  VertexAnalysis va;
  try {
    va = vertex_analysis(p);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConstantVertex) throw;
    return tc;
  }
  tc.applicable = true;
  tc.m = va.m;
  const int width = p.n + 1;
  const int cols = va.m + 1;
  QMat span(width, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < width; ++i) span(i, j) = va.span_basis[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
  }
  const QMat ap = p.A * span;
  const QMat bp = p.B * span;
  tc.span_in_base_locus = is_zero(transpose(span) * ap) && is_zero(transpose(span) * bp);
  // Hyperplanes tangent to some member at some point of the span: their common zero set.
  QMat polars(width, 2 * cols);
  for (int i = 0; i < width; ++i) {
    for (int j = 0; j < cols; ++j) {
      polars(i, j) = ap(i, j);
      polars(i, cols + j) = bp(i, j);
    }
  }
  tc.common_tangent_dim = p.n - rank(polars);
  tc.expected_dim = p.n + r - va.m - 1;
  tc.holds = tc.span_in_base_locus && tc.common_tangent_dim == tc.expected_dim && va.bounds_ok;
  return tc;
}

// ---------------------------------------------------------------- generator

Pencil prescribed_vertex_generator(const PVec& nu, std::uint64_t seed) {
  const int width = static_cast<int>(nu.size());
  if (width < 3) throw Error(ErrorCode::InvalidInput, "vertex curve needs at least 3 coordinates");
  const UPoly c = content(nu);
  if (c.is_zero()) throw Error(ErrorCode::InvalidInput, "vertex curve is the zero vector");
  if (c.degree() > 0) throw Error(ErrorCode::InvalidInput, "vertex curve entries share the factor " + c.to_string());

  int d = 0;
  for (const UPoly& e : nu) d = std::max(d, e.degree());
  // Unknowns: the upper triangles of A, then of B.
  std::vector<std::vector<int>> index(static_cast<std::size_t>(width), std::vector<int>(static_cast<std::size_t>(width)));
  int count = 0;
  for (int i = 0; i < width; ++i) {
    for (int j = i; j < width; ++j) {
      index[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = count;
      index[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = count;
      ++count;
    }
  }
  // Coefficient of t^k in row i of (A + tB) nu(t): sum_j A_ij nu_k[j] + B_ij nu_{k-1}[j].
  QMat system((d + 2) * width, 2 * count);
  for (Rational& q : system.a) q = 0;
  for (int k = 0; k <= d + 1; ++k) {
    for (int i = 0; i < width; ++i) {
      const int row = k * width + i;
      for (int j = 0; j < width; ++j) {
        const int u = index[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        system(row, u) += nu[static_cast<std::size_t>(j)].coeff(k);
        system(row, count + u) += nu[static_cast<std::size_t>(j)].coeff(k - 1);
      }
    }
  }
  const std::vector<QVec> basis = kernel(system);
  if (basis.empty()) throw Error(ErrorCode::EmptySolutionSpace, "only the zero pencil annihilates the vertex curve");

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> coef(-3, 3);
  for (int attempt = 0; attempt < 20; ++attempt) {
    QVec x(static_cast<std::size_t>(2 * count), Rational(0));
    for (const QVec& b : basis) {
      const int w = coef(rng);
      for (std::size_t i = 0; i < x.size(); ++i) x[i] += w * b[i];
    }
    QMat a(width, width), b(width, width);
    for (int i = 0; i < width; ++i) {
      for (int j = 0; j < width; ++j) {
        const int u = index[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
        a(i, j) = x[static_cast<std::size_t>(u)];
        b(i, j) = x[static_cast<std::size_t>(count + u)];
      }
    }
    QMat pair(2, width * width);
    for (int i = 0; i < width * width; ++i) {
      pair(0, i) = a.a[static_cast<std::size_t>(i)];
      pair(1, i) = b.a[static_cast<std::size_t>(i)];
    }
    if (rank(pair) < 2) continue;  // a single quadric, not a pencil
    Pencil candidate(std::move(a), std::move(b));
    if (generic_corank(candidate).r == 1) return candidate;
  }
  throw Error(ErrorCode::EmptySolutionSpace, "no pencil of generic corank 1 has this vertex curve");
}

PVec parse_vertex_curve(const std::string& text) {
  PVec out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::string expr;
    for (char ch : item) {
      if (ch == 't') {
        expr += "z1";
      } else {
        expr += ch;
      }
    }
    if (expr.find_first_not_of(" \t") == std::string::npos) throw Error(ErrorCode::InvalidInput, "empty vertex curve entry");
    const QPolynomial q = parse_polynomial(expr, 1);
    std::vector<Rational> coeffs(static_cast<std::size_t>(std::max(q.degree(), 0)) + 1, Rational(0));
    for (const auto& [m, c] : q.terms()) coeffs[static_cast<std::size_t>(m[0])] += c;
    out.emplace_back(std::move(coeffs));
  }
  return out;
}

// ---------------------------------------------------------------- report

bool PencilReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const ClauseCheck& c) { return c.pass; });
}

PencilReport analyze(const Pencil& p, std::uint64_t seed) {
  PencilReport rep;
  rep.n = p.n;
  rep.disc = discriminant(p);
  rep.disc_zero = rep.disc.is_zero();
  rep.corank = generic_corank(p);
  rep.intersection = segre_intersection_bound(p);
  rep.tangency = tangency_criterion(p);
  const int r = rep.corank.r;
  auto add = [&rep](std::string clause, bool pass, std::string detail) {
    rep.checks.push_back({std::move(clause), pass, std::move(detail)});
  };
  add("disc_vs_corank", rep.disc_zero == (r >= 1), "r=" + std::to_string(r));

  if (!rep.disc_zero) {
    rep.roots = singular_members(p);
    int total = 0;
    bool bound = true, twice = true, exactly = true;
    for (const RootInfo& ri : rep.roots) {
      total += ri.multiplicity * (ri.at_infinity ? 1 : ri.factor.degree());
      bound = bound && ri.bound_ok;
      twice = twice && ri.double_ok;
      exactly = exactly && ri.exactly_two_ok;
    }
    add("prop_i_total", total == p.n + 1, "sum=" + std::to_string(total) + " n+1=" + std::to_string(p.n + 1));
    add("prop_i_bound", bound, "multiplicity >= n+1-rank");
    add("prop_ii", twice, "multiplicity >= 2 iff rank < n or vertex is a base point");
    add("prop_iii", exactly, "multiplicity 2 iff the polar solution is off the member");
    add("corollary", !rep.tangency.holds, "no base subspace when the general member is smooth");
    return rep;
  }

  try {
    rep.vertex = vertex_analysis(p);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ConstantVertex) throw;
    rep.vertex_note = e.what();
    return rep;
  }
  const VertexAnalysis& va = *rep.vertex;
  add("segre_i", va.bounds_ok, "r=" + std::to_string(va.r) + " m=" + std::to_string(va.m));
  add("segre_ii", va.degree_ok, "degree=" + std::to_string(va.degree) + " m-r+1=" + std::to_string(va.m - va.r + 1));
  add("segre_iii", rep.intersection.holds, "s=" + std::to_string(rep.intersection.s));
  try {
    rep.lower = lower_rank_count(p, seed);
    bool weights = true;
    for (const LowerRankMember& lm : rep.lower->members) weights = weights && lm.weight_ok;
    add("segre_iv", rep.lower->agrees() && weights,
        "expected=" + std::to_string(rep.lower->expected) + " minors=" + std::to_string(rep.lower->by_minors) +
            " restriction=" + std::to_string(rep.lower->by_restriction));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnluckySubspace) throw;
    add("segre_iv", false, e.what());
  }
  add("corollary", rep.tangency.holds,
      "tangent_dim=" + std::to_string(rep.tangency.common_tangent_dim) + " expected=" +
          std::to_string(rep.tangency.expected_dim));
  return rep;
}

}  // namespace thetasing
