// End-to-end acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "thetasing/boundary.hpp"
#include "thetasing/exact.hpp"
#include "thetasing/gauss_tangency.hpp"
#include "thetasing/jets.hpp"
#include "thetasing/pencils.hpp"
#include "thetasing/sing_locus.hpp"
#include "thetasing/theta_core.hpp"

using namespace thetasing;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Collects sub-check results; the first failures are named in the summary line.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++total_;
    if (ok) return;
    pass_ = false;
    if (failed_.size() < 4) failed_.push_back(what);
    ++failures_;
  }
  Outcome outcome(const std::string& summary) const {
    std::ostringstream s;
    s << summary;
    if (!pass_) {
      s << "; failed " << failures_ << "/" << total_ << ":";
      for (const auto& f : failed_) s << " [" << f << "]";
    }
    return {pass_, s.str()};
  }

 private:
  bool pass_ = true;
  int total_ = 0;
  int failures_ = 0;
  std::vector<std::string> failed_;
};

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", x);
  return buf;
}

CVector point_on_divisor(const ThetaContext& ctx, std::mt19937_64& rng) {
  for (;;) {
    const auto p = project_to_divisor(ctx, fixtures::random_point(ctx.g(), rng, 0.5));
    if (p) return *p;
  }
}

Rational q(long p, long d = 1) {
  Rational r(p, d);
  r.canonicalize();
  return r;
}

// ---------------------------------------------------------------- 1

Outcome heat_equation() {
  std::mt19937_64 rng(101);
  double worst = 0.0;
  Checks c;
  for (int trial = 0; trial < 20; ++trial) {
    const int g = 1 + trial % 3;
    const CMatrix tau = fixtures::random_tau(g, rng);
    const ThetaContext ctx(tau, 1e-13);
    const CVector z = fixtures::random_point(g, rng, 0.4);
    const Jet jet = theta_jet(ctx, z, 2);
    const double h = 1e-5;
    for (int i = 0; i < g; ++i) {
      for (int j = i; j < g; ++j) {
        CMatrix tp = tau, tm = tau;
        tp(i, j) += h;
        tm(i, j) -= h;
        if (i != j) {
          tp(j, i) += h;
          tm(j, i) -= h;
        }
        const cplx fd =
            (theta_value(ThetaContext(tp, 1e-13), z) - theta_value(ThetaContext(tm, 1e-13), z)) / (2.0 * h);
        const cplx second = jet[MultiIndex::unit(g, i).plus_unit(j)];
        const double err = std::abs(second - kTwoPiI * (i == j ? 2.0 : 1.0) * fd);
        worst = std::max(worst, err);
        c.expect(err < 1e-6, "g=" + std::to_string(g) + " (" + std::to_string(i) + "," + std::to_string(j) +
                                 ") err " + sci(err));
      }
    }
  }
  return c.outcome("20 cases, max |d_i d_j theta - 2 pi i (1+delta) FD| = " + sci(worst));
}

// ---------------------------------------------------------------- 2

Outcome parity_quasi_periodicity() {
  std::mt19937_64 rng(202);
  double worst = 0.0;  // in units of tol
  Checks c;
  for (int trial = 0; trial < 100; ++trial) {
    const int g = 1 + trial % 3;
    const ThetaContext ctx(fixtures::random_tau(g, rng), 1e-12);
    const CVector z = fixtures::random_point(g, rng);
    const double env = std::exp(ctx.envelope_exponent(z));
    const double unit = ctx.tol() * env;
    const cplx plus = theta_value(ctx, z);
    const double parity = std::abs(plus - theta_value(ctx, CVector(-z))) / unit;

    std::uniform_int_distribution<int> d(-2, 2);
    Eigen::VectorXi m(g), n(g);
    for (int k = 0; k < g; ++k) {
      m(k) = d(rng);
      n(k) = d(rng);
    }
    const CVector nc = n.cast<double>().cast<cplx>();
    const CVector shifted = z + m.cast<double>().cast<cplx>() + ctx.tau() * nc;
    const cplx factor = std::exp(-cplx(0, kPi) * nc.dot(ctx.tau() * nc) - kTwoPiI * nc.dot(z));
    const double quasi = std::abs(theta_value(ctx, shifted) - factor * plus) / (unit * (1.0 + std::abs(factor)));
    worst = std::max({worst, parity, quasi});
    c.expect(parity < 2.0, "parity at point " + std::to_string(trial));
    c.expect(quasi < 2.0, "quasi-periodicity at point " + std::to_string(trial));
  }
  return c.outcome("100 points, worst residual = " + sci(worst) + " tol (limit 2 tol)");
}

// ---------------------------------------------------------------- 3

Outcome product_fixtures() {
  Checks c;
  {
    const ThetaContext ctx(fixtures::diag_i(2), 1e-12);
    const auto pts = find_singular_points(ctx);
    c.expect(pts.size() == 1, "E x E: " + std::to_string(pts.size()) + " singular points");
    if (pts.size() == 1) {
      c.expect(ctx.lattice_distance(pts[0].z, fixtures::half_period(2)) < 1e-8, "E x E: point location");
      c.expect(pts[0].order == 2, "E x E: order");
      c.expect(pts[0].corank == 0, "E x E: corank");
    }
  }
  int cone_dim = -1;
  {
    const ThetaContext ctx(fixtures::diag_i(3), 1e-12);
    SingularSearchOptions opts;
    opts.grid_per_dim = 2;
    const auto pts = find_singular_points(ctx, opts);
    const SingularPointRecord* triple = nullptr;
    for (const auto& p : pts) {
      if (ctx.lattice_distance(p.z, fixtures::half_period(3)) < 1e-8) triple = &p;
    }
    c.expect(triple != nullptr, "E^3: triple half-period not found");
    if (triple) {
      c.expect(triple->order == 3, "E^3: order " + std::to_string(triple->order));
      const HomogeneousForm cone = tangent_cone(ThetaFunction(ctx), triple->reduced.z0, 3);
      const cplx lead = cone.coefficient(MultiIndex(std::vector<int>{1, 1, 1}));
      double off = 0.0;
      for (const auto& [idx, v] : cone.coeffs) {
        if (idx != MultiIndex(std::vector<int>{1, 1, 1})) off = std::max(off, std::abs(v));
      }
      c.expect(std::abs(lead) > 0.0 && off <= 1e-8 * std::abs(lead), "E^3: cone not proportional to z1 z2 z3");
      cone_dim = polar_quadrics(cone).dim_projective;
      c.expect(cone_dim == 2, "E^3: polar span dim " + std::to_string(cone_dim));
    }
  }
  return c.outcome("E x E: one double point of corank 0; E^3: order-3 cone ~ z1 z2 z3, polar span dim " +
                   std::to_string(cone_dim));
}

// ---------------------------------------------------------------- 4

QPolynomial random_poly(std::mt19937_64& rng, int g, int max_degree) {
  std::uniform_int_distribution<int> coeff(-4, 4), deg(0, max_degree), count(1, 4);
  QPolynomial p(g);
  const int n = count(rng);
  for (int t = 0; t < n; ++t) {
    std::vector<int> e(static_cast<std::size_t>(g), 0);
    int left = deg(rng);
    std::uniform_int_distribution<int> var(0, g - 1);
    while (left-- > 0) ++e[static_cast<std::size_t>(var(rng))];
    p.add_term(MultiIndex(e), q(coeff(rng), 1 + std::abs(coeff(rng))));
  }
  return p;
}

std::vector<std::vector<Rational>> random_fields(std::mt19937_64& rng, int g, int n) {
  std::uniform_int_distribution<int> v(-5, 5), d(1, 4);
  std::vector<std::vector<Rational>> out(static_cast<std::size_t>(n));
  for (auto& eta : out) {
    for (int l = 0; l < g; ++l) eta.push_back(q(v(rng), d(rng)));
  }
  return out;
}

Rational at_origin(const QPolynomial& p) { return p.coefficient(MultiIndex(p.dim())); }

// Gradient at the origin of the operator with the given terms applied to f.
std::vector<Rational> operator_gradient(const JetTerms& terms, const std::vector<std::vector<Rational>>& fields,
                                        const QPolynomial& f) {
  const QPolynomial h = apply_jet_terms(terms, fields, f);
  std::vector<Rational> out;
  for (int l = 0; l < f.dim(); ++l) out.push_back(at_origin(h.derivative(l)));
  return out;
}

Outcome jet_suite() {
  Checks c;
  for (int k = 1; k <= 8; ++k) {
    c.expect(delta_expand(k) == delta_recursive(k), "expand != recursive at k=" + std::to_string(k));
  }

  const JetTerms shown2{{{2, 0}, q(1, 2)}, {{0, 1}, q(1)}};
  const JetTerms shown3{{{3, 0, 0}, q(1, 6)}, {{1, 1, 0}, q(1, 2)}, {{0, 0, 1}, q(1)}};
  c.expect(delta_expand(2) == shown2, "Delta^(2) display");
  c.expect(delta_expand(3) == shown3, "Delta^(3) display: D1 D2 coefficient is " +
                                          delta_expand(3).at({1, 1, 0}).get_str() + ", shown 1/2");

  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> kd(1, 5), gd(1, 3);
  int leibniz_ok = 0;
  for (int trial = 0; trial < 50; ++trial) {
    const int g = gd(rng);
    const int k = kd(rng);
    const QPolynomial f = random_poly(rng, g, 4);
    const QPolynomial h = random_poly(rng, g, 3);
    const bool ok = leibniz_check(k, f, h, random_fields(rng, g, k));
    leibniz_ok += ok ? 1 : 0;
    c.expect(ok, "Leibniz trial " + std::to_string(trial));
  }

  // The low-order containment conditions written out: with M the Hessian and
  // d_eta M its derivative along eta, (a1) M eta1, (a2) 1/2 d_eta1 M eta1 + M eta2,
  // (a3) 1/6 d_eta1^2 M eta1 + 1/2 d_eta1 M eta2 + M eta3.
  bool a1 = true, a2 = true, a3 = true;
  for (int trial = 0; trial < 10; ++trial) {
    const int g = 3;
    QPolynomial f = parse_polynomial("z1^2*z2 - z3^3 + 2*z1*z2*z3", g);
    f += random_poly(rng, g, 4);
    QPolynomial low(g);
    for (const auto& [m, v] : f.terms()) {
      if (m.length() < 2) low.add_term(m, -v);
    }
    f += low;  // singular at the origin
    const auto eta = random_fields(rng, g, 3);
    const auto d = [&](const QPolynomial& p, int i) { return p.directional(eta[static_cast<std::size_t>(i)]); };
    std::vector<Rational> w1, w2, w3;
    for (int l = 0; l < g; ++l) {
      const QPolynomial fl = f.derivative(l);
      w1.push_back(at_origin(d(fl, 0)));
      w2.push_back(at_origin(d(d(fl, 0), 0)) / 2 + at_origin(d(fl, 1)));
      w3.push_back(at_origin(d(d(d(fl, 0), 0), 0)) / 6 + at_origin(d(d(fl, 0), 1)) / 2 + at_origin(d(fl, 2)));
    }
    a1 = a1 && operator_gradient(delta_expand(1), eta, f) == w1;
    a2 = a2 && operator_gradient(delta_expand(2), eta, f) == w2;
    a3 = a3 && operator_gradient(delta_expand(3), eta, f) == w3;
  }
  c.expect(a1, "(a1) display");
  c.expect(a2, "(a2) display");
  c.expect(a3, "(a3) display: 1/2 d_eta1 M eta2 term");
  return c.outcome("expand = recursive for k <= 8; Leibniz " + std::to_string(leibniz_ok) + "/50");
}

// ---------------------------------------------------------------- 5

Outcome tangency_suite() {
  std::mt19937_64 rng(505);
  const ThetaContext ctx(fixtures::random_tau(2, rng), 1e-12);
  Checks c;
  double worst_witness = 0.0;
  for (int k = 0; k < 10; ++k) {
    const CVector x = point_on_divisor(ctx, rng);
    const TangencyWitness w = degeneracy_residual(ctx, x, {CVector(2.0 * x)});
    const double r = std::max(w.residual_theta, w.residual_rank);
    worst_witness = std::max(worst_witness, r);
    c.expect(r < 1e-8, "witness " + std::to_string(k) + " residual " + sci(r));
  }
  TangencyOptions opts;
  opts.grid_per_dim = 4;
  double least_off = INFINITY;
  int tested = 0;
  while (tested < 20) {
    const CVector b = fixtures::random_point(2, rng, 0.5);
    if (doubled_divisor_distance(ctx, b) <= 1e-2) continue;
    ++tested;
    const double r = tangency_residual(ctx, b, opts);
    least_off = std::min(least_off, r);
    c.expect(r > 1e-3, "off shift " + std::to_string(tested) + " residual " + sci(r));
  }
  return c.outcome("10 witnesses max " + sci(worst_witness) + "; 20 shifts off 2Xi min " + sci(least_off));
}

// ---------------------------------------------------------------- 6

Outcome boundary_suite() {
  Checks c;
  std::mt19937_64 rng(606);
  const ThetaContext base(fixtures::random_tau(2, rng), 1e-12);
  double worst = 0.0;
  for (int k = 0; k < 5; ++k) {
    const CVector x = point_on_divisor(base, rng);
    const Rank1Data d(base, CVector(2.0 * x));
    const VerticalSingRecord rec = vsing_residual_rank1(d, x, 1.0);
    worst = std::max(worst, rec.residual);
    c.expect(rec.residual < 1e-9, "rank-1 parity witness residual " + sci(rec.residual));
    const Quadric qd = quadric_rank1(d, x, 1.0);
    c.expect(qd.mat(0, 0) == cplx(0.0, 0.0), "quadric top-left entry not exactly 0");
  }

  for (int k = 0; k < 2; ++k) {
    const ThetaContext ell(fixtures::random_tau(1, rng), 1e-12);
    BoundaryScanOptions opts;
    opts.z_grid_per_dim = 6;
    opts.u_seeds = {0.0, 0.5, {0.0, 1.0}, -2.0, {1.0, -1.0}, 4.0};
    c.expect(vsing_scan_rank1(Rank1Data(ell, fixtures::random_point(1, rng, 0.5)), opts).empty(),
             "elliptic rank-1 scan not empty");
    opts.z_grid_per_dim = 4;
    opts.u_seeds = {0.0, 0.5, {0.0, 1.0}, -2.0, {1.0, -1.0}};
    const Rank2Data d2(ell, fixtures::random_point(1, rng, 0.5), fixtures::random_point(1, rng, 0.5), cplx(0.8, 0.3));
    c.expect(vsing_scan_rank2(d2, opts).empty(), "elliptic rank-2 scan not empty");
  }

  for (int k = 0; k < 3; ++k) {
    const CVector x = point_on_divisor(base, rng);
    const Rank2Data d(base, fixtures::random_point(2, rng, 0.5), CVector(2.0 * x), cplx(0.6, 0.9));
    for (Rank2Sign sign : {Rank2Sign::Minus, Rank2Sign::Plus}) {
      const VerticalSingRecord rec = vsing_classify_rank2(d, x, 0.0, 1.0, sign);
      const std::string tag = sign == Rank2Sign::Minus ? "minus" : "plus";
      c.expect(rec.residual < 1e-8, "rank-2 witness (" + tag + ") residual " + sci(rec.residual));
      c.expect(rec.type == LocationType::PartialOnBoundary && rec.type_condition, "rank-2 witness (" + tag + ") type");
    }
  }
  return c.outcome("rank-1 witness max " + sci(worst) +
                   "; elliptic scans empty; rank-2 witness under both signs (adopted: minus)");
}

// ---------------------------------------------------------------- 7

QMat qmat(int n, std::initializer_list<long> xs) {
  QMat m(n, n);
  std::size_t k = 0;
  for (long x : xs) m.a[k++] = x;
  return m;
}

QMat diag(std::initializer_list<long> xs) {
  const int n = static_cast<int>(xs.size());
  QMat m(n, n);
  for (Rational& v : m.a) v = 0;
  int i = 0;
  for (long x : xs) {
    m(i, i) = x;
    ++i;
  }
  return m;
}

QMat pad(const QMat& m, int size) {
  QMat out(size, size);
  for (Rational& v : out.a) v = 0;
  for (int i = 0; i < m.rows; ++i) {
    for (int j = 0; j < m.cols; ++j) out(i, j) = m(i, j);
  }
  return out;
}

Pencil x0_pencil(int size) {
  return Pencil(pad(qmat(3, {0, 1, 0, 1, 0, 0, 0, 0, 0}), size), pad(qmat(3, {0, 0, 1, 0, 0, 0, 1, 0, 0}), size));
}

void expect_segre(Checks& c, const Pencil& p, std::uint64_t seed, const std::string& name) {
  const PencilReport rep = analyze(p, seed);
  for (const char* clause : {"segre_i", "segre_ii", "segre_iii", "segre_iv", "corollary"}) {
    bool found = false;
    for (const ClauseCheck& cc : rep.checks) {
      if (cc.clause == clause) {
        found = true;
        c.expect(cc.pass, name + ": " + clause + " " + cc.detail);
      }
    }
    c.expect(found, name + ": " + clause + " missing");
  }
  c.expect(rep.all_pass(), name + ": report");
}

Outcome pencil_suite() {
  Checks c;
  const BinaryForm f1 = discriminant(Pencil(diag({1, 1, 1}), diag({1, 2, 3})));
  c.expect(f1.to_string() == "lambda^3 + 6*lambda^2*mu + 11*lambda*mu^2 + 6*mu^3", "diag discriminant " + f1.to_string());
  const Pencil bp(qmat(3, {0, 1, 0, 1, 0, 0, 0, 0, 0}), qmat(3, {0, 0, 1, 0, 1, 0, 1, 0, 0}));
  const BinaryForm f2 = discriminant(bp);
  c.expect(f2.to_string() == "-mu^3", "base-point discriminant " + f2.to_string());
  c.expect(discriminant(x0_pencil(3)).is_zero(), "x0 discriminant not zero");

  const auto roots = singular_members(bp);
  c.expect(roots.size() == 1 && roots[0].multiplicity == 3, "base-point multiplicity");
  if (roots.size() == 1) {
    const RootInfo& ri = roots[0];
    c.expect(ri.base_point && ri.double_ok, "clause (ii) attribution");
    c.expect(ri.tangent_along_line && ri.exactly_two_ok, "clause (iii) attribution");
  }

  expect_segre(c, x0_pencil(3), 5, "x0 pencil");
  expect_segre(c, x0_pencil(4), 9, "P3 corank-2");
  const Pencil conic = prescribed_vertex_generator(parse_vertex_curve("1,t,t^2,0,0"), 7);
  expect_segre(c, conic, 7, "P4 conic");
  const LowerRankCount lc2 = lower_rank_count(conic, 7);
  c.expect(vertex_analysis(conic).m == 2 && lc2.expected == 0 && lc2.agrees(), "P4 conic: m = 2, count 0");
  const Pencil line = prescribed_vertex_generator(parse_vertex_curve("1,t,0,0,0"), 7);
  expect_segre(c, line, 7, "P4 line");
  const LowerRankCount lc1 = lower_rank_count(line, 7);
  c.expect(vertex_analysis(line).m == 1 && lc1.expected == 2 && lc1.by_minors == 2 && lc1.agrees(),
           "P4 line: m = 1, count 2");

  bool empty = false;
  try {
    prescribed_vertex_generator(parse_vertex_curve("1,t,t^2"), 3);
  } catch (const Error& e) {
    empty = e.code() == ErrorCode::EmptySolutionSpace;
  }
  c.expect(empty, "P2 conic vertex curve accepted");
  return c.outcome("3 discriminants, base point mu = 3, Segre (i)-(iv) and tangency on 4 pencils, P2 conic rejected");
}

// ---------------------------------------------------------------- 8
//
// The oracle knows the Taylor expansion of each polynomial around a chosen
// integer point p, so every derivative at p is I! times a known coefficient.
// The library only sees the expanded polynomial in z.

struct Oracle {
  int g = 0;
  std::vector<int> center;
  std::map<std::vector<int>, long> taylor;  // exponent of (z - p) -> integer coefficient
  QPolynomial expanded;
};

long factorial(int n) {
  long f = 1;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

Oracle random_oracle(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> gd(1, 3), cd(-2, 2), coeff(-4, 4), deg(2, 4), count(2, 5);
  Oracle o;
  o.g = gd(rng);
  for (int l = 0; l < o.g; ++l) o.center.push_back(cd(rng));
  while (o.taylor.empty()) {
    const int n = count(rng);
    for (int t = 0; t < n; ++t) {
      std::vector<int> e(static_cast<std::size_t>(o.g), 0);
      int left = deg(rng);
      std::uniform_int_distribution<int> var(0, o.g - 1);
      while (left-- > 0) ++e[static_cast<std::size_t>(var(rng))];
      const long v = coeff(rng);
      if (v != 0) o.taylor[e] += v;
    }
    std::erase_if(o.taylor, [](const auto& kv) { return kv.second == 0; });
  }
  o.expanded = QPolynomial(o.g);
  for (const auto& [e, v] : o.taylor) {
    QPolynomial term = QPolynomial::constant(o.g, Rational(v));
    for (int l = 0; l < o.g; ++l) {
      const QPolynomial shifted =
          QPolynomial::variable(o.g, l) - QPolynomial::constant(o.g, Rational(o.center[static_cast<std::size_t>(l)]));
      for (int k = 0; k < e[static_cast<std::size_t>(l)]; ++k) term = term * shifted;
    }
    o.expanded += term;
  }
  return o;
}

long taylor_coeff(const Oracle& o, const std::vector<int>& e) {
  auto it = o.taylor.find(e);
  return it == o.taylor.end() ? 0 : it->second;
}

long derivative_at_center(const Oracle& o, const std::vector<int>& e) {
  long f = 1;
  for (int x : e) f *= factorial(x);
  return f * taylor_coeff(o, e);
}

// [t^k] d_l f(p + sum_i eta_i t^i) for k = 1..n, by substituting the curve into
// the Taylor polynomial of d_l f.
std::vector<std::vector<long>> curve_gradients(const Oracle& o, const std::vector<std::vector<long>>& eta) {
  const int n = static_cast<int>(eta.size());
  std::vector<std::vector<long>> out(static_cast<std::size_t>(n), std::vector<long>(static_cast<std::size_t>(o.g), 0));
  const auto mul = [n](const std::vector<long>& a, const std::vector<long>& b) {
    std::vector<long> r(static_cast<std::size_t>(n + 1), 0);
    for (int i = 0; i <= n; ++i) {
      for (int j = 0; i + j <= n; ++j) r[static_cast<std::size_t>(i + j)] += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
    }
    return r;
  };
  std::vector<std::vector<long>> coord(static_cast<std::size_t>(o.g), std::vector<long>(static_cast<std::size_t>(n + 1), 0));
  for (int l = 0; l < o.g; ++l) {
    for (int i = 1; i <= n; ++i) coord[static_cast<std::size_t>(l)][static_cast<std::size_t>(i)] = eta[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(l)];
  }
  for (int l = 0; l < o.g; ++l) {
    std::vector<long> series(static_cast<std::size_t>(n + 1), 0);
    for (const auto& [e, v] : o.taylor) {
      if (e[static_cast<std::size_t>(l)] == 0) continue;
      std::vector<int> de = e;
      const long c = v * de[static_cast<std::size_t>(l)]--;
      std::vector<long> term(static_cast<std::size_t>(n + 1), 0);
      term[0] = c;
      for (int m = 0; m < o.g; ++m) {
        for (int k = 0; k < de[static_cast<std::size_t>(m)]; ++k) term = mul(term, coord[static_cast<std::size_t>(m)]);
      }
      for (int k = 0; k <= n; ++k) series[static_cast<std::size_t>(k)] += term[static_cast<std::size_t>(k)];
    }
    for (int k = 1; k <= n; ++k) out[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(l)] = series[static_cast<std::size_t>(k)];
  }
  return out;
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(808);
  Checks c;
  int compared = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const Oracle o = random_oracle(rng);
    const PolynomialFunction f(o.expanded);
    const int g = o.g;
    CVector p(g);
    for (int l = 0; l < g; ++l) p(l) = cplx(o.center[static_cast<std::size_t>(l)], 0.0);
    const std::string tag = "oracle " + std::to_string(trial) + ": ";

    int order = 99;
    for (const auto& [e, v] : o.taylor) {
      int len = 0;
      for (int x : e) len += x;
      order = std::min(order, len);
    }

    // Raw jet up to order 4.
    const Jet jet = f.jet(p, 4);
    bool jet_ok = true;
    for (const MultiIndex& idx : jet.indices()) {
      jet_ok = jet_ok && jet[idx] == cplx(static_cast<double>(derivative_at_center(o, idx.entries())), 0.0);
      ++compared;
    }
    c.expect(jet_ok, tag + "jet values");

    // Stand-ins may exceed order g + 1, so search up to the full degree.
    const OrderReport ord = singularity_order(f, p, kRankEps, 4);
    c.expect(ord.order == order, tag + "order " + std::to_string(ord.order) + " vs " + std::to_string(order));

    // Hessian and its exact rank.
    const Quadric hess = hessian_quadric(f, p);
    QMat exact_hess(g, g);
    bool hess_ok = true;
    for (int i = 0; i < g; ++i) {
      for (int j = 0; j < g; ++j) {
        const long v = derivative_at_center(o, MultiIndex::unit(g, i).plus_unit(j).entries());
        exact_hess(i, j) = v;
        hess_ok = hess_ok && hess.mat(i, j) == cplx(static_cast<double>(v), 0.0);
      }
    }
    c.expect(hess_ok, tag + "Hessian");
    if (order == 2) {
      const int corank = corank_and_kernel(hess).corank;
      c.expect(corank == g - rank(exact_hess), tag + "corank");
    } else {
      c.expect(hess.indeterminate, tag + "Hessian should be indeterminate");
    }

    // Tangent cone: the lowest-degree Taylor part.
    const HomogeneousForm cone = tangent_cone(f, p, order);
    bool cone_ok = true;
    for (const MultiIndex& idx : multi_indices_of_length(g, order)) {
      cone_ok = cone_ok && cone.coefficient(idx) == cplx(static_cast<double>(taylor_coeff(o, idx.entries())), 0.0);
    }
    c.expect(cone_ok, tag + "tangent cone");

    // Polar quadric span: exact rank of the polar coefficient rows.
    const auto polars = multi_indices_of_length(g, order - 2);
    QMat rows(static_cast<int>(polars.size()), g * (g + 1) / 2);
    for (std::size_t r = 0; r < polars.size(); ++r) {
      int col = 0;
      for (int h = 0; h < g; ++h) {
        for (int k = h; k < g; ++k) {
          rows(static_cast<int>(r), col++) = derivative_at_center(o, polars[r].plus_unit(h).plus_unit(k).entries());
        }
      }
    }
    c.expect(polar_quadrics(cone).dim_projective == rank(rows) - 1, tag + "polar span");

    // Jet residuals along a random integer curve.
    std::uniform_int_distribution<int> ed(-3, 3);
    std::vector<std::vector<long>> eta(3, std::vector<long>(static_cast<std::size_t>(g)));
    std::vector<CVector> fields;
    for (auto& e : eta) {
      CVector v(g);
      for (int l = 0; l < g; ++l) {
        e[static_cast<std::size_t>(l)] = ed(rng);
        v(l) = cplx(static_cast<double>(e[static_cast<std::size_t>(l)]), 0.0);
      }
      fields.push_back(v);
    }
    const auto expected = curve_gradients(o, eta);
    const ResidualReport rep = curvilinear_residuals(f, p, fields);
    bool res_ok = rep.vectors.size() == 3;
    for (std::size_t k = 0; res_ok && k < 3; ++k) {
      for (int l = 0; l < g; ++l) {
        res_ok = res_ok && rep.vectors[k](l) == cplx(static_cast<double>(expected[k][static_cast<std::size_t>(l)]), 0.0);
      }
    }
    c.expect(res_ok, tag + "curve residual vectors");
  }
  return c.outcome("25 oracles, " + std::to_string(compared) +
                   " jet values plus order, Hessian, corank, cone, polar span and curve residuals");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"heat equation", heat_equation},
      {"parity and quasi-periodicity", parity_quasi_periodicity},
      {"product fixtures", product_fixtures},
      {"jet operators", jet_suite},
      {"tangency and 2Xi", tangency_suite},
      {"boundary", boundary_suite},
      {"pencils", pencil_suite},
      {"oracle equivalence", oracle_equivalence},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %zu %s: %s (%.1f s)\n", out.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
    failed += out.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
