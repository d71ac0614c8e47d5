#include "doctest.h"
#include "fixtures.hpp"
#include "thetasing/jets.hpp"
#include "thetasing/sing_locus.hpp"

using namespace thetasing;

namespace {

PolynomialFunction poly(const std::string& text, int g) { return PolynomialFunction(parse_polynomial(text, g)); }

CVector unit(int g, int i) { return CVector::Unit(g, i).cast<cplx>(); }

Rational q(long p, long d = 1) {
  Rational r(p, d);
  r.canonicalize();
  return r;
}

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
    for (int l = 0; l < g; ++l) {
      eta.push_back(q(v(rng), d(rng)));
    }
  }
  return out;
}

}  // namespace

TEST_CASE("closed form of the jet operators") {
  const JetTerms d2 = delta_expand(2);
  CHECK(d2 == JetTerms{{{2, 0}, q(1, 2)}, {{0, 1}, q(1)}});
  // The closed form gives D1 D2 coefficient 1 (the generating function
  // exp(d1 t + d2 t^2 + d3 t^3) agrees); a coefficient 1/2 breaks the product rule.
  const JetTerms d3 = delta_expand(3);
  CHECK(d3 == JetTerms{{{3, 0, 0}, q(1, 6)}, {{1, 1, 0}, q(1)}, {{0, 0, 1}, q(1)}});
  const JetTerms d4 = delta_expand(4);
  CHECK(d4 == JetTerms{{{4, 0, 0, 0}, q(1, 24)},
                       {{2, 1, 0, 0}, q(1, 2)},
                       {{0, 2, 0, 0}, q(1, 2)},
                       {{1, 0, 1, 0}, q(1)},
                       {{0, 0, 0, 1}, q(1)}});
  for (int k = 1; k <= 8; ++k) {
    CHECK(delta_expand(k) == delta_recursive(k));
    for (const auto& [h, c] : delta_expand(k)) {
      int weight = 0;
      for (std::size_t i = 0; i < h.size(); ++i) weight += static_cast<int>(i + 1) * h[i];
      CHECK(weight == k);
      CHECK(h.back() <= 1);
    }
  }
  CHECK_THROWS_AS(delta_expand(13), Error);
}

TEST_CASE("generating function identity") {
  // Delta^(k) at scalars d_i equals [t^k] exp(sum d_i t^i), computed exactly.
  const int n = 7;
  std::vector<Rational> d{q(1, 2), q(-2, 3), q(3), q(1, 5), q(-1), q(2, 7), q(5, 4)};
  std::vector<Rational> e(n + 1, q(0));
  e[0] = 1;
  for (int k = 1; k <= n; ++k) {
    Rational s = 0;
    for (int j = 1; j <= k; ++j) s += Rational(j) * d[static_cast<std::size_t>(j - 1)] * e[static_cast<std::size_t>(k - j)];
    e[static_cast<std::size_t>(k)] = s / k;
  }
  for (int k = 1; k <= n; ++k) {
    Rational total = 0;
    for (const auto& [h, c] : delta_expand(k)) {
      Rational term = c;
      for (std::size_t i = 0; i < h.size(); ++i) {
        for (int p = 0; p < h[i]; ++p) term *= d[i];
      }
      total += term;
    }
    CHECK(total == e[static_cast<std::size_t>(k)]);
  }
}

TEST_CASE("Leibniz identity") {
  const QPolynomial z1 = parse_polynomial("z1", 2);
  const QPolynomial z2 = parse_polynomial("z2", 2);
  std::vector<std::vector<Rational>> fields{{q(1), q(2)}, {q(-1, 2), q(3)}, {q(2, 3), q(-1)}};
  CHECK(leibniz_check(1, parse_polynomial("z1^3 + z2", 2), parse_polynomial("z1*z2 - 4", 2), fields));
  CHECK(leibniz_check(3, z1 * z1, z2, fields));

  std::vector<JetTerms> bad;
  for (int r = 0; r <= 2; ++r) bad.push_back(delta_expand(r));
  bad[2][{2, 0}] = q(1, 3);
  CHECK(!leibniz_check(2, z1, z1, fields, &bad));

  std::vector<JetTerms> half;
  for (int r = 0; r <= 3; ++r) half.push_back(delta_expand(r));
  half[3][{1, 1, 0}] = q(1, 2);
  CHECK(!leibniz_check(3, z1 * z1, z1, fields, &half));

  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> kd(1, 5), gd(1, 3);
  for (int trial = 0; trial < 50; ++trial) {
    const int g = gd(rng);
    const int k = kd(rng);
    const QPolynomial f = random_poly(rng, g, 4);
    const QPolynomial h = random_poly(rng, g, 3);
    CHECK(leibniz_check(k, f, h, random_fields(rng, g, k)));
  }
}

TEST_CASE("reparametrization") {
  std::vector<CVector> fields{unit(2, 0), unit(2, 1)};
  fields[1](0) = cplx(0.5, -1.0);

  const ReparametrizeResult id = reparametrize(fields, {1.0, 0.0});
  CHECK((id.composed[0] - fields[0]).norm() == 0.0);
  CHECK((id.composed[1] - fields[1]).norm() == 0.0);
  CHECK(id.composed_series_error < 1e-14);
  // Read literally, c = (1, 0) sends D_2 to D_1 rather than D_2.
  CHECK((id.literal[1] - fields[0]).norm() < 1e-15);
  CHECK(id.discrepancy > 0.5);
  CHECK(id.literal_series_error > 0.1);

  const ReparametrizeResult one = reparametrize({fields[0]}, {cplx(2.0, 1.0)});
  CHECK((one.literal[0] - cplx(2.0, 1.0) * fields[0]).norm() < 1e-15);
  CHECK(one.discrepancy < 1e-15);

  const cplx c1(1.5, 0.5), c2(-0.25, 2.0);
  const ReparametrizeResult two = reparametrize(fields, {c1, c2});
  CHECK((two.composed[1] - (c2 * fields[0] + c1 * c1 * fields[1])).norm() < 1e-14);
  CHECK(two.composed_series_error < 1e-13);
  CHECK(two.discrepancy > 0.1);

  CHECK_THROWS_AS(reparametrize(fields, {0.0, 1.0}), Error);
}

TEST_CASE("curvi-linear residuals on polynomial stand-ins") {
  const auto f = poly("z1^2", 2);
  const CVector z0 = CVector::Zero(2);
  CHECK(curvilinear_residuals(f, z0, {unit(2, 1)}).raw[0] == 0.0);
  CHECK(curvilinear_residuals(f, z0, {unit(2, 0)}).raw[0] == doctest::Approx(2.0));

  try {
    curvilinear_residuals(poly("z1 + z2^2", 2), z0, {unit(2, 0)});
    FAIL("expected BasePointNotSingular");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::BasePointNotSingular);
  }
}

TEST_CASE("containment conditions match the explicit low-order formulas") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    // Cubic and quartic terms only, so the origin is a singular point.
    QPolynomial p = parse_polynomial("z1^2*z2 - z3^3 + 2*z1*z2*z3", 3);
    std::uniform_int_distribution<int> c(-3, 3), e(0, 2);
    for (int t = 0; t < 4; ++t) p.add_term(MultiIndex(std::vector<int>{e(rng), e(rng), 2}), q(c(rng), 2));
    const PolynomialFunction f(p);
    const CVector z0 = CVector::Zero(3);
    std::vector<CVector> eta;
    for (int i = 0; i < 3; ++i) eta.push_back(fixtures::random_point(3, rng));

    const Jet jet = f.jet(z0, 4);
    const CMatrix m = jet.hessian();
    const CMatrix dm1 = directional_hessian(jet, eta[0]);
    // d_eta1^2 M
    CMatrix ddm = CMatrix::Zero(3, 3);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        for (int a = 0; a < 3; ++a) {
          for (int b = 0; b < 3; ++b) {
            ddm(i, j) += eta[0](a) * eta[0](b) *
                         jet[MultiIndex::unit(3, i).plus_unit(j).plus_unit(a).plus_unit(b)];
          }
        }
      }
    }
    const CVector a1 = m * eta[0];
    const CVector a2 = 0.5 * dm1 * eta[0] + m * eta[1];
    // The middle coefficient is 1, from the D1 D2 term of the closed form.
    const CVector a3 = ddm * eta[0] / 6.0 + dm1 * eta[1] + m * eta[2];
    const ResidualReport rep = curvilinear_residuals(f, z0, eta);
    CHECK((rep.vectors[0] - a1).norm() < 1e-12);
    CHECK((rep.vectors[1] - a2).norm() < 1e-12);
    CHECK((rep.vectors[2] - a3).norm() < 1e-12);
  }
}

TEST_CASE("constant vector fields") {
  const CVector z0 = CVector::Zero(2);
  for (double r : constant_field_residuals(poly("z1^2", 2), z0, unit(2, 1), 3).raw) CHECK(r == 0.0);
  const ResidualReport rep = constant_field_residuals(poly("z1^2 + z2^3", 2), z0, unit(2, 1), 2);
  CHECK(rep.raw[0] == 0.0);
  CHECK(rep.raw[1] == doctest::Approx(6.0));
  CHECK(rep.normalized[1] == doctest::Approx(3.0));

  // With eta = (b, 0, 0) the order-k condition is b . d_b^(k-1) M / k!.
  const auto f = poly("z1^2*z2 + z2^4 - 3*z1*z2^3 + z2^5", 2);
  CVector b(2);
  b << 0.7, -1.3;
  const ResidualReport cf = constant_field_residuals(f, z0, b, 4);
  const ResidualReport cl = curvilinear_residuals(f, z0, {b, CVector::Zero(2), CVector::Zero(2), CVector::Zero(2)});
  double fact = 1.0;
  for (int k = 1; k <= 4; ++k) {
    fact *= k;
    CHECK((cl.vectors[static_cast<std::size_t>(k - 1)] * fact - cf.vectors[static_cast<std::size_t>(k - 1)]).norm() < 1e-12);
  }
}

TEST_CASE("extending a jet") {
  const CVector z0 = CVector::Zero(2);
  const auto e1 = jet_extend(poly("z1^2", 2), z0, {unit(2, 1)});
  REQUIRE(e1.has_value());
  CHECK(e1->eta.norm() == 0.0);
  CHECK(e1->residual == 0.0);

  const auto e2 = jet_extend(poly("z1^2 + z2^4", 2), z0, {unit(2, 1)});
  REQUIRE(e2.has_value());
  CHECK(e2->eta.norm() < 1e-15);

  CHECK(!jet_extend(poly("z1^2 + z2^3", 2), z0, {unit(2, 1)}).has_value());

  // Non-trivial extension: z1^2 + z1 z2^2 needs eta_2 = -(1/2, 0) along e2.
  const auto e3 = jet_extend(poly("z1^2 + z1*z2^2", 2), z0, {unit(2, 1)});
  REQUIRE(e3.has_value());
  CHECK(std::abs(e3->eta(0) + 0.5) < 1e-14);
}

TEST_CASE("curve of double points on a triple product") {
  const ThetaContext ctx(fixtures::diag_i(3), 1e-12);
  const ThetaFunction f(ctx);
  CVector z0 = fixtures::half_period(3);
  z0(2) = cplx(0.21, 0.13);
  const ResidualReport rep = curvilinear_residuals(f, z0, {unit(3, 2), CVector::Zero(3), CVector::Zero(3)});
  for (double r : rep.normalized) CHECK(r < 1e-8);
  const ResidualReport off = curvilinear_residuals(f, z0, {unit(3, 0)});
  CHECK(off.normalized[0] > 1e-3);
}
