#include <doctest.h>

#include <chrono>
#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "thetasing/gauss_tangency.hpp"

using namespace thetasing;

namespace {

// A point on the divisor reached from a random start.
CVector point_on_divisor(const ThetaContext& ctx, std::mt19937_64& rng) {
  for (;;) {
    const auto p = project_to_divisor(ctx, fixtures::random_point(ctx.g(), rng, 0.5));
    if (p) return *p;
  }
}

}  // namespace

TEST_CASE("gauss map on a product surface") {
  const ThetaContext ctx(fixtures::diag_i(2), 1e-12);
  const cplx half(0.5, 0.5);
  CVector z(2);
  z << half, cplx(0.3, 0.1);
  const GaussValue gv = gauss_map(ctx, z);
  CHECK(gv.valid);
  CVector e1 = CVector::Zero(2);
  e1(0) = 1.0;
  CHECK(projective_distance(gv.direction, e1) < 1e-12);

  z << half, half;
  CHECK_FALSE(gauss_map(ctx, z).valid);
}

TEST_CASE("invariant theta magnitude is lattice periodic") {
  std::mt19937_64 rng(11);
  const ThetaContext ctx(fixtures::random_tau(2, rng), 1e-12);
  const CVector z = fixtures::random_point(2, rng, 0.4);
  RVector a(2), s(2);
  a << 1.0, -2.0;
  s << 1.0, 1.0;
  const CVector shifted = z + ctx.from_lattice_coordinates(a, s);
  const double m0 = invariant_theta_magnitude(ctx, z);
  CHECK(std::abs(invariant_theta_magnitude(ctx, shifted) - m0) < 1e-10 * std::max(1.0, m0));
}

TEST_CASE("projection lands on the divisor") {
  std::mt19937_64 rng(5);
  const ThetaContext ctx(fixtures::random_tau(2, rng), 1e-12);
  for (int k = 0; k < 5; ++k) {
    const CVector x = point_on_divisor(ctx, rng);
    CHECK(invariant_theta_magnitude(ctx, x) < 1e-11);
  }
}

TEST_CASE("doubled points give tangency witnesses") {
  std::mt19937_64 rng(21);
  const ThetaContext ctx(fixtures::random_tau(2, rng), 1e-12);
  for (int k = 0; k < 10; ++k) {
    const CVector x = point_on_divisor(ctx, rng);
    const TangencyWitness w = degeneracy_residual(ctx, x, {CVector(2.0 * x)});
    CHECK(w.residual_theta < 1e-9);
    CHECK(w.residual_rank < 1e-8);
    CHECK(w.regular);

    // The residual does not see lattice translates of z or of the shift.
    RVector a(2), s(2);
    a << 1.0, 0.0;
    s << -1.0, 2.0;
    const CVector lam = ctx.from_lattice_coordinates(a, s);
    const TangencyWitness moved = degeneracy_residual(ctx, CVector(x + lam), {CVector(2.0 * x - lam)});
    CHECK(std::abs(moved.residual_rank - w.residual_rank) < 2e-9);
    CHECK(std::abs(moved.residual_theta - w.residual_theta) < 2e-9);
  }
}

TEST_CASE("zero shifts are rejected or flagged") {
  std::mt19937_64 rng(3);
  const ThetaContext ctx(fixtures::random_tau(2, rng), 1e-12);
  CHECK_THROWS_AS(find_tangency(ctx, CVector::Zero(2)), Error);
  RVector a(2), s(2);
  a << 1.0, 0.0;
  s << 0.0, 1.0;
  CHECK_THROWS_AS(tangency_residual(ctx, ctx.from_lattice_coordinates(a, s)), Error);

  const CVector x = point_on_divisor(ctx, rng);
  const TangencyWitness trivial = degeneracy_residual(ctx, x, {CVector::Zero(2)});
  CHECK(trivial.residual_rank < 1e-12);
  CHECK_FALSE(trivial.regular);
}

TEST_CASE("membership search finds the doubled point") {
  std::mt19937_64 rng(31);
  const ThetaContext ctx(fixtures::random_tau(2, rng), 1e-12);
  const CVector x = point_on_divisor(ctx, rng);
  TangencyOptions opts;
  opts.grid_per_dim = 4;
  const MembershipResult m = n0_membership(ctx, CVector(2.0 * x), opts);
  REQUIRE(m.member);
  for (const TangencyWitness& w : m.witnesses) {
    CHECK(w.residual_rank < 1e-8);
    CHECK(w.residual_theta < 1e-8);
  }
}

TEST_CASE("shifts away from the doubled divisor are not tangent") {
  std::mt19937_64 rng(41);
  const ThetaContext ctx(fixtures::random_tau(2, rng), 1e-12);
  TangencyOptions opts;
  opts.grid_per_dim = 4;
  int tested = 0;
  while (tested < 4) {
    const CVector b = fixtures::random_point(2, rng, 0.5);
    if (doubled_divisor_distance(ctx, b) <= 1e-2) continue;
    ++tested;
    CHECK(tangency_residual(ctx, b, opts) > 1e-3);
  }
}

TEST_CASE("line scan dips where it crosses the doubled divisor") {
  std::mt19937_64 rng(51);
  const ThetaContext ctx(fixtures::random_tau(2, rng), 1e-12);
  const CVector x = point_on_divisor(ctx, rng);
  const CVector v = 2.0 * x;
  TangencyOptions opts;
  opts.grid_per_dim = 3;
  const ScanResult scan = scan_path(
      ctx, [&](double t) { return CVector(t * v); }, 0.8, 1.2, 9, 1e-6, 1e-5, opts);
  REQUIRE(scan.dips.size() == 1);
  CHECK(std::abs(scan.dips[0].t_min - 1.0) < 1e-12);
  CHECK(scan.samples.front().residual > 1e-3);
}

TEST_CASE("waypoint paths interpolate linearly") {
  CVector p0(1), p1(1), p2(1);
  p0 << cplx(0.0, 0.0);
  p1 << cplx(1.0, 0.0);
  p2 << cplx(1.0, 2.0);
  const auto path = waypoint_path({p0, p1, p2});
  CHECK(std::abs(path(0.25)(0) - cplx(0.5, 0.0)) < 1e-15);
  CHECK(std::abs(path(0.75)(0) - cplx(1.0, 1.0)) < 1e-15);
  CHECK(std::abs(path(1.0)(0) - cplx(1.0, 2.0)) < 1e-15);
}

TEST_CASE("gauss map is even on the divisor") {
  std::mt19937_64 rng(61);
  const ThetaContext ctx(fixtures::random_tau(2, rng), 1e-12);
  for (int k = 0; k < 100; ++k) {
    const CVector x = point_on_divisor(ctx, rng);
    const GaussValue a = gauss_map(ctx, x);
    const GaussValue b = gauss_map(ctx, CVector(-x));
    REQUIRE(a.valid);
    REQUIRE(b.valid);
    CHECK(projective_distance(a.direction, b.direction) < 1e-8);
  }
}

TEST_CASE("degeneracy residual ignores the order of the shifts") {
  std::mt19937_64 rng(71);
  const ThetaContext ctx(fixtures::random_tau(3, rng), 1e-12);
  const CVector z = fixtures::random_point(3, rng, 0.4);
  const CVector u1 = fixtures::random_point(3, rng, 0.4);
  const CVector u2 = fixtures::random_point(3, rng, 0.4);
  const TangencyWitness a = degeneracy_residual(ctx, z, {u1, u2});
  const TangencyWitness b = degeneracy_residual(ctx, z, {u2, u1});
  CHECK(std::abs(a.residual_rank - b.residual_rank) < 2e-12);
  CHECK(std::abs(a.residual_theta - b.residual_theta) < 2e-12);
  CHECK(a.regular);
}

TEST_CASE("membership agrees with the doubled-divisor distance") {
  std::mt19937_64 rng(81);
  const ThetaContext ctx(fixtures::random_tau(2, rng), 1e-12);
  TangencyOptions opts;
  opts.grid_per_dim = 4;
  const double delta = 1e-2;
  int checked = 0;
  for (int k = 0; checked < 50; ++k) {
    const CVector b = k % 2 == 0 ? CVector(2.0 * point_on_divisor(ctx, rng))
                                 : fixtures::random_point(2, rng, 0.5);
    const double dist = doubled_divisor_distance(ctx, b);
    // Shifts in the ambiguous band between the two tolerances say nothing.
    if (dist > 1e-8 && dist < delta) continue;
    ++checked;
    const bool near = dist < delta;
    CHECK(n0_membership(ctx, b, opts).member == near);
  }
}

TEST_CASE("closed symmetric path dips in antipodal pairs") {
  std::mt19937_64 rng(91);
  const ThetaContext ctx(fixtures::random_tau(2, rng), 1e-12);
  const CVector c = 2.0 * point_on_divisor(ctx, rng);
  const CVector d = fixtures::random_point(2, rng, 0.3);
  // b(t + 1/2) = -b(t).
  const auto path = [&](double t) { return CVector(std::cos(2 * kPi * t) * c + std::sin(2 * kPi * t) * d); };
  TangencyOptions opts;
  opts.grid_per_dim = 3;
  const ScanResult scan = scan_path(ctx, path, 0.0, 1.0, 25, 1e-6, 1e-5, opts);
  REQUIRE(scan.dips.size() >= 2);
  for (const Dip& dip : scan.dips) {
    const double partner = std::fmod(dip.t_min + 0.5, 1.0);
    const bool matched = std::any_of(scan.dips.begin(), scan.dips.end(), [&](const Dip& o) {
      return std::abs(o.t_min - partner) < 1e-9 || std::abs(std::abs(o.t_min - partner) - 1.0) < 1e-9;
    });
    CHECK(matched);
  }
}

TEST_CASE("line scan away from the doubled divisor has no dips") {
  std::mt19937_64 rng(101);
  const ThetaContext ctx(fixtures::random_tau(2, rng), 1e-12);
  CVector base, dir;
  do {
    base = fixtures::random_point(2, rng, 0.5);
    dir = fixtures::random_point(2, rng, 0.01);
  } while (doubled_divisor_distance(ctx, base) < 0.1);
  TangencyOptions opts;
  opts.grid_per_dim = 3;
  const ScanResult scan = scan_path(
      ctx, [&](double t) { return CVector(base + t * dir); }, 0.0, 1.0, 5, 1e-6, 1e-5, opts);
  CHECK(scan.dips.empty());
}

TEST_CASE("product of an elliptic curve and a surface") {
  std::mt19937_64 rng(111);
  const CMatrix tau2 = fixtures::random_tau(2, rng);
  CMatrix tau = CMatrix::Zero(3, 3);
  tau(0, 0) = cplx(0.0, 1.0);
  tau.bottomRightCorner(2, 2) = tau2;
  const ThetaContext ctx(tau, 1e-12);
  const ThetaContext surface(tau2, 1e-12);
  const CVector xs = point_on_divisor(surface, rng);
  TangencyOptions opts;
  opts.grid_per_dim = 3;

  // Shift (b1, 2x'): the translates share the component E x Xi' with parallel normals.
  CVector b(3);
  b << cplx(0.3, 0.2), 2.0 * xs(0), 2.0 * xs(1);
  const MembershipResult doubled = n0_membership(ctx, b, opts);
  CHECK(doubled.member);

  // Generic shift: tangency only through the singular locus.
  const CVector generic = fixtures::random_point(3, rng, 0.5);
  const MembershipResult m = n0_membership(ctx, generic, opts);
  CHECK_FALSE(m.member);
  for (const TangencyWitness& w : m.singular_witnesses) {
    CHECK(w.singular_row);
    CHECK(w.residual_theta < 1e-8);
  }
}
