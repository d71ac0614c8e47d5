#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "thetasing/exact.hpp"

namespace thetasing {

/// Pencil of quadrics in P^n spanned by the symmetric forms A and B. Members are
/// written A + tB, so (lambda : mu) = (1 : t) and t = infinity is the member B.
struct Pencil {
  int n = 0;
  QMat A;
  QMat B;

  /// Throws InvalidInput on shape problems or A = B = 0, NotSymmetric on asymmetric input.
  Pencil(QMat a, QMat b);

  PMat member() const { return linear_pencil(A, B); }
};

/// Binary form of degree n+1; coeffs[k] multiplies lambda^k mu^(degree-k).
struct BinaryForm {
  int degree = 0;
  std::vector<Rational> coeffs;

  bool is_zero() const;
  std::string to_string() const;
};

/// det(lambda A + mu B), expanded exactly.
BinaryForm discriminant(const Pencil& p);

/// One singular member, or one group of conjugate members sharing an irreducible
/// (or at least rank-homogeneous) factor of det(A + tB).
struct RootInfo {
  UPoly factor;                   // in t; zero polynomial for the member at infinity
  bool at_infinity = false;
  std::optional<Rational> value;  // set for rational roots
  int multiplicity = 0;           // of each root of the factor
  int rank = 0;
  int kernel_dim = 0;
  std::vector<QVec> kernel;       // rational roots and infinity only

  // Clause data; only evaluated where the member matrix is rational.
  bool clauses_evaluated = false;
  bool base_point = false;        // rank n: the vertex lies on every member
  bool tangent_along_line = false;// rank n, base point: the degenerate case of (iii)
  bool bound_ok = true;           // multiplicity >= n+1-rank
  bool double_ok = true;          // multiplicity >= 2 iff (rank < n or base point)
  bool exactly_two_ok = true;     // rank n: multiplicity == 2 iff the tangent condition holds
};

/// Square-free factorization of the discriminant with member ranks at each root.
/// Throws DegeneratePencil when the discriminant vanishes identically.
std::vector<RootInfo> singular_members(const Pencil& p);

struct GenericCorank {
  int r = 0;
  std::vector<PVec> kernel;           // primitive polynomial basis over Q(t)
  std::optional<PVec> vertex_curve;   // r = 1
};

GenericCorank generic_corank(const Pencil& p);

struct VertexAnalysis {
  int r = 0;
  int m = 0;                     // projective dimension of the span of all generic vertices
  int degree = 0;                // of the vertex variety
  std::vector<QVec> span_basis;  // rows spanning the subspace
  bool degree_ok = false;        // degree == m - r + 1
  bool bounds_ok = false;        // r <= m <= (n + r - 1) / 2
};

/// Throws InvalidInput when r = 0 and ConstantVertex when every generic vertex is the same.
/// The degree is the degree of the curve traced by the vertices in the Grassmannian: the
/// r x r minors of the kernel basis, divided by their gcd.
VertexAnalysis vertex_analysis(const Pencil& p);

struct LowerRankMember {
  UPoly factor;             // zero polynomial for infinity
  bool at_infinity = false;
  int rank = 0;
  int weight_minors = 0;    // multiplicity in the gcd of the generic-size minors
  int weight_restricted = 0;// multiplicity in the restricted discriminant
  bool weight_ok = false;   // weight_restricted >= n+1-r-rank
};

struct LowerRankCount {
  int expected = 0;         // n + r - 2m - 1
  int by_minors = 0;
  int by_restriction = 0;   // restricted degree minus twice the vertex meetings
  int meetings = 0;
  bool restricted_disc_nonzero = false;
  std::vector<LowerRankMember> members;
  std::uint64_t seed = 0;
  int attempts = 0;
  bool agrees() const { return by_minors == expected && by_restriction == expected; }
};

/// Counts the members of rank below the generic rank twice: through the minors, and
/// through a random rational subspace of dimension n - r. Throws UnluckySubspace when
/// ten subspaces in a row are not general enough.
LowerRankCount lower_rank_count(const Pencil& p, std::uint64_t seed);

struct IntersectionBound {
  int r = 0;
  int s = -1;     // projective dimension of ker A intersected with ker B
  bool holds = false;
};

IntersectionBound segre_intersection_bound(const Pencil& p);

struct TangencyCriterion {
  bool applicable = false;          // r >= 1 with a non-constant vertex
  int m = -1;
  bool span_in_base_locus = false;
  int common_tangent_dim = -1;      // projective dimension of the shared tangent space along the span
  int expected_dim = -1;            // n + r - m - 1
  bool holds = false;
};

TangencyCriterion tangency_criterion(const Pencil& p);

/// A pseudo-random pencil whose generic vertex curve is nu(t). nu must have coprime
/// entries (InvalidInput otherwise). Throws EmptySolutionSpace when no such pencil
/// with generic corank 1 exists.
Pencil prescribed_vertex_generator(const PVec& nu, std::uint64_t seed);

/// Parses "1,t,t^2,0,0" into a polynomial vector.
PVec parse_vertex_curve(const std::string& text);

struct ClauseCheck {
  std::string clause;
  bool pass = false;
  std::string detail;
};

struct PencilReport {
  int n = 0;
  BinaryForm disc;
  bool disc_zero = false;
  std::vector<RootInfo> roots;
  GenericCorank corank;
  std::optional<VertexAnalysis> vertex;
  std::optional<LowerRankCount> lower;
  IntersectionBound intersection;
  TangencyCriterion tangency;
  std::string vertex_note;   // why the vertex analysis was skipped, if it was
  std::vector<ClauseCheck> checks;

  bool all_pass() const;
};

PencilReport analyze(const Pencil& p, std::uint64_t seed);

}  // namespace thetasing
