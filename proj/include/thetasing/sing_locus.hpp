#pragma once

#include <map>
#include <optional>
#include <vector>

#include "thetasing/linalg.hpp"
#include "thetasing/local_function.hpp"
#include "thetasing/theta_core.hpp"

namespace thetasing {

/// Quadric b^T M b = 0 in P^{g-1}.
struct Quadric {
  int g = 0;
  CMatrix mat;
  double scale = 0.0;          // Frobenius norm of mat
  bool indeterminate = false;  // mat numerically zero relative to the neighbouring derivatives

  static Quadric from_matrix(const CMatrix& m);
};

struct QuadricSystem {
  std::vector<Quadric> generators;
  int dim_projective = -1;  // rank of the generators' upper-triangular coefficient vectors, minus one
};

/// Homogeneous polynomial of a fixed degree; coefficient of z^I for |I| = degree.
struct HomogeneousForm {
  int g = 0;
  int degree = 0;
  std::map<MultiIndex, cplx> coeffs;

  cplx coefficient(const MultiIndex& index) const;
  cplx evaluate(const CVector& b) const;
  double norm() const;
};

struct OrderReport {
  int order = 0;
  bool exceeds_dimension = false;      // order > g: impossible for a theta divisor
  std::vector<double> magnitudes;      // max |d_I f| / scale^k for k = 0..max_order
};

struct SmoothnessReport {
  CMatrix a;                 // (g+1) x (g(g+1)/2 + g)
  int rank = 0;
  bool smooth = false;       // rank == g+1
  int corank = 0;            // corank of the Hessian quadric (g when indeterminate)
  QuadricSystem conormal;    // spanned by Q and d_b Q, b in ker Q
  bool conormal_maximal = false;  // conormal.dim_projective == corank
};

struct SingularPointRecord {
  CVector z;                 // representative with lattice coordinates in [0, 1)
  ReducedPoint reduced;
  int order = 0;
  bool order_consistent = true;
  Quadric hessian;
  int corank = 0;
  std::vector<CVector> kernel_basis;
  double residual = 0.0;
  bool smooth_on_sg = false;
};

struct SingularSearchOptions {
  int grid_per_dim = 4;
  double newton_tol = 1e-10;
  double dedup_radius = 1e-6;
  int max_iterations = 100;
  double rank_tol = kRankEps;
  long long max_evaluations = 200'000'000;
};

/// Scale used to compare derivatives of different orders: 2 pi for theta, 1 otherwise.
double derivative_scale(const LocalFunction& f);

OrderReport singularity_order(const LocalFunction& f, const CVector& z, double rank_tol = kRankEps,
                              int max_order = -1);

Quadric hessian_quadric(const LocalFunction& f, const CVector& z, double rank_tol = kRankEps);

/// Rank, corank and kernel of a quadric's matrix (corank g for the zero matrix).
RankInfo corank_and_kernel(const Quadric& q, double eps = kRankEps);

/// Rank of a list of quadrics as points of the space of symmetric matrices.
QuadricSystem make_quadric_system(std::vector<Quadric> generators, double eps = kRankEps);

/// Matrix d_b M = (d_i d_j d_b f) from a jet of order >= 3.
CMatrix directional_hessian(const Jet& jet, const CVector& b);

SmoothnessReport smoothness_report(const LocalFunction& f, const CVector& z, double rank_tol = kRankEps);

/// Lowest-order Taylor form sum_{|I|=r} d_I f(z) / I! z^I.
HomogeneousForm tangent_cone(const LocalFunction& f, const CVector& z, int r, double rank_tol = kRankEps);

/// Forms theta_r, ..., theta_s where r is the singularity order at z.
std::vector<HomogeneousForm> asymptotic_cone(const LocalFunction& f, const CVector& z, int s,
                                             double rank_tol = kRankEps);

/// Form built from a jet: coefficients d_I f / I! for |I| = degree.
HomogeneousForm form_from_jet(const Jet& jet, int degree);

/// Quadrics Q^J with entries d_{J+e_h+e_k} of the form, one per |J| = degree - 2.
QuadricSystem polar_quadrics(const HomogeneousForm& form, double eps = kRankEps);

/// Basis of {b : d_b form == 0}; empty when the vertex is empty.
std::vector<CVector> vertex_of_form(const HomogeneousForm& form, double eps = kRankEps);

struct PolarCoincidence {
  CVector hyperplane;   // unit vector h with form ~ c (h . z)^d
  cplx factor;
  double residual = 0.0;  // |form - c h^d| / |form|
};

/// When every polar quadric is projectively the same, the form is a power of a linear form.
std::optional<PolarCoincidence> polar_coincidence(const HomogeneousForm& form, double eps = 1e-8);

/// Coefficients of (h . z)^d as a form.
HomogeneousForm power_of_linear_form(const CVector& h, int degree);

std::vector<SingularPointRecord> find_singular_points(const ThetaContext& ctx,
                                                      const SingularSearchOptions& opts = {});

/// Record for a single point (no search): order, Hessian data, smoothness and residual.
SingularPointRecord describe_point(const ThetaContext& ctx, const CVector& z, double rank_tol = kRankEps);

}  // namespace thetasing
