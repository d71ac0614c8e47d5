#pragma once

#include <optional>
#include <vector>

#include "thetasing/sing_locus.hpp"
#include "thetasing/theta_core.hpp"

namespace thetasing {

/// Torus rank 1: base (B, Xi) of dimension g-1 and the extension class omega.
struct Rank1Data {
  ThetaContext base;
  CVector omega;

  /// Throws ZeroShift when omega is a lattice vector.
  Rank1Data(ThetaContext base_ctx, CVector omega_vec);
};

/// Torus rank 2 over a base of dimension g-2. t = 0 selects the degenerate variant.
struct Rank2Data {
  ThetaContext base;
  CVector omega1;
  CVector omega2;
  cplx t;

  /// Throws ZeroShift when omega1, omega2 or omega1 + omega2 is a lattice vector.
  Rank2Data(ThetaContext base_ctx, CVector w1, CVector w2, cplx t_value);
};

enum class LocationType {
  DeepOnBoundary,     // (i): every torus coordinate below the floor
  PartialOnBoundary,  // (ii): some but not all below the floor
  OffBoundary,        // (iii): none below the floor
};

const char* to_string(LocationType type);

/// Sign of the t u1 u2 term in the first rank-2 equation.
enum class Rank2Sign { Minus, Plus };

struct VerticalSingRecord {
  CVector z;
  std::vector<cplx> torus;        // u (rank 1) or u1, u2 (rank 2)
  LocationType type = LocationType::OffBoundary;
  std::vector<double> equations;  // normalized magnitudes of each equation
  double residual = 0.0;          // max of equations
  bool type_condition = false;    // the geometric condition attached to the type holds
  std::optional<Quadric> quadric; // rank 1 only
  int corank = -1;                // of the bordered quadric, rank 1 only
};

cplx gen_theta_rank1(const Rank1Data& d, const CVector& z, cplx u);

/// Equations xi(z) + u xi(z - w) = 0, xi(z - w) = 0, d_i xi(z) + u d_i xi(z - w) = 0,
/// each divided by the size of its terms (at least 1).
VerticalSingRecord vsing_residual_rank1(const Rank1Data& d, const CVector& z, cplx u, double tol = 1e-8);

/// The torus coordinate u = -d_i xi(z) / d_i xi(z - w) read off the gradients, with the
/// spread of the ratio over all i whose denominator is not negligible.
struct TorusCoordinate {
  cplx u;
  double spread = 0.0;
};
std::optional<TorusCoordinate> rank1_torus_coordinate(const Rank1Data& d, const CVector& z);

/// Bordered g x g matrix [[0, grad xi(z - w)], [grad xi(z - w)^T, M]] with
/// M_ij = d/dtau_ij xi(z) + u d/dtau_ij xi(z - w). Throws NotAVerticalSingularity
/// when the residual at (z, u) exceeds tol. Indeterminate when the whole matrix
/// vanishes, which needs z and z - w to be singular points of Xi.
Quadric quadric_rank1(const Rank1Data& d, const CVector& z, cplx u, double tol = 1e-8);

cplx gen_theta_rank2(const Rank2Data& d, const CVector& z, cplx u1, cplx u2);

/// The rank-2 system: first equation xi(z) -+ t u1 u2 xi(z - w12), then
/// u1 xi(z - w1) + t u1 u2 xi(z - w12), u2 xi(z - w2) + t u1 u2 xi(z - w12), then
/// the g-2 derivatives of the generalized theta function.
VerticalSingRecord vsing_classify_rank2(const Rank2Data& d, const CVector& z, cplx u1, cplx u2,
                                        Rank2Sign sign = Rank2Sign::Minus, double tol = 1e-8);

/// |gen_theta - (E1 + E2 + E3)| divided by the size of the terms. Zero for the
/// minus convention at every point, since E1 + E2 + E3 recombines into gen_theta.
double rank2_sign_defect(const Rank2Data& d, const CVector& z, cplx u1, cplx u2, Rank2Sign sign);

struct BoundaryScanOptions {
  int z_grid_per_dim = 4;
  std::vector<cplx> u_seeds = {{0.5, 0.0}, {0.0, 1.0}, {-2.0, 0.0}, {1.0, -1.0}};
  double tol = 1e-8;         // accepted residual
  double dedup_radius = 1e-6;
  int max_iterations = 60;
  long long max_evaluations = 50'000'000;
};

/// Seeded solves of the vertical-singularity system over the (z, u) chart.
std::vector<VerticalSingRecord> vsing_scan_rank1(const Rank1Data& d, const BoundaryScanOptions& opts = {});
std::vector<VerticalSingRecord> vsing_scan_rank2(const Rank2Data& d, const BoundaryScanOptions& opts = {});

}  // namespace thetasing
