#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "thetasing/linalg.hpp"
#include "thetasing/theta_core.hpp"

namespace thetasing {

struct GaussValue {
  CVector direction;   // unit gradient at the reduced point
  bool valid = false;  // false when the gradient vanishes (singular point of the divisor)
};

/// Projective Gauss map z -> (d_1 theta(z) : ... : d_g theta(z)).
GaussValue gauss_map(const ThetaContext& ctx, const CVector& z, double rank_tol = kRankEps);

/// 1 - |<a, b>| for unit vectors; 0 means the same projective point.
double projective_distance(const CVector& a, const CVector& b);

/// |theta(z)| exp(-pi y^T Im(tau)^{-1} y): the same at every lattice translate of z.
double invariant_theta_magnitude(const ThetaContext& ctx, const CVector& z);

struct TangencyWitness {
  CVector z;
  std::vector<CVector> shifts;  // u_1..u_h (u_0 = 0 implicit)
  double residual_theta = 0.0;  // max_i invariant |theta(z - u_i)|, i = 0..h
  double residual_rank = 0.0;   // sigma_{h+1} / sigma_1 of the unit gradient rows
  bool regular = false;         // all shifts away from 0 and each other, all gradients non-zero
  bool singular_row = false;    // some gradient vanished (z - u_i singular on the divisor)
};

TangencyWitness degeneracy_residual(const ThetaContext& ctx, const CVector& z, const std::vector<CVector>& shifts,
                                    double rank_tol = kRankEps);

/// Newton projection of z onto the theta divisor along the minimum-norm step.
std::optional<CVector> project_to_divisor(const ThetaContext& ctx, const CVector& z, double tol = 1e-13,
                                          int max_iterations = 60);

struct TangencyOptions {
  int grid_per_dim = 6;
  double tol = 1e-9;          // acceptance on the combined residual
  double dedup_radius = 1e-6;
  int max_iterations = 60;
  long long max_evaluations = 50'000'000;
};

/// Points z where the divisor and its translate by b are tangent (h = 1).
std::vector<TangencyWitness> find_tangency(const ThetaContext& ctx, const CVector& b,
                                           const TangencyOptions& opts = {});

/// Smallest combined residual max(theta terms, rank term) reached from the seed grid.
double tangency_residual(const ThetaContext& ctx, const CVector& b, const TangencyOptions& opts = {});

struct MembershipResult {
  bool member = false;
  std::vector<TangencyWitness> witnesses;          // regular witnesses
  std::vector<TangencyWitness> singular_witnesses;  // witnesses through singular points of the divisor
};

/// Pointwise probe of N_0: is there a regular tangency point for the shift b?
MembershipResult n0_membership(const ThetaContext& ctx, const CVector& b, const TangencyOptions& opts = {});

struct PathSample {
  double t = 0.0;
  double residual = 0.0;
};

struct Dip {
  double t_begin = 0.0;
  double t_end = 0.0;
  double t_min = 0.0;
  double residual_min = 0.0;
};

struct ScanResult {
  std::vector<PathSample> samples;
  std::vector<Dip> dips;
};

/// Samples t_k = t0 + k (t1 - t0) / (samples - 1) and records the tangency residual of b(t_k).
/// A dip opens below enter_tol and closes once the residual exceeds exit_tol.
ScanResult scan_path(const ThetaContext& ctx, const std::function<CVector(double)>& path, double t0, double t1,
                     int samples, double enter_tol, double exit_tol, const TangencyOptions& opts = {});

/// Piecewise-linear path through waypoints, parametrized by t in [0, 1].
std::function<CVector(double)> waypoint_path(std::vector<CVector> waypoints);

/// Distance from b to the set 2 Xi, from the 2^(2g) candidates b/2 + eta projected onto Xi.
double doubled_divisor_distance(const ThetaContext& ctx, const CVector& b);

}  // namespace thetasing
