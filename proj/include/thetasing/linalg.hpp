#pragma once

#include <functional>
#include <vector>

#include "thetasing/types.hpp"

namespace thetasing {

struct RankInfo {
  int rank = 0;
  int corank = 0;                 // columns - rank
  std::vector<CVector> kernel;    // orthonormal basis of the right null space
  RVector singular_values;
};

/// Rank by counting singular values above eps times the largest one.
RankInfo numerical_rank(const CMatrix& m, double eps = kRankEps);

/// Minimum-norm least-squares solution of m x = rhs, singular values below
/// eps * sigma_max treated as zero.
CVector least_squares(const CMatrix& m, const CVector& rhs, double eps = kRankEps);

/// Upper-triangular entries (i <= j, row-major) of a square matrix.
CVector upper_triangle(const CMatrix& m);

/// |<a, b>| / (|a| |b|) for complex vectors; 1 means projectively equal.
double projective_cosine(const CVector& a, const CVector& b);

struct LmOptions {
  int max_iterations = 100;
  double residual_tol = 1e-10;
  double step_tol = 1e-12;
};

struct LmResult {
  CVector x;
  double residual = 0.0;   // max |F_k| at x
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Residual vector F and complex Jacobian J at x, for an analytic system.
using ComplexSystem = std::function<void(const CVector& x, CVector& f, CMatrix& jac)>;

/// Levenberg-damped Gauss-Newton on an overdetermined analytic system. The
/// optional normalizer maps each accepted iterate to an equivalent
/// representative (e.g. the reduced cell of the torus).
LmResult levenberg_marquardt(const ComplexSystem& system, CVector x0, const LmOptions& opts,
                             const std::function<CVector(const CVector&)>& normalizer = {});

}  // namespace thetasing
