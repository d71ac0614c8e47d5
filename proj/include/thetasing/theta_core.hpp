#pragma once

#include <memory>
#include <vector>

#include "thetasing/multi_index.hpp"
#include "thetasing/types.hpp"

namespace thetasing {

/// Highest derivative order accepted by the theta kernels.
inline constexpr int kMaxThetaOrder = 6;

/// A validated period matrix: symmetric with positive definite imaginary part.
class SiegelMatrix {
 public:
  /// Averages tau with its transpose when the asymmetry is below 1e-12,
  /// throws NotSymmetric otherwise and NotPositiveDefinite when Im(tau)
  /// has no Cholesky factor.
  explicit SiegelMatrix(const CMatrix& tau);

  int g() const { return static_cast<int>(tau_.rows()); }
  const CMatrix& tau() const { return tau_; }

 private:
  CMatrix tau_;
};

/// z = z0 + shift_int + tau * shift_tau and theta(z) = exp(log_prefactor) theta(z0).
struct ReducedPoint {
  CVector z0;
  Eigen::VectorXi shift_int;
  Eigen::VectorXi shift_tau;
  cplx log_prefactor;
};

/// Real coordinates (a, s) with z = a + tau * s.
struct LatticeCoordinates {
  RVector a;
  RVector s;
};

/// Integer points of a ball, sorted by norm (ties lexicographic).
struct LatticeTable {
  int g = 0;
  double radius = 0.0;
  std::vector<int> coords;     // g entries per point
  std::vector<double> norms;

  std::size_t size() const { return norms.size(); }
  /// Number of leading points with norm <= r.
  std::size_t count_within(double r) const;
};

LatticeTable build_lattice_table(int g, double radius);

class ThetaContext {
 public:
  ThetaContext(const CMatrix& tau, double tol);

  int g() const { return sigma_.g(); }
  double tol() const { return tol_; }
  const SiegelMatrix& sigma() const { return sigma_; }
  const CMatrix& tau() const { return sigma_.tau(); }
  const RMatrix& cholesky_imtau() const { return cholesky_; }
  const RMatrix& im_tau() const { return im_tau_; }
  const RMatrix& im_tau_inverse() const { return im_tau_inv_; }
  double lambda_min() const { return lambda_min_; }

  /// Same period matrix with a different absolute tolerance.
  ThetaContext with_tol(double tol) const { return ThetaContext(tau(), tol); }

  LatticeCoordinates lattice_coordinates(const CVector& z) const;
  CVector from_lattice_coordinates(const RVector& a, const RVector& s) const;

  /// Moves z into the centered cell a, s in [-1/2, 1/2] and records the shift.
  ReducedPoint reduce(const CVector& z) const;

  /// Representative with lattice coordinates in [0, 1).
  CVector canonical(const CVector& z) const;

  /// Torus distance between z1 and z2 measured in lattice coordinates.
  double lattice_distance(const CVector& z1, const CVector& z2) const;

  /// pi * Im(z)^T Im(tau)^{-1} Im(z): log of the size of the dominant theta term at z.
  double envelope_exponent(const CVector& z) const;

  /// Radius of the origin-centered ball of lattice points summed for a
  /// derivative of the given order, so the omitted tail stays below tol.
  double truncation_radius(int order, double center_norm, double shift_norm, double env_exp) const;

  /// Lattice table covering at least the given radius (shared cache when possible).
  std::shared_ptr<const LatticeTable> lattice_for(double radius) const;

 private:
  SiegelMatrix sigma_;
  double tol_;
  RMatrix im_tau_;
  RMatrix im_tau_inv_;
  RMatrix cholesky_;
  double lambda_min_ = 0.0;
  std::shared_ptr<const LatticeTable> table_;
};

/// Sum over a lattice table prefix of (2 pi i (k - weight_shift))^I exp(pi i k^T tau k + 2 pi i k^T z0)
/// for every |I| <= order. Serial reference: one compensated sum in table order.
Jet theta_jet_serial(const ThetaContext& ctx, const LatticeTable& table, std::size_t count, const CVector& z0,
                     const Eigen::VectorXi& weight_shift, int order);

/// Same sum split into fixed-size blocks evaluated with OpenMP; block sums are
/// merged in block order so the result does not depend on the thread count.
Jet theta_jet_parallel(const ThetaContext& ctx, const LatticeTable& table, std::size_t count, const CVector& z0,
                       const Eigen::VectorXi& weight_shift, int order);

/// All derivatives d_I theta(tau, z), |I| <= order, at an arbitrary point z.
Jet theta_jet(const ThetaContext& ctx, const CVector& z, int order);

/// Derivatives of theta at the reduced point z0 (no quasi-periodicity prefactor).
/// Zeros and projective data agree with those at z; magnitudes are O(1).
Jet theta_jet_reduced(const ThetaContext& ctx, const CVector& z, int order, ReducedPoint* reduced = nullptr);

cplx theta_value(const ThetaContext& ctx, const CVector& z);
cplx theta_deriv(const ThetaContext& ctx, const CVector& z, const MultiIndex& index);

/// d theta / d tau_ij through the heat equation, 0-based indices.
cplx tau_derivative(const ThetaContext& ctx, const CVector& z, int i, int j);

/// 1 / (2 pi i (1 + delta_ij)): converts d_i d_j into d/d tau_ij.
cplx heat_factor(int i, int j);

}  // namespace thetasing
