#pragma once

#include <random>

#include "thetasing/theta_core.hpp"

namespace fixtures {

using thetasing::cplx;
using thetasing::CMatrix;
using thetasing::CVector;

inline CMatrix diag_i(int g) { return CMatrix::Identity(g, g) * cplx(0.0, 1.0); }

/// Random period matrix with Im(tau) = L L^T + g I/2, entries of moderate size.
inline CMatrix random_tau(int g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.5, 0.5);
  Eigen::MatrixXd re(g, g), l(g, g);
  for (int i = 0; i < g; ++i) {
    for (int j = 0; j < g; ++j) {
      re(i, j) = u(rng);
      l(i, j) = 0.4 * u(rng);
    }
  }
  re = 0.5 * (re + re.transpose()).eval();
  Eigen::MatrixXd im = l * l.transpose() + 0.8 * Eigen::MatrixXd::Identity(g, g);
  CMatrix tau(g, g);
  tau.real() = re;
  tau.imag() = im;
  return tau;
}

inline CVector random_point(int g, std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  CVector z(g);
  for (int i = 0; i < g; ++i) z(i) = cplx(u(rng), u(rng));
  return z;
}

inline CVector half_period(int g) { return CVector::Constant(g, cplx(0.5, 0.5)); }

}  // namespace fixtures
