#include "thetasing/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace thetasing {

RankInfo numerical_rank(const CMatrix& m, double eps) {
  RankInfo info;
  const int cols = static_cast<int>(m.cols());
  if (m.rows() == 0 || cols == 0) {
    info.corank = cols;
    for (int i = 0; i < cols; ++i) info.kernel.push_back(CVector::Unit(cols, i));
    return info;
  }
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeFullV);
  info.singular_values = svd.singularValues();
  const double smax = info.singular_values.size() > 0 ? info.singular_values(0) : 0.0;
  int rank = 0;
  if (smax > 0.0) {
    for (int i = 0; i < info.singular_values.size(); ++i) {
      if (info.singular_values(i) > eps * smax) ++rank;
    }
  }
  info.rank = rank;
  info.corank = cols - rank;
  const CMatrix& v = svd.matrixV();
  for (int i = rank; i < cols; ++i) info.kernel.push_back(v.col(i));
  return info;
}

CVector least_squares(const CMatrix& m, const CVector& rhs, double eps) {
  Eigen::JacobiSVD<CMatrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  const double smax = s.size() > 0 ? s(0) : 0.0;
  CVector coeffs = svd.matrixU().adjoint() * rhs;
  for (int i = 0; i < s.size(); ++i) {
    coeffs(i) = (smax > 0.0 && s(i) > eps * smax) ? coeffs(i) / s(i) : cplx{0.0, 0.0};
  }
  return svd.matrixV() * coeffs;
}

CVector upper_triangle(const CMatrix& m) {
  const int n = static_cast<int>(m.rows());
  CVector out(n * (n + 1) / 2);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) out(k++) = m(i, j);
  }
  return out;
}

double projective_cosine(const CVector& a, const CVector& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs(a.dot(b)) / (na * nb);
}

LmResult levenberg_marquardt(const ComplexSystem& system, CVector x0, const LmOptions& opts,
                             const std::function<CVector(const CVector&)>& normalizer) {
  LmResult res;
  res.x = std::move(x0);
  CVector f;
  CMatrix jac;
  system(res.x, f, jac);
  ++res.evaluations;
  double cost = f.squaredNorm();
  res.residual = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;

  CMatrix jhj = jac.adjoint() * jac;
  double mu = 1e-3 * std::max(1e-12, jhj.diagonal().real().maxCoeff());

  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it + 1;
    const CVector grad = jac.adjoint() * f;
    CMatrix lhs = jhj;
    lhs.diagonal().array() += mu;
    const CVector step = lhs.ldlt().solve(-grad);
    const double step_norm = step.norm();
    if (!std::isfinite(step_norm)) break;

    if (res.residual < opts.residual_tol && step_norm < opts.step_tol) {
      res.converged = true;
      return res;
    }

    CVector trial = res.x + step;
    if (normalizer) trial = normalizer(trial);
    CVector f_new;
    CMatrix jac_new;
    system(trial, f_new, jac_new);
    ++res.evaluations;
    const double cost_new = f_new.squaredNorm();
    if (std::isfinite(cost_new) && cost_new < cost) {
      res.x = std::move(trial);
      f = std::move(f_new);
      jac = std::move(jac_new);
      jhj = jac.adjoint() * jac;
      cost = cost_new;
      res.residual = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
      mu = std::max(mu / 3.0, 1e-20);
    } else {
      mu *= 4.0;
      // Damping this large means no descent is available at working precision.
      if (mu > 1e20 * std::max(1.0, jhj.diagonal().real().maxCoeff())) {
        res.converged = res.residual < opts.residual_tol;
        return res;
      }
    }
  }
  res.converged = res.residual < opts.residual_tol;
  return res;
}

}  // namespace thetasing
