#include "thetasing/boundary.hpp"

#include <algorithm>
#include <cmath>

#include "thetasing/gauss_tangency.hpp"

namespace thetasing {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

bool is_lattice_zero(const ThetaContext& ctx, const CVector& w) {
  return ctx.lattice_distance(w, CVector::Zero(ctx.g())) < kUFloor;
}

// Value, gradient / 2 pi and Hessian / (2 pi)^2 of xi at an unreduced point.
struct Local {
  cplx value;
  CVector grad;
  CMatrix hess;
};

Local local_at(const ThetaContext& ctx, const CVector& z, int order) {
  const Jet jet = theta_jet(ctx, z, order);
  Local l;
  l.value = jet.value();
  if (order >= 1) l.grad = jet.gradient() / kTwoPi;
  if (order >= 2) l.hess = jet.hessian() / (kTwoPi * kTwoPi);
  return l;
}

// |sum of terms| over the size of the largest term, floored at 1.
double normalized(cplx sum, std::initializer_list<double> term_sizes) {
  double size = 1.0;
  for (double s : term_sizes) size = std::max(size, s);
  return std::abs(sum) / size;
}

double normalized_vec(const CVector& sum, std::initializer_list<double> term_sizes) {
  double size = 1.0;
  for (double s : term_sizes) size = std::max(size, s);
  return sum.size() ? sum.cwiseAbs().maxCoeff() / size : 0.0;
}

// Singular point of Xi, judged at the reduced point against the second-order scale.
bool singular_on_divisor(const ThetaContext& ctx, const CVector& z, double tol) {
  const Jet jet = theta_jet_reduced(ctx, z, 2);
  const double scale = std::max(1.0, jet.max_abs_at_order(2) / (kTwoPi * kTwoPi));
  return std::abs(jet.value()) < tol * scale && jet.max_abs_at_order(1) / kTwoPi < tol * scale;
}

double max_of(const std::vector<double>& v) { return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end()); }

template <typename MakeRecord>
std::vector<VerticalSingRecord> run_scan(const ThetaContext& base, int torus_rank, const ComplexSystem& system,
                                         const BoundaryScanOptions& opts, MakeRecord make_record) {
  const int gb = base.g();
  if (opts.z_grid_per_dim < 1 || opts.u_seeds.empty()) {
    throw Error(ErrorCode::InvalidInput, "scan grid must be non-empty");
  }
  std::vector<CVector> z_seeds;
  long long zcount = 1;
  for (int d = 0; d < 2 * gb; ++d) zcount *= opts.z_grid_per_dim;
  for (long long idx = 0; idx < zcount; ++idx) {
    RVector a(gb), s(gb);
    long long rest = idx;
    for (int d = 0; d < 2 * gb; ++d) {
      const double v = (static_cast<double>(rest % opts.z_grid_per_dim) + 0.25) / opts.z_grid_per_dim - 0.5;
      rest /= opts.z_grid_per_dim;
      (d < gb ? a(d) : s(d - gb)) = v;
    }
    z_seeds.push_back(base.from_lattice_coordinates(a, s));
  }
  std::vector<std::vector<cplx>> u_seeds{{}};
  for (int r = 0; r < torus_rank; ++r) {
    std::vector<std::vector<cplx>> next;
    for (const auto& prefix : u_seeds) {
      for (cplx u : opts.u_seeds) {
        auto p = prefix;
        p.push_back(u);
        next.push_back(std::move(p));
      }
    }
    u_seeds = std::move(next);
  }

  const long long total = zcount * static_cast<long long>(u_seeds.size());
  LmOptions lm;
  lm.max_iterations = opts.max_iterations;
  lm.residual_tol = std::min(1e-10, opts.tol);
  std::vector<LmResult> runs(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(dynamic, 4)
  for (long long i = 0; i < total; ++i) {
    const auto& zs = z_seeds[static_cast<std::size_t>(i % zcount)];
    const auto& us = u_seeds[static_cast<std::size_t>(i / zcount)];
    CVector x(gb + torus_rank);
    x.head(gb) = zs;
    for (int r = 0; r < torus_rank; ++r) x(gb + r) = us[static_cast<std::size_t>(r)];
    runs[static_cast<std::size_t>(i)] = levenberg_marquardt(system, x, lm);
  }
  long long evaluations = 0;
  for (const LmResult& r : runs) evaluations += (1LL << torus_rank) * r.evaluations;
  if (evaluations > opts.max_evaluations) {
    throw Error(ErrorCode::SolverBudgetExceeded, std::to_string(evaluations) + " theta evaluations");
  }

  std::vector<VerticalSingRecord> out;
  for (const LmResult& r : runs) {
    if (!r.x.allFinite()) continue;
    VerticalSingRecord rec = make_record(r.x);
    if (!(rec.residual < opts.tol)) continue;
    const bool dup = std::any_of(out.begin(), out.end(), [&](const VerticalSingRecord& o) {
      double d = (o.z - rec.z).norm();
      for (std::size_t k = 0; k < o.torus.size(); ++k) d = std::max(d, std::abs(o.torus[k] - rec.torus[k]));
      return d < opts.dedup_radius;
    });
    if (!dup) out.push_back(std::move(rec));
  }
  return out;
}

}  // namespace

Rank1Data::Rank1Data(ThetaContext base_ctx, CVector omega_vec) : base(std::move(base_ctx)), omega(std::move(omega_vec)) {
  if (omega.size() != base.g()) throw Error(ErrorCode::InvalidInput, "omega has the wrong dimension");
  if (is_lattice_zero(base, omega)) throw Error(ErrorCode::ZeroShift, "omega is a lattice vector");
}

Rank2Data::Rank2Data(ThetaContext base_ctx, CVector w1, CVector w2, cplx t_value)
    : base(std::move(base_ctx)), omega1(std::move(w1)), omega2(std::move(w2)), t(t_value) {
  if (omega1.size() != base.g() || omega2.size() != base.g()) {
    throw Error(ErrorCode::InvalidInput, "omega has the wrong dimension");
  }
  if (is_lattice_zero(base, omega1) || is_lattice_zero(base, omega2) ||
      is_lattice_zero(base, CVector(omega1 + omega2))) {
    throw Error(ErrorCode::ZeroShift, "omega1, omega2 and omega1 + omega2 must be non-zero on B");
  }
}

const char* to_string(LocationType type) {
  switch (type) {
    case LocationType::DeepOnBoundary:
      return "i";
    case LocationType::PartialOnBoundary:
      return "ii";
    case LocationType::OffBoundary:
      return "iii";
  }
  return "?";
}

cplx gen_theta_rank1(const Rank1Data& d, const CVector& z, cplx u) {
  return theta_value(d.base, z) + u * theta_value(d.base, CVector(z - d.omega));
}

VerticalSingRecord vsing_residual_rank1(const Rank1Data& d, const CVector& z, cplx u, double tol) {
  const Local a = local_at(d.base, z, 1);
  const Local c = local_at(d.base, CVector(z - d.omega), 1);
  const double au = std::abs(u);
  VerticalSingRecord rec;
  rec.z = z;
  rec.torus = {u};
  rec.equations = {
      normalized(a.value + u * c.value, {std::abs(a.value), au * std::abs(c.value)}),
      normalized(c.value, {std::abs(c.value)}),
      normalized_vec(a.grad + u * c.grad, {a.grad.norm(), au * c.grad.norm()}),
  };
  rec.residual = max_of(rec.equations);
  if (au < kUFloor) {
    // On the double locus the point must come from Sing(Xi).
    rec.type = LocationType::PartialOnBoundary;
    rec.type_condition = singular_on_divisor(d.base, z, tol);
  } else {
    rec.type = LocationType::OffBoundary;
    const TangencyWitness w = degeneracy_residual(d.base, z, {d.omega});
    rec.type_condition = std::max(w.residual_theta, w.residual_rank) < tol;
  }
  return rec;
}

std::optional<TorusCoordinate> rank1_torus_coordinate(const Rank1Data& d, const CVector& z) {
  const Local a = local_at(d.base, z, 1);
  const Local c = local_at(d.base, CVector(z - d.omega), 1);
  const double cmax = c.grad.cwiseAbs().maxCoeff();
  if (!(cmax > 0.0)) return std::nullopt;
  std::vector<cplx> ratios;
  for (int i = 0; i < c.grad.size(); ++i) {
    if (std::abs(c.grad(i)) > 1e-6 * cmax) ratios.push_back(-a.grad(i) / c.grad(i));
  }
  TorusCoordinate tc;
  tc.u = ratios.front();
  for (cplx r : ratios) tc.spread = std::max(tc.spread, std::abs(r - tc.u));
  return tc;
}

Quadric quadric_rank1(const Rank1Data& d, const CVector& z, cplx u, double tol) {
  const VerticalSingRecord rec = vsing_residual_rank1(d, z, u, tol);
  if (!(rec.residual < tol)) {
    throw Error(ErrorCode::NotAVerticalSingularity, "residual " + std::to_string(rec.residual));
  }
  const int gb = d.base.g();
  const CVector shifted = z - d.omega;
  CMatrix m = CMatrix::Zero(gb + 1, gb + 1);
  const Jet ja = theta_jet(d.base, z, 2);
  const Jet jc = theta_jet(d.base, shifted, 2);
  const CVector border = jc.gradient();
  m.block(0, 1, 1, gb) = border.transpose();
  m.block(1, 0, gb, 1) = border;
  const CMatrix ha = ja.hessian();
  const CMatrix hc = jc.hessian();
  for (int i = 0; i < gb; ++i) {
    for (int j = 0; j < gb; ++j) {
      // d/dtau_ij through the heat equation, for the symmetric matrix entry.
      m(1 + i, 1 + j) = heat_factor(i, j) * (ha(i, j) + u * hc(i, j));
    }
  }
  Quadric q = Quadric::from_matrix(m);
  q.mat(0, 0) = cplx(0.0, 0.0);
  // The matrix vanishes identically when the border and M both cancel; measure
  // that against the individual derivatives, in units of second derivatives.
  double ref = 0.0;
  const Jet a3 = theta_jet(d.base, z, 3);
  const Jet c3 = theta_jet(d.base, shifted, 3);
  for (int k = 1; k <= 3; ++k) {
    const double unit = std::pow(kTwoPi, k - 2);
    ref = std::max({ref, a3.max_abs_at_order(k) / unit, std::abs(u) * c3.max_abs_at_order(k) / unit});
  }
  q.indeterminate = q.scale <= kRankEps * ref;
  return q;
}

cplx gen_theta_rank2(const Rank2Data& d, const CVector& z, cplx u1, cplx u2) {
  const ThetaContext& b = d.base;
  return theta_value(b, z) + u1 * theta_value(b, CVector(z - d.omega1)) + u2 * theta_value(b, CVector(z - d.omega2)) +
         d.t * u1 * u2 * theta_value(b, CVector(z - d.omega1 - d.omega2));
}

namespace {

struct Rank2Terms {
  Local x0, x1, x2, x12;
};

Rank2Terms rank2_terms(const Rank2Data& d, const CVector& z, int order) {
  return {local_at(d.base, z, order), local_at(d.base, CVector(z - d.omega1), order),
          local_at(d.base, CVector(z - d.omega2), order),
          local_at(d.base, CVector(z - d.omega1 - d.omega2), order)};
}

double sign_of(Rank2Sign s) { return s == Rank2Sign::Minus ? -1.0 : 1.0; }

}  // namespace

VerticalSingRecord vsing_classify_rank2(const Rank2Data& d, const CVector& z, cplx u1, cplx u2, Rank2Sign sign,
                                        double tol) {
  const Rank2Terms T = rank2_terms(d, z, 1);
  const cplx tuu = d.t * u1 * u2;
  const double a1 = std::abs(u1), a2 = std::abs(u2), atuu = std::abs(tuu);
  VerticalSingRecord rec;
  rec.z = z;
  rec.torus = {u1, u2};
  rec.equations = {
      normalized(T.x0.value + sign_of(sign) * tuu * T.x12.value, {std::abs(T.x0.value), atuu * std::abs(T.x12.value)}),
      normalized(u1 * T.x1.value + tuu * T.x12.value, {a1 * std::abs(T.x1.value), atuu * std::abs(T.x12.value)}),
      normalized(u2 * T.x2.value + tuu * T.x12.value, {a2 * std::abs(T.x2.value), atuu * std::abs(T.x12.value)}),
      normalized_vec(T.x0.grad + u1 * T.x1.grad + u2 * T.x2.grad + tuu * T.x12.grad,
                     {T.x0.grad.norm(), a1 * T.x1.grad.norm(), a2 * T.x2.grad.norm(), atuu * T.x12.grad.norm()}),
  };
  rec.residual = max_of(rec.equations);

  const bool small1 = a1 < kUFloor, small2 = a2 < kUFloor;
  if (small1 && small2) {
    rec.type = LocationType::DeepOnBoundary;
    rec.type_condition = singular_on_divisor(d.base, z, tol) &&
                         singular_on_divisor(d.base, CVector(z - d.omega1 - d.omega2), tol);
  } else if (small1 || small2) {
    // u_j = 0: xi(z) = 0, xi(z - w_k) = 0 and grad xi(z) = -u_k grad xi(z - w_k).
    rec.type = LocationType::PartialOnBoundary;
    const Local& other = small1 ? T.x2 : T.x1;
    const cplx uk = small1 ? u2 : u1;
    const double cond = std::max({normalized(T.x0.value, {std::abs(T.x0.value)}),
                                  normalized(other.value, {std::abs(other.value)}),
                                  normalized_vec(T.x0.grad + uk * other.grad,
                                                 {T.x0.grad.norm(), std::abs(uk) * other.grad.norm()})});
    rec.type_condition = cond < tol;
  } else {
    // z is a singular point of H: xi(z - w1) xi(z - w2) = t xi(z) xi(z - w12).
    rec.type = LocationType::OffBoundary;
    const cplx h = T.x1.value * T.x2.value - d.t * T.x0.value * T.x12.value;
    const CVector dh = T.x1.grad * T.x2.value + T.x1.value * T.x2.grad -
                       d.t * (T.x0.grad * T.x12.value + T.x0.value * T.x12.grad);
    const double s_val = std::max(std::abs(T.x1.value * T.x2.value), std::abs(d.t * T.x0.value * T.x12.value));
    const double s_grad = std::max({T.x1.grad.norm() * std::abs(T.x2.value), std::abs(T.x1.value) * T.x2.grad.norm(),
                                    std::abs(d.t) * T.x0.grad.norm() * std::abs(T.x12.value),
                                    std::abs(d.t) * std::abs(T.x0.value) * T.x12.grad.norm()});
    rec.type_condition = std::max(normalized(h, {s_val}), normalized_vec(dh, {s_grad})) < tol;
  }
  return rec;
}

double rank2_sign_defect(const Rank2Data& d, const CVector& z, cplx u1, cplx u2, Rank2Sign sign) {
  const Rank2Terms T = rank2_terms(d, z, 0);
  const cplx tuu = d.t * u1 * u2;
  const cplx e1 = T.x0.value + sign_of(sign) * tuu * T.x12.value;
  const cplx e2 = u1 * T.x1.value + tuu * T.x12.value;
  const cplx e3 = u2 * T.x2.value + tuu * T.x12.value;
  const cplx f = T.x0.value + u1 * T.x1.value + u2 * T.x2.value + tuu * T.x12.value;
  return normalized(f - (e1 + e2 + e3), {std::abs(T.x0.value), std::abs(u1 * T.x1.value),
                                         std::abs(u2 * T.x2.value), std::abs(tuu * T.x12.value)});
}

std::vector<VerticalSingRecord> vsing_scan_rank1(const Rank1Data& d, const BoundaryScanOptions& opts) {
  const int gb = d.base.g();
  const ComplexSystem system = [&d, gb](const CVector& x, CVector& f, CMatrix& jac) {
    const CVector z = x.head(gb);
    const cplx u = x(gb);
    const Local a = local_at(d.base, z, 2);
    const Local c = local_at(d.base, CVector(z - d.omega), 2);
    f.resize(gb + 2);
    jac.setZero(gb + 2, gb + 1);
    f(0) = a.value + u * c.value;
    f(1) = c.value;
    f.tail(gb) = a.grad + u * c.grad;
    jac.block(0, 0, 1, gb) = kTwoPi * (a.grad + u * c.grad).transpose();
    jac(0, gb) = c.value;
    jac.block(1, 0, 1, gb) = kTwoPi * c.grad.transpose();
    jac.block(2, 0, gb, gb) = kTwoPi * (a.hess + u * c.hess);
    jac.block(2, gb, gb, 1) = c.grad;
  };
  return run_scan(d.base, 1, system, opts, [&](const CVector& x) {
    VerticalSingRecord rec = vsing_residual_rank1(d, x.head(gb), x(gb), opts.tol);
    if (rec.residual < opts.tol) {
      rec.quadric = quadric_rank1(d, rec.z, rec.torus[0], opts.tol);
      rec.corank = rec.quadric->indeterminate ? gb + 1 : numerical_rank(rec.quadric->mat).corank;
    }
    return rec;
  });
}

std::vector<VerticalSingRecord> vsing_scan_rank2(const Rank2Data& d, const BoundaryScanOptions& opts) {
  const int gb = d.base.g();
  const ComplexSystem system = [&d, gb](const CVector& x, CVector& f, CMatrix& jac) {
    const CVector z = x.head(gb);
    const cplx u1 = x(gb), u2 = x(gb + 1), t = d.t;
    const Rank2Terms T = rank2_terms(d, z, 2);
    const cplx tuu = t * u1 * u2;
    f.resize(gb + 3);
    jac.setZero(gb + 3, gb + 2);
    f(0) = T.x0.value - tuu * T.x12.value;
    f(1) = u1 * T.x1.value + tuu * T.x12.value;
    f(2) = u2 * T.x2.value + tuu * T.x12.value;
    f.tail(gb) = T.x0.grad + u1 * T.x1.grad + u2 * T.x2.grad + tuu * T.x12.grad;

    jac.block(0, 0, 1, gb) = kTwoPi * (T.x0.grad - tuu * T.x12.grad).transpose();
    jac(0, gb) = -t * u2 * T.x12.value;
    jac(0, gb + 1) = -t * u1 * T.x12.value;
    jac.block(1, 0, 1, gb) = kTwoPi * (u1 * T.x1.grad + tuu * T.x12.grad).transpose();
    jac(1, gb) = T.x1.value + t * u2 * T.x12.value;
    jac(1, gb + 1) = t * u1 * T.x12.value;
    jac.block(2, 0, 1, gb) = kTwoPi * (u2 * T.x2.grad + tuu * T.x12.grad).transpose();
    jac(2, gb) = t * u2 * T.x12.value;
    jac(2, gb + 1) = T.x2.value + t * u1 * T.x12.value;
    jac.block(3, 0, gb, gb) = kTwoPi * (T.x0.hess + u1 * T.x1.hess + u2 * T.x2.hess + tuu * T.x12.hess);
    jac.block(3, gb, gb, 1) = T.x1.grad + t * u2 * T.x12.grad;
    jac.block(3, gb + 1, gb, 1) = T.x2.grad + t * u1 * T.x12.grad;
  };
  return run_scan(d.base, 2, system, opts, [&](const CVector& x) {
    return vsing_classify_rank2(d, x.head(gb), x(gb), x(gb + 1), Rank2Sign::Minus, opts.tol);
  });
}

}  // namespace thetasing
