#include "thetasing/sing_locus.hpp"

#include <algorithm>
#include <cmath>

namespace thetasing {

namespace {

double frobenius(const CMatrix& m) { return m.norm(); }

CMatrix symmetrize(const CMatrix& m) { return 0.5 * (m + m.transpose()); }

// Largest normalized derivative magnitude over all orders present in the jet.
std::vector<double> normalized_magnitudes(const Jet& jet, double scale) {
  std::vector<double> nu;
  double pw = 1.0;
  for (int k = 0; k <= jet.order(); ++k) {
    nu.push_back(jet.max_abs_at_order(k) / pw);
    pw *= scale;
  }
  return nu;
}

}  // namespace

Quadric Quadric::from_matrix(const CMatrix& m) {
  Quadric q;
  q.g = static_cast<int>(m.rows());
  q.mat = symmetrize(m);
  q.scale = frobenius(q.mat);
  return q;
}

cplx HomogeneousForm::coefficient(const MultiIndex& index) const {
  auto it = coeffs.find(index);
  return it == coeffs.end() ? cplx{0.0, 0.0} : it->second;
}

cplx HomogeneousForm::evaluate(const CVector& b) const {
  cplx sum{0.0, 0.0};
  for (const auto& [idx, c] : coeffs) {
    cplx term = c;
    for (int l = 0; l < g; ++l) {
      for (int e = 0; e < idx[l]; ++e) term *= b(l);
    }
    sum += term;
  }
  return sum;
}

double HomogeneousForm::norm() const {
  double s = 0.0;
  for (const auto& [idx, c] : coeffs) s += std::norm(c);
  return std::sqrt(s);
}

double derivative_scale(const LocalFunction& f) {
  return dynamic_cast<const ThetaFunction*>(&f) != nullptr ? 2.0 * kPi : 1.0;
}

OrderReport singularity_order(const LocalFunction& f, const CVector& z, double rank_tol, int max_order) {
  const int g = f.dim();
  if (max_order < 0) max_order = g + 1;
  if (dynamic_cast<const ThetaFunction*>(&f) != nullptr) max_order = std::min(max_order, kMaxThetaOrder);
  const Jet jet = f.jet(z, max_order);
  OrderReport rep;
  rep.magnitudes = normalized_magnitudes(jet, derivative_scale(f));
  const double top = *std::max_element(rep.magnitudes.begin(), rep.magnitudes.end());
  rep.order = max_order + 1;
  for (int k = 0; k <= max_order; ++k) {
    if (rep.magnitudes[static_cast<std::size_t>(k)] > rank_tol * top) {
      rep.order = k;
      break;
    }
  }
  rep.exceeds_dimension = rep.order > g;
  return rep;
}

Quadric hessian_quadric(const LocalFunction& f, const CVector& z, double rank_tol) {
  const Jet jet = f.jet(z, 3);
  const double s = derivative_scale(f);
  const auto nu = normalized_magnitudes(jet, s);
  const double ref = *std::max_element(nu.begin(), nu.end()) * s * s;
  Quadric q = Quadric::from_matrix(jet.hessian());
  q.indeterminate = q.scale <= rank_tol * ref;
  return q;
}

RankInfo corank_and_kernel(const Quadric& q, double eps) {
  if (q.indeterminate) return numerical_rank(CMatrix::Zero(q.g, q.g), eps);
  return numerical_rank(q.mat, eps);
}

QuadricSystem make_quadric_system(std::vector<Quadric> generators, double eps) {
  QuadricSystem sys;
  sys.generators = std::move(generators);
  if (sys.generators.empty()) return sys;
  const int g = sys.generators.front().g;
  CMatrix rows(static_cast<Eigen::Index>(sys.generators.size()), g * (g + 1) / 2);
  for (std::size_t i = 0; i < sys.generators.size(); ++i) {
    rows.row(static_cast<Eigen::Index>(i)) = upper_triangle(sys.generators[i].mat).transpose();
  }
  sys.dim_projective = numerical_rank(rows, eps).rank - 1;
  return sys;
}

CMatrix directional_hessian(const Jet& jet, const CVector& b) {
  const int g = jet.dim();
  if (jet.order() < 3) throw Error(ErrorCode::OrderTooHigh, "directional Hessian needs a jet of order 3");
  CMatrix out = CMatrix::Zero(g, g);
  for (int i = 0; i < g; ++i) {
    for (int j = i; j < g; ++j) {
      const MultiIndex ij = MultiIndex::unit(g, i).plus_unit(j);
      cplx v{0.0, 0.0};
      for (int l = 0; l < g; ++l) v += b(l) * jet[ij.plus_unit(l)];
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

SmoothnessReport smoothness_report(const LocalFunction& f, const CVector& z, double rank_tol) {
  const OrderReport ord = singularity_order(f, z, rank_tol);
  if (ord.order < 2) throw Error(ErrorCode::NotSingular, "point has singularity order " + std::to_string(ord.order));
  const int g = f.dim();
  const Jet jet = f.jet(z, 3);
  const int nq = g * (g + 1) / 2;

  SmoothnessReport rep;
  rep.a = CMatrix::Zero(g + 1, nq + g);
  int col = 0;
  for (int i = 0; i < g; ++i) {
    for (int j = i; j < g; ++j, ++col) {
      const MultiIndex ij = MultiIndex::unit(g, i).plus_unit(j);
      const cplx h = heat_factor(i, j);
      rep.a(0, col) = h * jet[ij];
      for (int k = 0; k < g; ++k) rep.a(k + 1, col) = h * jet[ij.plus_unit(k)];
    }
  }
  const CMatrix m = jet.hessian();
  for (int k = 0; k < g; ++k) {
    for (int l = 0; l < g; ++l) rep.a(k + 1, nq + l) = m(k, l);
  }
  rep.rank = numerical_rank(rep.a, rank_tol).rank;
  rep.smooth = rep.rank == g + 1;

  const Quadric q = hessian_quadric(f, z, rank_tol);
  const RankInfo ker = corank_and_kernel(q, rank_tol);
  rep.corank = ker.corank;
  std::vector<Quadric> gens{q};
  for (const CVector& b : ker.kernel) gens.push_back(Quadric::from_matrix(directional_hessian(jet, b)));
  rep.conormal = make_quadric_system(std::move(gens), rank_tol);
  rep.conormal_maximal = rep.conormal.dim_projective == rep.corank;
  return rep;
}

HomogeneousForm form_from_jet(const Jet& jet, int degree) {
  HomogeneousForm form;
  form.g = jet.dim();
  form.degree = degree;
  for (const MultiIndex& idx : multi_indices_of_length(form.g, degree)) {
    form.coeffs[idx] = jet[idx] / idx.factorial();
  }
  return form;
}

HomogeneousForm tangent_cone(const LocalFunction& f, const CVector& z, int r, double rank_tol) {
  const OrderReport ord = singularity_order(f, z, rank_tol, std::max(r, f.dim() + 1));
  if (ord.order != r) {
    throw Error(ErrorCode::OrderMismatch,
                "requested order " + std::to_string(r) + " but point has order " + std::to_string(ord.order));
  }
  return form_from_jet(f.jet(z, r), r);
}

std::vector<HomogeneousForm> asymptotic_cone(const LocalFunction& f, const CVector& z, int s, double rank_tol) {
  const OrderReport ord = singularity_order(f, z, rank_tol, std::max(s, f.dim() + 1));
  if (s < ord.order) {
    throw Error(ErrorCode::OrderMismatch,
                "cone order " + std::to_string(s) + " below singularity order " + std::to_string(ord.order));
  }
  const Jet jet = f.jet(z, s);
  std::vector<HomogeneousForm> forms;
  for (int k = ord.order; k <= s; ++k) forms.push_back(form_from_jet(jet, k));
  return forms;
}

QuadricSystem polar_quadrics(const HomogeneousForm& form, double eps) {
  if (form.degree < 2) throw Error(ErrorCode::InvalidInput, "polar quadrics need degree >= 2");
  const int g = form.g;
  std::vector<Quadric> gens;
  for (const MultiIndex& j : multi_indices_of_length(g, form.degree - 2)) {
    CMatrix p(g, g);
    for (int h = 0; h < g; ++h) {
      for (int k = h; k < g; ++k) {
        const MultiIndex full = j.plus_unit(h).plus_unit(k);
        p(h, k) = full.factorial() * form.coefficient(full);
        p(k, h) = p(h, k);
      }
    }
    gens.push_back(Quadric::from_matrix(p));
  }
  return make_quadric_system(std::move(gens), eps);
}

std::vector<CVector> vertex_of_form(const HomogeneousForm& form, double eps) {
  if (form.degree < 1) throw Error(ErrorCode::InvalidInput, "vertex needs degree >= 1");
  const int g = form.g;
  const auto rows = multi_indices_of_length(g, form.degree - 1);
  CMatrix sys(static_cast<Eigen::Index>(rows.size()), g);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int l = 0; l < g; ++l) {
      sys(static_cast<Eigen::Index>(r), l) =
          static_cast<double>(rows[r][l] + 1) * form.coefficient(rows[r].plus_unit(l));
    }
  }
  return numerical_rank(sys, eps).kernel;
}

HomogeneousForm power_of_linear_form(const CVector& h, int degree) {
  HomogeneousForm form;
  form.g = static_cast<int>(h.size());
  form.degree = degree;
  double dfact = 1.0;
  for (int k = 2; k <= degree; ++k) dfact *= k;
  for (const MultiIndex& idx : multi_indices_of_length(form.g, degree)) {
    cplx c = dfact / idx.factorial();
    for (int l = 0; l < form.g; ++l) {
      for (int e = 0; e < idx[l]; ++e) c *= h(l);
    }
    form.coeffs[idx] = c;
  }
  return form;
}

std::optional<PolarCoincidence> polar_coincidence(const HomogeneousForm& form, double eps) {
  if (form.degree < 3) throw Error(ErrorCode::InvalidInput, "polar coincidence needs degree >= 3");
  const QuadricSystem polars = polar_quadrics(form, eps);
  double top = 0.0;
  for (const Quadric& q : polars.generators) top = std::max(top, q.scale);
  if (top == 0.0) return std::nullopt;

  std::vector<CVector> kept;
  for (const Quadric& q : polars.generators) {
    if (q.scale > eps * top) kept.push_back(upper_triangle(q.mat));
  }
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      if (1.0 - projective_cosine(kept[i], kept[j]) > eps) return std::nullopt;
    }
  }

  // The dominant polar is proportional to h h^T; its largest column gives h.
  const Quadric* best = &polars.generators.front();
  for (const Quadric& q : polars.generators) {
    if (q.scale > best->scale) best = &q;
  }
  Eigen::Index col = 0;
  best->mat.colwise().norm().maxCoeff(&col);
  PolarCoincidence out;
  out.hyperplane = best->mat.col(col).normalized();
  const HomogeneousForm power = power_of_linear_form(out.hyperplane, form.degree);
  cplx num{0.0, 0.0};
  double den = 0.0;
  for (const auto& [idx, c] : power.coeffs) {
    num += std::conj(c) * form.coefficient(idx);
    den += std::norm(c);
  }
  out.factor = num / den;
  double err = 0.0;
  for (const auto& [idx, c] : power.coeffs) err += std::norm(form.coefficient(idx) - out.factor * c);
  out.residual = std::sqrt(err) / form.norm();
  return out;
}

SingularPointRecord describe_point(const ThetaContext& ctx, const CVector& z, double rank_tol) {
  SingularPointRecord rec;
  rec.reduced = ctx.reduce(z);
  rec.z = ctx.canonical(z);
  const ThetaFunction f(ctx);
  const CVector& z0 = rec.reduced.z0;
  const OrderReport ord = singularity_order(f, z0, rank_tol);
  rec.order = ord.order;
  rec.order_consistent = !ord.exceeds_dimension;

  const Jet jet = f.jet(z0, std::max(1, ord.order - 1));
  double res = 0.0;
  double pw = 1.0;
  for (int k = 0; k < std::max(1, ord.order); ++k) {
    res = std::max(res, jet.max_abs_at_order(k) / pw);
    pw *= 2.0 * kPi;
  }
  rec.residual = res;

  rec.hessian = hessian_quadric(f, z0, rank_tol);
  const RankInfo ker = corank_and_kernel(rec.hessian, rank_tol);
  rec.corank = ker.corank;
  rec.kernel_basis = ker.kernel;
  if (ord.order >= 2) rec.smooth_on_sg = smoothness_report(f, z0, rank_tol).smooth;
  return rec;
}

std::vector<SingularPointRecord> find_singular_points(const ThetaContext& ctx, const SingularSearchOptions& opts) {
  const int g = ctx.g();
  if (g > 4) throw Error(ErrorCode::InvalidInput, "singular point search supports g <= 4");
  if (opts.grid_per_dim < 1) throw Error(ErrorCode::InvalidInput, "grid_per_dim must be positive");

  // Seeds k / grid in each of the 2g lattice coordinates.
  const int dims = 2 * g;
  long long nseeds = 1;
  for (int d = 0; d < dims; ++d) nseeds *= opts.grid_per_dim;

  const ComplexSystem system = [&ctx, g](const CVector& z, CVector& f, CMatrix& jac) {
    const Jet jet = theta_jet_reduced(ctx, z, 2);
    const CVector grad = jet.gradient();
    const CMatrix hess = jet.hessian();
    const double s = 2.0 * kPi;
    f.resize(g + 1);
    jac.resize(g + 1, g);
    f(0) = jet.value();
    f.tail(g) = grad / s;
    jac.row(0) = grad.transpose();
    jac.bottomRows(g) = hess / s;
  };
  const auto normalizer = [&ctx](const CVector& z) { return ctx.reduce(z).z0; };

  LmOptions lm;
  lm.max_iterations = opts.max_iterations;
  lm.residual_tol = opts.newton_tol;

  std::vector<LmResult> results(static_cast<std::size_t>(nseeds));
#pragma omp parallel for schedule(dynamic, 4)
  for (long long idx = 0; idx < nseeds; ++idx) {
    RVector a(g), s(g);
    long long rest = idx;
    for (int d = 0; d < dims; ++d) {
      const double v = static_cast<double>(rest % opts.grid_per_dim) / opts.grid_per_dim;
      rest /= opts.grid_per_dim;
      if (d < g) {
        a(d) = v;
      } else {
        s(d - g) = v;
      }
    }
    const CVector seed = ctx.reduce(ctx.from_lattice_coordinates(a, s)).z0;
    results[static_cast<std::size_t>(idx)] = levenberg_marquardt(system, seed, lm, normalizer);
  }

  long long evaluations = 0;
  for (const LmResult& r : results) evaluations += r.evaluations;
  if (evaluations > opts.max_evaluations) {
    throw Error(ErrorCode::SolverBudgetExceeded, std::to_string(evaluations) + " theta evaluations");
  }

  // Singular points of higher order sit on 2-torsion points (curves of
  // double points cross there), and the solver stalls just short of them.
  const auto residual_at = [&system](const CVector& z) {
    CVector f;
    CMatrix jac;
    system(z, f, jac);
    return f.cwiseAbs().maxCoeff();
  };
  const auto snap_to_half_period = [&](const LmResult& r) {
    LatticeCoordinates lc = ctx.lattice_coordinates(r.x);
    for (int i = 0; i < g; ++i) {
      lc.a(i) = std::round(2.0 * lc.a(i)) / 2.0;
      lc.s(i) = std::round(2.0 * lc.s(i)) / 2.0;
    }
    const CVector half = ctx.reduce(ctx.from_lattice_coordinates(lc.a, lc.s)).z0;
    if (ctx.lattice_distance(half, r.x) < opts.dedup_radius &&
        residual_at(half) <= std::max(r.residual, ctx.tol())) {
      return std::make_pair(half, residual_at(half));
    }
    return std::make_pair(r.x, r.residual);
  };

  std::vector<std::pair<CVector, double>> accepted;
  for (const LmResult& r : results) {
    if (!r.converged || !(r.residual < opts.newton_tol)) continue;
    auto cand = snap_to_half_period(r);
    auto dup = std::find_if(accepted.begin(), accepted.end(), [&](const auto& p) {
      return ctx.lattice_distance(p.first, cand.first) < opts.dedup_radius;
    });
    if (dup == accepted.end()) {
      accepted.push_back(std::move(cand));
    } else if (cand.second < dup->second) {
      *dup = std::move(cand);
    }
  }

  std::vector<SingularPointRecord> records(accepted.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(accepted.size()); ++i) {
    records[static_cast<std::size_t>(i)] = describe_point(ctx, accepted[static_cast<std::size_t>(i)].first, opts.rank_tol);
  }
  return records;
}

}  // namespace thetasing
