#include "thetasing/gauss_tangency.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace thetasing {

namespace {

constexpr double kTwoPi = 2.0 * kPi;

struct RowData {
  cplx value;
  CVector gradient;  // scaled by 1 / 2 pi
  double invariant = 0.0;
  bool vanishing = false;
};

RowData row_at(const ThetaContext& ctx, const CVector& z, double rank_tol) {
  ReducedPoint rp;
  const Jet jet = theta_jet_reduced(ctx, z, 2, &rp);
  RowData row;
  row.value = jet.value();
  row.gradient = jet.gradient() / kTwoPi;
  row.invariant = std::abs(row.value) * std::exp(-ctx.envelope_exponent(rp.z0));
  const double scale = std::max({std::abs(row.value), jet.max_abs_at_order(1) / kTwoPi,
                                 jet.max_abs_at_order(2) / (kTwoPi * kTwoPi)});
  row.vanishing = row.gradient.norm() <= rank_tol * scale;
  return row;
}

std::vector<CVector> lattice_seeds(const ThetaContext& ctx, int per_dim) {
  const int g = ctx.g();
  long long count = 1;
  for (int d = 0; d < 2 * g; ++d) count *= per_dim;
  std::vector<CVector> seeds;
  seeds.reserve(static_cast<std::size_t>(count));
  for (long long idx = 0; idx < count; ++idx) {
    RVector a(g), s(g);
    long long rest = idx;
    for (int d = 0; d < 2 * g; ++d) {
      // Offset by a quarter cell so seeds avoid the 2-torsion points, where the
      // tangency system is most degenerate.
      const double v = (static_cast<double>(rest % per_dim) + 0.25) / per_dim;
      rest /= per_dim;
      (d < g ? a(d) : s(d - g)) = v;
    }
    seeds.push_back(ctx.reduce(ctx.from_lattice_coordinates(a, s)).z0);
  }
  return seeds;
}

ComplexSystem tangency_system(const ThetaContext& ctx, const CVector& b) {
  const int g = ctx.g();
  return [&ctx, b, g](const CVector& z, CVector& f, CMatrix& jac) {
    const Jet ja = theta_jet_reduced(ctx, z, 2);
    const Jet jc = theta_jet_reduced(ctx, CVector(z - b), 2);
    const CVector a = ja.gradient() / kTwoPi;
    const CVector c = jc.gradient() / kTwoPi;
    const CMatrix ha = ja.hessian() / kTwoPi;
    const CMatrix hc = jc.hessian() / kTwoPi;
    const int minors = g * (g - 1) / 2;
    f.resize(2 + minors);
    jac.resize(2 + minors, g);
    f(0) = ja.value();
    f(1) = jc.value();
    jac.row(0) = kTwoPi * a.transpose();
    jac.row(1) = kTwoPi * c.transpose();
    int row = 2;
    for (int i = 0; i < g; ++i) {
      for (int j = i + 1; j < g; ++j, ++row) {
        f(row) = a(i) * c(j) - a(j) * c(i);
        for (int k = 0; k < g; ++k) {
          jac(row, k) = ha(i, k) * c(j) + a(i) * hc(j, k) - ha(j, k) * c(i) - a(j) * hc(i, k);
        }
      }
    }
  };
}

struct SeedRun {
  std::vector<LmResult> runs;
  long long evaluations = 0;
};

SeedRun run_seeds(const ThetaContext& ctx, const CVector& b, const TangencyOptions& opts) {
  if (ctx.lattice_distance(b, CVector::Zero(ctx.g())) < kUFloor) {
    throw Error(ErrorCode::ZeroShift, "shift b is within the zero floor of the lattice");
  }
  if (opts.grid_per_dim < 1) throw Error(ErrorCode::InvalidInput, "grid_per_dim must be positive");
  const std::vector<CVector> seeds = lattice_seeds(ctx, opts.grid_per_dim);
  const ComplexSystem system = tangency_system(ctx, b);
  const auto normalizer = [&ctx](const CVector& z) { return ctx.reduce(z).z0; };
  LmOptions lm;
  lm.max_iterations = opts.max_iterations;
  lm.residual_tol = std::min(1e-10, opts.tol);

  SeedRun out;
  out.runs.resize(seeds.size());
#pragma omp parallel for schedule(dynamic, 4)
  for (long long i = 0; i < static_cast<long long>(seeds.size()); ++i) {
    const auto k = static_cast<std::size_t>(i);
    out.runs[k] = levenberg_marquardt(system, seeds[k], lm, normalizer);
  }
  // Every system evaluation is two theta jets.
  for (const LmResult& r : out.runs) out.evaluations += 2LL * r.evaluations;
  if (out.evaluations > opts.max_evaluations) {
    throw Error(ErrorCode::SolverBudgetExceeded, std::to_string(out.evaluations) + " theta evaluations");
  }
  return out;
}

double combined(const TangencyWitness& w) { return std::max(w.residual_theta, w.residual_rank); }

}  // namespace

GaussValue gauss_map(const ThetaContext& ctx, const CVector& z, double rank_tol) {
  const RowData row = row_at(ctx, z, rank_tol);
  GaussValue out;
  out.valid = !row.vanishing;
  out.direction = out.valid ? CVector(row.gradient / row.gradient.norm()) : row.gradient;
  return out;
}

double projective_distance(const CVector& a, const CVector& b) {
  return std::max(0.0, 1.0 - projective_cosine(a, b));
}

double invariant_theta_magnitude(const ThetaContext& ctx, const CVector& z) {
  ReducedPoint rp;
  const Jet jet = theta_jet_reduced(ctx, z, 0, &rp);
  return std::abs(jet.value()) * std::exp(-ctx.envelope_exponent(rp.z0));
}

TangencyWitness degeneracy_residual(const ThetaContext& ctx, const CVector& z, const std::vector<CVector>& shifts,
                                    double rank_tol) {
  const int g = ctx.g();
  TangencyWitness w;
  w.z = z;
  w.shifts = shifts;
  const int rows = static_cast<int>(shifts.size()) + 1;
  CMatrix m(rows, g);
  bool shifts_ok = true;
  for (int i = 0; i < rows; ++i) {
    const CVector point = i == 0 ? z : CVector(z - shifts[static_cast<std::size_t>(i - 1)]);
    const RowData row = row_at(ctx, point, rank_tol);
    w.residual_theta = std::max(w.residual_theta, row.invariant);
    if (row.vanishing) {
      w.singular_row = true;
      m.row(i).setZero();
    } else {
      m.row(i) = row.gradient.transpose() / row.gradient.norm();
    }
    if (i > 0) {
      // u_i against u_0 = 0 and against every earlier shift.
      const CVector& ui = shifts[static_cast<std::size_t>(i - 1)];
      if (ctx.lattice_distance(ui, CVector::Zero(g)) < kUFloor) shifts_ok = false;
      for (int j = 1; j < i; ++j) {
        if (ctx.lattice_distance(ui, shifts[static_cast<std::size_t>(j - 1)]) < kUFloor) shifts_ok = false;
      }
    }
  }
  if (rows > g) {
    w.residual_rank = 0.0;
  } else {
    const Eigen::JacobiSVD<CMatrix> svd(m);
    const RVector& sv = svd.singularValues();
    w.residual_rank = sv(0) > 0.0 ? sv(rows - 1) / sv(0) : 1.0;
  }
  w.regular = shifts_ok && !w.singular_row;
  return w;
}

std::optional<CVector> project_to_divisor(const ThetaContext& ctx, const CVector& z, double tol,
                                          int max_iterations) {
  CVector x = ctx.reduce(z).z0;
  // Track the same point in the original coordinates: the reduced cell is
  // only used for evaluation, the returned point stays next to z.
  CVector shift = z - x;
  for (int it = 0; it < max_iterations; ++it) {
    const Jet red = theta_jet_reduced(ctx, x, 1);
    const cplx value = red.value();
    const CVector grad = red.gradient();
    const double gnorm2 = grad.squaredNorm();
    const double scale = std::max(std::abs(value), std::sqrt(gnorm2) / kTwoPi);
    if (std::abs(value) <= tol * std::max(1.0, scale)) return CVector(x + shift);
    if (gnorm2 == 0.0) return std::nullopt;
    // Minimum-norm solution of grad^T dz = -value.
    CVector step = -value * grad.conjugate() / gnorm2;
    const double len = step.norm();
    if (len > 0.25) step *= 0.25 / len;
    x += step;
  }
  return std::nullopt;
}

std::vector<TangencyWitness> find_tangency(const ThetaContext& ctx, const CVector& b, const TangencyOptions& opts) {
  const SeedRun seeds = run_seeds(ctx, b, opts);
  std::vector<TangencyWitness> out;
  for (const LmResult& r : seeds.runs) {
    if (!(r.residual < opts.tol)) continue;
    TangencyWitness w = degeneracy_residual(ctx, r.x, {b});
    if (!(combined(w) < opts.tol) && !w.singular_row) continue;
    if (w.singular_row && !(w.residual_theta < opts.tol)) continue;
    w.z = ctx.canonical(w.z);
    auto dup = std::find_if(out.begin(), out.end(), [&](const TangencyWitness& o) {
      return ctx.lattice_distance(o.z, w.z) < opts.dedup_radius;
    });
    if (dup == out.end()) {
      out.push_back(std::move(w));
    } else if (combined(w) < combined(*dup)) {
      *dup = std::move(w);
    }
  }
  return out;
}

double tangency_residual(const ThetaContext& ctx, const CVector& b, const TangencyOptions& opts) {
  const SeedRun seeds = run_seeds(ctx, b, opts);
  double best = std::numeric_limits<double>::infinity();
  for (const LmResult& r : seeds.runs) {
    const TangencyWitness w = degeneracy_residual(ctx, r.x, {b});
    best = std::min(best, combined(w));
  }
  return best;
}

MembershipResult n0_membership(const ThetaContext& ctx, const CVector& b, const TangencyOptions& opts) {
  MembershipResult out;
  for (TangencyWitness& w : find_tangency(ctx, b, opts)) {
    if (w.regular) {
      out.witnesses.push_back(std::move(w));
    } else {
      out.singular_witnesses.push_back(std::move(w));
    }
  }
  out.member = !out.witnesses.empty();
  return out;
}

ScanResult scan_path(const ThetaContext& ctx, const std::function<CVector(double)>& path, double t0, double t1,
                     int samples, double enter_tol, double exit_tol, const TangencyOptions& opts) {
  if (samples < 2) throw Error(ErrorCode::InvalidInput, "a scan needs at least two samples");
  if (!(exit_tol >= enter_tol)) throw Error(ErrorCode::InvalidInput, "exit tolerance must not be below entry");
  ScanResult out;
  out.samples.reserve(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    const double t = t0 + (t1 - t0) * k / (samples - 1);
    out.samples.push_back({t, tangency_residual(ctx, path(t), opts)});
  }

  bool open = false;
  Dip cur;
  for (std::size_t k = 0; k < out.samples.size(); ++k) {
    const PathSample& s = out.samples[k];
    if (!open) {
      if (s.residual < enter_tol) {
        open = true;
        cur = {s.t, s.t, s.t, s.residual};
      }
      continue;
    }
    if (s.residual > exit_tol) {
      out.dips.push_back(cur);
      open = false;
      continue;
    }
    cur.t_end = s.t;
    if (s.residual < cur.residual_min) {
      cur.residual_min = s.residual;
      cur.t_min = s.t;
    }
  }
  if (open) out.dips.push_back(cur);
  return out;
}

std::function<CVector(double)> waypoint_path(std::vector<CVector> waypoints) {
  if (waypoints.size() < 2) throw Error(ErrorCode::InvalidInput, "a path needs at least two waypoints");
  return [pts = std::move(waypoints)](double t) {
    const double segs = static_cast<double>(pts.size() - 1);
    const double x = std::clamp(t, 0.0, 1.0) * segs;
    const auto i = std::min(static_cast<std::size_t>(x), pts.size() - 2);
    const double frac = x - static_cast<double>(i);
    return CVector((1.0 - frac) * pts[i] + frac * pts[i + 1]);
  };
}

double doubled_divisor_distance(const ThetaContext& ctx, const CVector& b) {
  const int g = ctx.g();
  double best = std::numeric_limits<double>::infinity();
  const long long count = 1LL << (2 * g);
  for (long long mask = 0; mask < count; ++mask) {
    RVector a(g), s(g);
    for (int i = 0; i < g; ++i) {
      a(i) = (mask >> i) & 1 ? 0.5 : 0.0;
      s(i) = (mask >> (g + i)) & 1 ? 0.5 : 0.0;
    }
    const CVector c = CVector(b / 2.0) + ctx.from_lattice_coordinates(a, s);
    if (const auto p = project_to_divisor(ctx, c)) {
      best = std::min(best, 2.0 * ctx.lattice_distance(c, *p));
    }
  }
  return best;
}

}  // namespace thetasing
