#include "thetasing/theta_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <omp.h>

namespace thetasing {

namespace {

constexpr double kSymmetryTolerance = 1e-12;
constexpr std::size_t kBlockSize = 256;
constexpr std::size_t kParallelThreshold = 4 * kBlockSize;

// Neumaier summation for complex values, real and imaginary parts separately.
struct CompensatedSum {
  double re = 0.0, im = 0.0, cre = 0.0, cim = 0.0;

  static void add_one(double& s, double& c, double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x)) {
      c += (s - t) + x;
    } else {
      c += (x - t) + s;
    }
    s = t;
  }

  void add(cplx x) {
    add_one(re, cre, x.real());
    add_one(im, cim, x.imag());
  }

  cplx result() const { return {re + cre, im + cim}; }
};

double frac_canonical(double x) {
  double f = x - std::floor(x);
  if (f > 1.0 - 1e-9) f = 0.0;
  return f;
}

double wrap_centered(double x) { return x - std::round(x); }

// Evaluates points [begin, end) of the table into accumulators.
void accumulate_range(const ThetaContext& ctx, const LatticeTable& table, std::size_t begin, std::size_t end,
                      const CVector& z0, const Eigen::VectorXi& weight_shift, int order,
                      const std::vector<MultiIndex>& indices, std::vector<CompensatedSum>& acc) {
  const int g = ctx.g();
  const CMatrix& tau = ctx.tau();
  std::vector<cplx> powers(static_cast<std::size_t>(g * (order + 1)));
  for (std::size_t p = begin; p < end; ++p) {
    const int* k = &table.coords[p * static_cast<std::size_t>(g)];
    cplx quad{0.0, 0.0};
    cplx lin{0.0, 0.0};
    for (int a = 0; a < g; ++a) {
      if (k[a] == 0) continue;
      cplx row{0.0, 0.0};
      for (int b = 0; b < g; ++b) row += tau(a, b) * static_cast<double>(k[b]);
      quad += static_cast<double>(k[a]) * row;
      lin += static_cast<double>(k[a]) * z0(a);
    }
    const cplx term = std::exp(cplx(0.0, kPi) * quad + kTwoPiI * lin);
    for (int a = 0; a < g; ++a) {
      const cplx w = kTwoPiI * static_cast<double>(k[a] - weight_shift(a));
      cplx* pw = &powers[static_cast<std::size_t>(a * (order + 1))];
      pw[0] = 1.0;
      for (int e = 1; e <= order; ++e) pw[e] = pw[e - 1] * w;
    }
    for (std::size_t i = 0; i < indices.size(); ++i) {
      cplx v = term;
      const auto& ent = indices[i].entries();
      for (int a = 0; a < g; ++a) {
        if (ent[static_cast<std::size_t>(a)] != 0) {
          v *= powers[static_cast<std::size_t>(a * (order + 1) + ent[static_cast<std::size_t>(a)])];
        }
      }
      acc[i].add(v);
    }
  }
}

void check_order(int order) {
  if (order < 0 || order > kMaxThetaOrder) {
    throw Error(ErrorCode::OrderTooHigh, "derivative order " + std::to_string(order) + " exceeds " +
                                             std::to_string(kMaxThetaOrder));
  }
}

}  // namespace

SiegelMatrix::SiegelMatrix(const CMatrix& tau) {
  if (tau.rows() == 0 || tau.rows() != tau.cols()) {
    throw Error(ErrorCode::InvalidInput, "period matrix must be square and non-empty");
  }
  const double asym = (tau - tau.transpose()).cwiseAbs().maxCoeff();
  if (asym >= kSymmetryTolerance) {
    throw Error(ErrorCode::NotSymmetric, "asymmetry " + std::to_string(asym));
  }
  tau_ = 0.5 * (tau + tau.transpose());
  Eigen::LLT<RMatrix> llt(tau_.imag());
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::NotPositiveDefinite, "Im(tau) has no Cholesky factor");
  }
}

std::size_t LatticeTable::count_within(double r) const {
  return static_cast<std::size_t>(std::upper_bound(norms.begin(), norms.end(), r) - norms.begin());
}

LatticeTable build_lattice_table(int g, double radius) {
  LatticeTable table;
  table.g = g;
  table.radius = radius;
  const int bound = static_cast<int>(std::floor(radius));
  std::vector<std::pair<double, std::vector<int>>> pts;
  std::vector<int> cur(static_cast<std::size_t>(g), -bound);
  const double r2 = radius * radius;
  while (true) {
    double n2 = 0.0;
    for (int v : cur) n2 += static_cast<double>(v) * v;
    if (n2 <= r2) pts.emplace_back(std::sqrt(n2), cur);
    int pos = g - 1;
    while (pos >= 0 && cur[static_cast<std::size_t>(pos)] == bound) {
      cur[static_cast<std::size_t>(pos)] = -bound;
      --pos;
    }
    if (pos < 0) break;
    ++cur[static_cast<std::size_t>(pos)];
  }
  std::sort(pts.begin(), pts.end());
  table.coords.reserve(pts.size() * static_cast<std::size_t>(g));
  table.norms.reserve(pts.size());
  for (const auto& [n, c] : pts) {
    table.norms.push_back(n);
    table.coords.insert(table.coords.end(), c.begin(), c.end());
  }
  return table;
}

ThetaContext::ThetaContext(const CMatrix& tau, double tol) : sigma_(tau), tol_(tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidInput, "tolerance must be positive");
  im_tau_ = sigma_.tau().imag();
  Eigen::LLT<RMatrix> llt(im_tau_);
  cholesky_ = llt.matrixL();
  im_tau_inv_ = llt.solve(RMatrix::Identity(g(), g()));
  Eigen::SelfAdjointEigenSolver<RMatrix> eig(im_tau_);
  lambda_min_ = eig.eigenvalues().minCoeff();
  if (!(lambda_min_ > 0.0)) throw Error(ErrorCode::NotPositiveDefinite, "smallest eigenvalue is not positive");
  const double lambda_max = eig.eigenvalues().maxCoeff();
  const double center = 0.5 * std::sqrt(static_cast<double>(g()));
  const double env = kPi * lambda_max * 0.25 * g();
  table_ = std::make_shared<const LatticeTable>(
      build_lattice_table(g(), truncation_radius(kMaxThetaOrder, center, 2.0 * center, env)));
}

LatticeCoordinates ThetaContext::lattice_coordinates(const CVector& z) const {
  LatticeCoordinates lc;
  lc.s = im_tau_inv_ * z.imag();
  lc.a = z.real() - tau().real() * lc.s;
  return lc;
}

CVector ThetaContext::from_lattice_coordinates(const RVector& a, const RVector& s) const {
  return a.cast<cplx>() + tau() * s.cast<cplx>();
}

ReducedPoint ThetaContext::reduce(const CVector& z) const {
  const int n = g();
  LatticeCoordinates lc = lattice_coordinates(z);
  ReducedPoint rp;
  rp.shift_tau = Eigen::VectorXi(n);
  rp.shift_int = Eigen::VectorXi(n);
  RVector a(n), s(n);
  for (int i = 0; i < n; ++i) {
    rp.shift_tau(i) = static_cast<int>(std::round(lc.s(i)));
    rp.shift_int(i) = static_cast<int>(std::round(lc.a(i)));
    s(i) = lc.s(i) - rp.shift_tau(i);
    a(i) = lc.a(i) - rp.shift_int(i);
  }
  // Subtract the integer shifts exactly from z to keep full precision.
  const CVector nt = rp.shift_tau.cast<double>().cast<cplx>();
  rp.z0 = z - tau() * nt - rp.shift_int.cast<double>().cast<cplx>();
  const cplx quad = nt.dot(tau() * nt);  // dot conjugates the first argument; nt is real
  const cplx lin = nt.dot(rp.z0);
  rp.log_prefactor = -cplx(0.0, kPi) * quad - kTwoPiI * lin;
  return rp;
}

CVector ThetaContext::canonical(const CVector& z) const {
  LatticeCoordinates lc = lattice_coordinates(z);
  for (int i = 0; i < g(); ++i) {
    lc.a(i) = frac_canonical(lc.a(i));
    lc.s(i) = frac_canonical(lc.s(i));
  }
  return from_lattice_coordinates(lc.a, lc.s);
}

double ThetaContext::lattice_distance(const CVector& z1, const CVector& z2) const {
  const LatticeCoordinates d = lattice_coordinates(z1 - z2);
  double sum = 0.0;
  for (int i = 0; i < g(); ++i) {
    const double da = wrap_centered(d.a(i));
    const double ds = wrap_centered(d.s(i));
    sum += da * da + ds * ds;
  }
  return std::sqrt(sum);
}

double ThetaContext::envelope_exponent(const CVector& z) const {
  const RVector y = z.imag();
  return kPi * y.dot(im_tau_inv_ * y);
}

double ThetaContext::truncation_radius(int order, double center_norm, double shift_norm, double env_exp) const {
  auto radius_for = [&](double tol_eff) {
    return std::sqrt(std::max(0.0, -std::log(tol_eff) / (kPi * lambda_min_))) + center_norm + order;
  };
  double r = radius_for(tol_);
  for (int it = 0; it < 2; ++it) {
    const double poly = 1.0 + std::pow(2.0 * kPi * (r + shift_norm), order);
    const double count = std::pow(2.0 * r + 2.0, g());
    r = radius_for(tol_ / (poly * count) * std::exp(-env_exp));
  }
  return r;
}

std::shared_ptr<const LatticeTable> ThetaContext::lattice_for(double radius) const {
  if (radius <= table_->radius) return table_;
  return std::make_shared<const LatticeTable>(build_lattice_table(g(), radius));
}

Jet theta_jet_serial(const ThetaContext& ctx, const LatticeTable& table, std::size_t count, const CVector& z0,
                     const Eigen::VectorXi& weight_shift, int order) {
  Jet jet(ctx.g(), order);
  std::vector<CompensatedSum> acc(jet.indices().size());
  accumulate_range(ctx, table, 0, count, z0, weight_shift, order, jet.indices(), acc);
  for (std::size_t i = 0; i < acc.size(); ++i) jet.values()[i] = acc[i].result();
  return jet;
}

Jet theta_jet_parallel(const ThetaContext& ctx, const LatticeTable& table, std::size_t count, const CVector& z0,
                       const Eigen::VectorXi& weight_shift, int order) {
  Jet jet(ctx.g(), order);
  const std::size_t nidx = jet.indices().size();
  const std::size_t nblocks = (count + kBlockSize - 1) / kBlockSize;
  std::vector<cplx> partial(nblocks * nidx);
  const long long nb = static_cast<long long>(nblocks);
#pragma omp parallel for schedule(static) if (count >= kParallelThreshold && !omp_in_parallel())
  for (long long b = 0; b < nb; ++b) {
    const std::size_t begin = static_cast<std::size_t>(b) * kBlockSize;
    const std::size_t end = std::min(count, begin + kBlockSize);
    std::vector<CompensatedSum> acc(nidx);
    accumulate_range(ctx, table, begin, end, z0, weight_shift, order, jet.indices(), acc);
    for (std::size_t i = 0; i < nidx; ++i) partial[static_cast<std::size_t>(b) * nidx + i] = acc[i].result();
  }
  for (std::size_t i = 0; i < nidx; ++i) {
    CompensatedSum s;
    for (std::size_t b = 0; b < nblocks; ++b) s.add(partial[b * nidx + i]);
    jet.values()[i] = s.result();
  }
  return jet;
}

namespace {

Jet jet_at_reduced(const ThetaContext& ctx, const ReducedPoint& rp, int order, const Eigen::VectorXi& weight_shift) {
  const LatticeCoordinates lc = ctx.lattice_coordinates(rp.z0);
  const double center = lc.s.norm();
  const double shift = weight_shift.cast<double>().norm();
  const double radius = ctx.truncation_radius(order, center, shift, ctx.envelope_exponent(rp.z0));
  auto table = ctx.lattice_for(radius);
  return theta_jet_parallel(ctx, *table, table->count_within(radius), rp.z0, weight_shift, order);
}

}  // namespace

Jet theta_jet(const ThetaContext& ctx, const CVector& z, int order) {
  check_order(order);
  if (z.size() != ctx.g()) throw Error(ErrorCode::InvalidInput, "point dimension does not match g");
  const ReducedPoint rp = ctx.reduce(z);
  Jet jet = jet_at_reduced(ctx, rp, order, rp.shift_tau);
  if (rp.log_prefactor != cplx{0.0, 0.0}) {
    const cplx factor = std::exp(rp.log_prefactor);
    for (cplx& v : jet.values()) v *= factor;
  }
  return jet;
}

Jet theta_jet_reduced(const ThetaContext& ctx, const CVector& z, int order, ReducedPoint* reduced) {
  check_order(order);
  if (z.size() != ctx.g()) throw Error(ErrorCode::InvalidInput, "point dimension does not match g");
  const ReducedPoint rp = ctx.reduce(z);
  if (reduced != nullptr) *reduced = rp;
  return jet_at_reduced(ctx, rp, order, Eigen::VectorXi::Zero(ctx.g()));
}

cplx theta_value(const ThetaContext& ctx, const CVector& z) { return theta_jet(ctx, z, 0).value(); }

cplx theta_deriv(const ThetaContext& ctx, const CVector& z, const MultiIndex& index) {
  check_order(index.length());
  if (index.dim() != ctx.g()) throw Error(ErrorCode::InvalidInput, "multi-index dimension does not match g");
  return theta_jet(ctx, z, index.length())[index];
}

cplx heat_factor(int i, int j) { return 1.0 / (kTwoPiI * (i == j ? 2.0 : 1.0)); }

cplx tau_derivative(const ThetaContext& ctx, const CVector& z, int i, int j) {
  if (i < 0 || j < 0 || i >= ctx.g() || j >= ctx.g()) {
    throw Error(ErrorCode::IndexOutOfRange, "tau index outside 1..g");
  }
  const Jet jet = theta_jet(ctx, z, 2);
  return jet[MultiIndex::unit(ctx.g(), i).plus_unit(j)] * heat_factor(i, j);
}

}  // namespace thetasing
