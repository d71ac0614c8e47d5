#include "thetasing/jets.hpp"

#include <algorithm>
#include <cmath>

#include "thetasing/sing_locus.hpp"

namespace thetasing {

namespace {

void check_jet_order(int k) {
  if (k < 0 || k > kMaxJetOrder) {
    throw Error(ErrorCode::OrderTooHigh, "jet order " + std::to_string(k) + " outside 0.." +
                                             std::to_string(kMaxJetOrder));
  }
}

Rational factorial(int n) {
  Rational f = 1;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void enumerate_weights(int k, int part, int remaining, FieldMonomial& h, JetTerms& out) {
  if (part == 0) {
    if (remaining != 0) return;
    Rational c = 1;
    for (int e : h) c /= factorial(e);
    out[h] = c;
    return;
  }
  for (int e = 0; e * part <= remaining; ++e) {
    h[static_cast<std::size_t>(part - 1)] = e;
    enumerate_weights(k, part - 1, remaining - e * part, h, out);
  }
  h[static_cast<std::size_t>(part - 1)] = 0;
}

// Evaluates Delta^(k) at commuting scalars d_1..d_k.
cplx delta_at_scalars(const JetTerms& terms, const std::vector<cplx>& d) {
  cplx sum{0.0, 0.0};
  for (const auto& [h, c] : terms) {
    cplx term = c.get_d();
    for (std::size_t i = 0; i < h.size(); ++i) {
      for (int e = 0; e < h[i]; ++e) term *= i < d.size() ? d[i] : cplx{0.0, 0.0};
    }
    sum += term;
  }
  return sum;
}

// Coefficients of a truncated power series in t (index = power).
using Series = std::vector<cplx>;

Series series_mul(const Series& a, const Series& b, int n) {
  Series out(static_cast<std::size_t>(n + 1), cplx{0.0, 0.0});
  for (int i = 0; i <= n; ++i) {
    for (int j = 0; i + j <= n; ++j) out[static_cast<std::size_t>(i + j)] += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
  }
  return out;
}

Series series_exp(const Series& a, int n) {
  Series e(static_cast<std::size_t>(n + 1), cplx{0.0, 0.0});
  e[0] = 1.0;
  for (int k = 1; k <= n; ++k) {
    cplx s{0.0, 0.0};
    for (int j = 1; j <= k; ++j) s += static_cast<double>(j) * a[static_cast<std::size_t>(j)] * e[static_cast<std::size_t>(k - j)];
    e[static_cast<std::size_t>(k)] = s / static_cast<double>(k);
  }
  return e;
}

cplx evaluate_symbol(const CPolynomial& symbol, const Jet& jet) {
  cplx sum{0.0, 0.0};
  for (const auto& [idx, c] : symbol.terms()) sum += c * jet[idx];
  return sum;
}

void require_singular_base(const LocalFunction& f, const CVector& z0) {
  if (singularity_order(f, z0).order < 2) {
    throw Error(ErrorCode::BasePointNotSingular, "theta and its gradient do not vanish at the base point");
  }
}

double normalizer_for(const Jet& jet) { return std::max(1.0, jet.hessian().norm()); }

// Vector (d_j Delta^(k) f)_j at the jet's base point.
CVector containment_vector(const JetTerms& terms, const std::vector<CVector>& fields, const Jet& jet) {
  const int g = jet.dim();
  const CPolynomial sym = delta_symbol(terms, fields);
  CVector v(g);
  for (int j = 0; j < g; ++j) v(j) = evaluate_symbol(sym * CPolynomial::variable(g, j), jet);
  return v;
}

}  // namespace

JetTerms delta_expand(int k) {
  check_jet_order(k);
  JetTerms out;
  FieldMonomial h(static_cast<std::size_t>(k), 0);
  enumerate_weights(k, k, k, h, out);
  return out;
}

JetTerms delta_recursive(int k) {
  check_jet_order(k);
  // level[kk][i]: part of Delta^(kk) with exactly i field factors.
  std::vector<std::vector<JetTerms>> level(static_cast<std::size_t>(k + 1));
  level[0].resize(1);
  level[0][0][FieldMonomial(static_cast<std::size_t>(k), 0)] = 1;
  for (int kk = 1; kk <= k; ++kk) {
    level[static_cast<std::size_t>(kk)].resize(static_cast<std::size_t>(kk + 1));
    for (int i = 1; i <= kk; ++i) {
      JetTerms& dst = level[static_cast<std::size_t>(kk)][static_cast<std::size_t>(i)];
      for (int j = 1; j <= kk - i + 1; ++j) {
        const auto& prev = level[static_cast<std::size_t>(kk - j)];
        if (static_cast<int>(prev.size()) <= i - 1) continue;
        for (const auto& [h, c] : prev[static_cast<std::size_t>(i - 1)]) {
          FieldMonomial next = h;
          ++next[static_cast<std::size_t>(j - 1)];
          dst[next] += c / i;
        }
      }
    }
  }
  JetTerms out;
  for (const JetTerms& part : level[static_cast<std::size_t>(k)]) {
    for (const auto& [h, c] : part) {
      if (sgn(c) != 0) out[h] += c;
    }
  }
  if (k == 0) out[FieldMonomial{}] = 1;
  return out;
}

JetOperator build_jet_operator(int order) {
  check_jet_order(order);
  JetOperator op;
  op.order = order;
  for (int k = 0; k <= order; ++k) op.terms.push_back(delta_expand(k));
  return op;
}

QPolynomial apply_jet_terms(const JetTerms& terms, const std::vector<std::vector<Rational>>& fields,
                            const QPolynomial& f) {
  QPolynomial out(f.dim());
  for (const auto& [h, c] : terms) {
    QPolynomial cur = f;
    for (std::size_t i = 0; i < h.size() && !cur.is_zero(); ++i) {
      if (h[i] == 0) continue;
      if (i >= fields.size()) {
        cur = QPolynomial(f.dim());
        break;
      }
      for (int e = 0; e < h[i]; ++e) cur = cur.directional(fields[i]);
    }
    out += cur * c;
  }
  return out;
}

bool leibniz_check(int k, const QPolynomial& f, const QPolynomial& g,
                   const std::vector<std::vector<Rational>>& fields, const std::vector<JetTerms>* table) {
  check_jet_order(k);
  std::vector<JetTerms> local;
  if (table == nullptr) {
    for (int r = 0; r <= k; ++r) local.push_back(delta_expand(r));
    table = &local;
  }
  if (static_cast<int>(table->size()) <= k) throw Error(ErrorCode::InvalidInput, "operator table too short");
  const QPolynomial lhs = apply_jet_terms((*table)[static_cast<std::size_t>(k)], fields, f * g);
  QPolynomial rhs(f.dim());
  for (int r = 0; r <= k; ++r) {
    rhs += apply_jet_terms((*table)[static_cast<std::size_t>(r)], fields, f) *
           apply_jet_terms((*table)[static_cast<std::size_t>(k - r)], fields, g);
  }
  return lhs == rhs;
}

ReparametrizeResult reparametrize(const std::vector<CVector>& fields, const std::vector<cplx>& c) {
  const int n = static_cast<int>(fields.size());
  if (n == 0 || c.size() != fields.size()) {
    throw Error(ErrorCode::InvalidInput, "need one coefficient per field");
  }
  if (std::abs(c[0]) == 0.0) throw Error(ErrorCode::ZeroLeadingCoefficient, "c_1 must be non-zero");
  check_jet_order(n);
  const Eigen::Index g = fields[0].size();

  ReparametrizeResult res;
  for (int i = 1; i <= n; ++i) {
    CVector lit = CVector::Zero(g);
    for (int j = 1; j <= i; ++j) lit += std::pow(c[static_cast<std::size_t>(j - 1)], i - j + 1) * fields[static_cast<std::size_t>(j - 1)];
    res.literal.push_back(lit);
  }

  // phi(t)^i as truncated series, i = 1..n
  Series phi(static_cast<std::size_t>(n + 1), cplx{0.0, 0.0});
  for (int i = 1; i <= n; ++i) phi[static_cast<std::size_t>(i)] = c[static_cast<std::size_t>(i - 1)];
  std::vector<Series> powers{phi};
  for (int i = 2; i <= n; ++i) powers.push_back(series_mul(powers.back(), phi, n));
  for (int k = 1; k <= n; ++k) {
    CVector comp = CVector::Zero(g);
    for (int i = 1; i <= k; ++i) comp += powers[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)] * fields[static_cast<std::size_t>(i - 1)];
    res.composed.push_back(comp);
    res.discrepancy = std::max(res.discrepancy, (comp - res.literal[static_cast<std::size_t>(k - 1)]).norm());
  }

  // Exponential test covector: Delta acts on exp(lambda . z) through d_i = lambda . eta_i.
  CVector lambda(g);
  for (Eigen::Index l = 0; l < g; ++l) lambda(l) = cplx(1.0 / static_cast<double>(l + 1), 0.3 * static_cast<double>(l + 1));
  std::vector<cplx> d, d_lit, d_comp;
  for (int i = 0; i < n; ++i) {
    d.push_back(lambda.transpose() * fields[static_cast<std::size_t>(i)]);
    d_lit.push_back(lambda.transpose() * res.literal[static_cast<std::size_t>(i)]);
    d_comp.push_back(lambda.transpose() * res.composed[static_cast<std::size_t>(i)]);
  }
  Series inner(static_cast<std::size_t>(n + 1), cplx{0.0, 0.0});
  for (int i = 1; i <= n; ++i) {
    for (int k = 0; k <= n; ++k) inner[static_cast<std::size_t>(k)] += d[static_cast<std::size_t>(i - 1)] * powers[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(k)];
  }
  const Series target = series_exp(inner, n);
  double scale = 1.0;
  for (const cplx& v : target) scale = std::max(scale, std::abs(v));
  for (int k = 1; k <= n; ++k) {
    const JetTerms terms = delta_expand(k);
    res.literal_series_error = std::max(res.literal_series_error,
                                        std::abs(delta_at_scalars(terms, d_lit) - target[static_cast<std::size_t>(k)]) / scale);
    res.composed_series_error = std::max(res.composed_series_error,
                                         std::abs(delta_at_scalars(terms, d_comp) - target[static_cast<std::size_t>(k)]) / scale);
  }
  return res;
}

CPolynomial delta_symbol(const JetTerms& terms, const std::vector<CVector>& fields) {
  if (fields.empty()) throw Error(ErrorCode::InvalidInput, "no vector fields");
  const int g = static_cast<int>(fields[0].size());
  std::vector<CPolynomial> linear;
  for (const CVector& eta : fields) {
    linear.push_back(CPolynomial::linear(std::vector<cplx>(eta.data(), eta.data() + eta.size())));
  }
  CPolynomial out(g);
  for (const auto& [h, c] : terms) {
    CPolynomial term = CPolynomial::constant(g, cplx(c.get_d(), 0.0));
    bool vanishes = false;
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (h[i] == 0) continue;
      if (i >= linear.size()) {
        vanishes = true;
        break;
      }
      for (int e = 0; e < h[i]; ++e) term = term * linear[i];
    }
    if (!vanishes) out += term;
  }
  return out;
}

ResidualReport curvilinear_residuals(const LocalFunction& f, const CVector& z0, const std::vector<CVector>& fields) {
  const int n = static_cast<int>(fields.size());
  check_jet_order(n);
  require_singular_base(f, z0);
  const Jet jet = f.jet(z0, std::max(2, n + 1));
  const double norm = normalizer_for(jet);
  ResidualReport rep;
  for (int k = 1; k <= n; ++k) {
    rep.vectors.push_back(containment_vector(delta_expand(k), fields, jet));
    const double r = rep.vectors.back().norm();
    rep.raw.push_back(r);
    rep.normalized.push_back(r / norm);
  }
  return rep;
}

ResidualReport constant_field_residuals(const LocalFunction& f, const CVector& z0, const CVector& b, int n) {
  if (n < 1) throw Error(ErrorCode::InvalidInput, "need at least one order");
  check_jet_order(n);
  require_singular_base(f, z0);
  const int g = f.dim();
  const Jet jet = f.jet(z0, n + 1);
  const double norm = normalizer_for(jet);
  const CPolynomial db = CPolynomial::linear(std::vector<cplx>(b.data(), b.data() + b.size()));
  CPolynomial power = db;  // d_b^(j+1)
  ResidualReport rep;
  for (int j = 0; j < n; ++j) {
    CVector v(g);
    for (int i = 0; i < g; ++i) v(i) = evaluate_symbol(power * CPolynomial::variable(g, i), jet);
    rep.vectors.push_back(v);
    rep.raw.push_back(v.norm());
    rep.normalized.push_back(v.norm() / norm);
    power = power * db;
  }
  return rep;
}

std::optional<JetExtension> jet_extend(const LocalFunction& f, const CVector& z0, const std::vector<CVector>& fields,
                                       double tol) {
  const int k = static_cast<int>(fields.size());
  check_jet_order(k + 1);
  const ResidualReport lower = curvilinear_residuals(f, z0, fields);
  for (double r : lower.normalized) {
    if (r > tol) return std::nullopt;
  }
  const int g = f.dim();
  const Jet jet = f.jet(z0, k + 2);
  std::vector<CVector> padded = fields;
  padded.push_back(CVector::Zero(g));
  const CVector w = containment_vector(delta_expand(k + 1), padded, jet);
  const CMatrix m = jet.hessian();
  JetExtension ext;
  ext.eta = least_squares(m, -w);
  ext.residual = (m * ext.eta + w).norm() / normalizer_for(jet);
  if (ext.residual > tol) return std::nullopt;
  return ext;
}

}  // namespace thetasing
