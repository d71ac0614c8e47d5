#include "thetasing/multi_index.hpp"

#include <numeric>

namespace thetasing {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::NotSymmetric: return "NotSymmetric";
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::OrderTooHigh: return "OrderTooHigh";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::SolverBudgetExceeded: return "SolverBudgetExceeded";
    case ErrorCode::NotSingular: return "NotSingular";
    case ErrorCode::OrderMismatch: return "OrderMismatch";
    case ErrorCode::BasePointNotSingular: return "BasePointNotSingular";
    case ErrorCode::ZeroLeadingCoefficient: return "ZeroLeadingCoefficient";
    case ErrorCode::ZeroShift: return "ZeroShift";
    case ErrorCode::NotAVerticalSingularity: return "NotAVerticalSingularity";
    case ErrorCode::DegeneratePencil: return "DegeneratePencil";
    case ErrorCode::ConstantVertex: return "ConstantVertex";
    case ErrorCode::UnluckySubspace: return "UnluckySubspace";
    case ErrorCode::EmptySolutionSpace: return "EmptySolutionSpace";
  }
  return "Unknown";
}

MultiIndex::MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
  for (int e : entries_) {
    if (e < 0) throw Error(ErrorCode::InvalidInput, "negative multi-index entry");
  }
  length_ = std::accumulate(entries_.begin(), entries_.end(), 0);
}

MultiIndex MultiIndex::unit(int g, int i) {
  std::vector<int> e(static_cast<std::size_t>(g), 0);
  e[static_cast<std::size_t>(i)] = 1;
  return MultiIndex(std::move(e));
}

MultiIndex MultiIndex::plus_unit(int i) const {
  MultiIndex out = *this;
  ++out.entries_[static_cast<std::size_t>(i)];
  ++out.length_;
  return out;
}

MultiIndex MultiIndex::operator+(const MultiIndex& other) const {
  MultiIndex out = *this;
  for (std::size_t i = 0; i < entries_.size(); ++i) out.entries_[i] += other.entries_[i];
  out.length_ += other.length_;
  return out;
}

double MultiIndex::factorial() const {
  double f = 1.0;
  for (int e : entries_) {
    for (int k = 2; k <= e; ++k) f *= k;
  }
  return f;
}

namespace {

void enumerate(int g, int remaining, int pos, std::vector<int>& cur, std::vector<MultiIndex>& out) {
  if (pos == g - 1) {
    cur[static_cast<std::size_t>(pos)] = remaining;
    out.emplace_back(cur);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur[static_cast<std::size_t>(pos)] = e;
    enumerate(g, remaining - e, pos + 1, cur, out);
  }
}

}  // namespace

std::vector<MultiIndex> multi_indices_of_length(int g, int length) {
  std::vector<MultiIndex> out;
  if (g <= 0 || length < 0) return out;
  std::vector<int> cur(static_cast<std::size_t>(g), 0);
  enumerate(g, length, 0, cur, out);
  return out;
}

std::vector<MultiIndex> multi_indices_up_to(int g, int max_length) {
  std::vector<MultiIndex> out;
  for (int k = 0; k <= max_length; ++k) {
    auto level = multi_indices_of_length(g, k);
    out.insert(out.end(), level.begin(), level.end());
  }
  return out;
}

Jet::Jet(int g, int order) : g_(g), order_(order), indices_(multi_indices_up_to(g, order)) {
  values_.assign(indices_.size(), cplx{});
  for (std::size_t i = 0; i < indices_.size(); ++i) lookup_.emplace(indices_[i], i);
}

std::size_t Jet::position(const MultiIndex& index) const {
  auto it = lookup_.find(index);
  if (it == lookup_.end()) throw Error(ErrorCode::OrderTooHigh, "derivative not present in jet");
  return it->second;
}

CVector Jet::gradient() const {
  CVector grad(g_);
  for (int i = 0; i < g_; ++i) grad(i) = (*this)[MultiIndex::unit(g_, i)];
  return grad;
}

CMatrix Jet::hessian() const {
  CMatrix h(g_, g_);
  for (int i = 0; i < g_; ++i) {
    for (int j = i; j < g_; ++j) {
      const cplx v = (*this)[MultiIndex::unit(g_, i).plus_unit(j)];
      h(i, j) = v;
      h(j, i) = v;
    }
  }
  return h;
}

double Jet::max_abs_at_order(int k) const {
  double m = 0.0;
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i].length() == k) m = std::max(m, std::abs(values_[i]));
  }
  return m;
}

}  // namespace thetasing
