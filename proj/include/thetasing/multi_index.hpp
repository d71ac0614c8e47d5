#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "thetasing/types.hpp"

namespace thetasing {

/// Exponent vector (i_1, ..., i_g) of a partial derivative or monomial.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(int g) : entries_(static_cast<std::size_t>(g), 0) {}
  explicit MultiIndex(std::vector<int> entries);

  static MultiIndex unit(int g, int i);

  int dim() const { return static_cast<int>(entries_.size()); }
  int length() const { return length_; }
  int operator[](int i) const { return entries_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& entries() const { return entries_; }

  MultiIndex plus_unit(int i) const;
  MultiIndex operator+(const MultiIndex& other) const;

  /// I! = i_1! ... i_g!
  double factorial() const;

  auto operator<=>(const MultiIndex& other) const = default;

 private:
  std::vector<int> entries_;
  int length_ = 0;
};

/// All multi-indices of exactly the given length in g variables, in
/// lexicographically descending order ((r,0,..), (r-1,1,..), ...).
std::vector<MultiIndex> multi_indices_of_length(int g, int length);

/// All multi-indices with length <= max_length, graded by length.
std::vector<MultiIndex> multi_indices_up_to(int g, int max_length);

/// Values of all partial derivatives d_I f(z) with |I| <= order.
class Jet {
 public:
  Jet() = default;
  Jet(int g, int order);

  int dim() const { return g_; }
  int order() const { return order_; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  std::vector<cplx>& values() { return values_; }
  const std::vector<cplx>& values() const { return values_; }

  std::size_t position(const MultiIndex& index) const;
  cplx operator[](const MultiIndex& index) const { return values_[position(index)]; }
  cplx& at(const MultiIndex& index) { return values_[position(index)]; }

  cplx value() const { return values_.front(); }
  CVector gradient() const;
  CMatrix hessian() const;

  /// Largest |d_I f| over |I| = k.
  double max_abs_at_order(int k) const;

 private:
  int g_ = 0;
  int order_ = 0;
  std::vector<MultiIndex> indices_;
  std::vector<cplx> values_;
  std::map<MultiIndex, std::size_t> lookup_;
};

}  // namespace thetasing
