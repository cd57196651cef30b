#include "gmix/model_index.hpp"

#include <algorithm>
#include <bit>

#include "gmix/errors.hpp"

namespace gmix {

ModelIndex::ModelIndex(std::vector<int> indices) : indices_(std::move(indices)) {
  std::sort(indices_.begin(), indices_.end());
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] < 1) throw InvalidInput("model indices must be >= 1");
    if (i > 0 && indices_[i] == indices_[i - 1])
      throw InvalidInput("duplicate regressor index " + std::to_string(indices_[i]));
  }
}

ModelIndex ModelIndex::full(int p) {
  if (p < 0) throw InvalidInput("p must be >= 0");
  std::vector<int> idx(static_cast<std::size_t>(p));
  for (int j = 0; j < p; ++j) idx[static_cast<std::size_t>(j)] = j + 1;
  return ModelIndex(std::move(idx));
}

ModelIndex ModelIndex::from_mask(std::uint64_t mask) {
  std::vector<int> idx;
  idx.reserve(static_cast<std::size_t>(std::popcount(mask)));
  while (mask != 0) {
    const int bit = std::countr_zero(mask);
    idx.push_back(bit + 1);
    mask &= mask - 1;
  }
  return ModelIndex(std::move(idx));
}

bool ModelIndex::contains(int j) const {
  return std::binary_search(indices_.begin(), indices_.end(), j);
}

ModelIndex ModelIndex::with(int j) const {
  if (contains(j)) return *this;
  std::vector<int> idx = indices_;
  idx.push_back(j);
  return ModelIndex(std::move(idx));
}

ModelIndex ModelIndex::without(int j) const {
  std::vector<int> idx;
  idx.reserve(indices_.size());
  for (int k : indices_)
    if (k != j) idx.push_back(k);
  return ModelIndex(std::move(idx));
}

bool ModelIndex::is_subset_of(const ModelIndex& other) const {
  return std::includes(other.indices_.begin(), other.indices_.end(), indices_.begin(),
                       indices_.end());
}

std::uint64_t ModelIndex::mask() const {
  if (max_index() > 64) throw InvalidInput("mask() supports at most 64 regressors");
  std::uint64_t m = 0;
  for (int j : indices_) m |= std::uint64_t{1} << (j - 1);
  return m;
}

std::string ModelIndex::to_string() const {
  std::string s = "{";
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (i > 0) s += ",";
    s += std::to_string(indices_[i]);
  }
  s += "}";
  return s;
}

}  // namespace gmix
