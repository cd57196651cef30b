#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace gmix {

/// A candidate model: the strictly increasing set of selected regressor
/// indices, 1-based. The empty set is the intercept-only (null) model.
class ModelIndex {
 public:
  ModelIndex() = default;
  explicit ModelIndex(std::vector<int> indices);

  static ModelIndex null_model() { return ModelIndex(); }
  static ModelIndex full(int p);
  /// Bit j-1 of `mask` selects regressor j. Supports p <= 64.
  static ModelIndex from_mask(std::uint64_t mask);

  int size() const { return static_cast<int>(indices_.size()); }
  bool is_null() const { return indices_.empty(); }
  const std::vector<int>& indices() const { return indices_; }
  int max_index() const { return indices_.empty() ? 0 : indices_.back(); }

  bool contains(int j) const;
  ModelIndex with(int j) const;
  ModelIndex without(int j) const;
  bool is_subset_of(const ModelIndex& other) const;

  /// Inverse of from_mask; requires max_index() <= 64.
  std::uint64_t mask() const;

  std::string to_string() const;  // "{}" or "{1,3,7}"

  friend bool operator==(const ModelIndex& a, const ModelIndex& b) = default;
  /// Lexicographic on the index list.
  friend std::strong_ordering operator<=>(const ModelIndex& a, const ModelIndex& b) {
    return a.indices_ <=> b.indices_;
  }

 private:
  std::vector<int> indices_;
};

}  // namespace gmix
