#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace scsl::scorer {

/// Sparse real vector with sorted, unique indices.
struct SparseVector {
  std::size_t dim = 0;
  std::vector<std::pair<std::uint32_t, double>> entries;

  [[nodiscard]] std::vector<double> to_dense() const;
  static SparseVector from_dense(std::span<const double> dense);

  friend bool operator==(const SparseVector&, const SparseVector&) = default;
};

}  // namespace scsl::scorer
