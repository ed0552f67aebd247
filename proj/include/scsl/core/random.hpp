#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <utility>

namespace scsl {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

/// Derives an independent sub-seed; used so per-cell and per-iteration
/// streams do not depend on evaluation order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream);

/// Unbiased integer in [0, n). n must be > 0. Implemented with rejection so
/// results are identical across standard library implementations.
std::uint64_t uniform_index(Rng& rng, std::uint64_t n);

/// Uniform double in [0, 1) from the top 53 bits.
double uniform_unit(Rng& rng);

bool coin_flip(Rng& rng);

template <typename T>
void shuffle(std::span<T> items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_index(rng, i));
    using std::swap;
    swap(items[i - 1], items[j]);
  }
}

}  // namespace scsl
