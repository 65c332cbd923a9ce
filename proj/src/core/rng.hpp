#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <utility>
#include <vector>

namespace tracebench {

// Every seeded draw in the project goes through mt19937_64 plus the helpers
// below. The engine's output sequence is pinned by the C++ standard, so
// golden fixtures (tie-break sampling, ranking repair) hold on any platform.
using Rng = std::mt19937_64;

// Uniform draw from [0, n), n > 0. Rejection sampling instead of
// std::uniform_int_distribution, whose mapping is implementation-defined.
inline std::uint64_t draw_below(Rng& rng, std::uint64_t n) {
    const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
    const std::uint64_t limit = max - max % n;
    std::uint64_t value = rng();
    while (value >= limit) {
        value = rng();
    }
    return value % n;
}

// Fisher-Yates with draw_below; deterministic for a given seed.
template <typename T>
void seeded_shuffle(std::vector<T>& items, Rng& rng) {
    for (std::size_t i = items.size(); i > 1; --i) {
        std::swap(items[i - 1], items[draw_below(rng, i)]);
    }
}

}  // namespace tracebench
