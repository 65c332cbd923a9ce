#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "core/corpus.hpp"

namespace tracebench {

struct SampledParent {
    std::string category;  // "min", "med", or "max"
    std::string id;
};

// Picks 5 parents representative of the dataset's link distribution: one with
// the fewest true links, three at the median count, one at the maximum.
// Ties within a category are broken by the seeded generator; categories are
// filled in min, med, max order without replacement. When fewer than three
// parents attain the median count, the band widens symmetrically over the
// attained counts until it can supply three, always leaving at least one
// maximum-count parent for the max slot.
std::vector<SampledParent> sample_parents(const TraceDataset& dataset, std::uint64_t seed);

}  // namespace tracebench
