#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace tracebench {

using PairKey = std::pair<std::string, std::string>;  // (parent_id, child_id)

struct ConfusionCounts {
    std::int64_t tp{0};
    std::int64_t fp{0};
    std::int64_t tn{0};
    std::int64_t fn{0};

    std::int64_t total() const { return tp + fp + tn + fn; }
    bool operator==(const ConfusionCounts&) const = default;
};

// Counts each predicted pair against the truth set; duplicate pairs in the
// prediction list are an error.
ConfusionCounts confusion(const std::vector<std::pair<PairKey, bool>>& predictions,
                          const std::set<PairKey>& truth);

// Zero denominators are reported as 0 with the flag set (not an error), so
// threshold sweeps never abort.
struct Rate {
    double value{0.0};
    bool zero_denominator{false};
};

Rate precision(const ConfusionCounts& counts);
Rate recall(const ConfusionCounts& counts);

// Discrete average precision: mean over relevant items of the precision at
// the rank where each appears. The ranking must be duplicate-free and cover
// every relevant id; an empty relevant set is an error (callers flag it).
double average_precision(const std::vector<std::string>& ranking,
                         const std::set<std::string>& relevant);

struct QueryEvaluation {
    std::string parent_id;
    std::optional<double> average_precision;          // final ranking; empty when undefined
    std::optional<double> initial_average_precision;  // pre-LLM order, when applicable
    std::size_t num_relevant{0};
};

// Mean of the defined average precisions; fails when none is defined.
double map_score(const std::vector<QueryEvaluation>& evaluations);

}  // namespace tracebench
