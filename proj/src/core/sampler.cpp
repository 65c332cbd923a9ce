#include "core/sampler.hpp"

#include <algorithm>
#include <set>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace tracebench {

namespace {

std::vector<std::string> unused_with_count_in(
    const std::map<std::string, std::size_t>& counts,
    const std::set<std::string>& used,
    std::size_t lo, std::size_t hi) {
    std::vector<std::string> out;
    for (const auto& [id, count] : counts) {  // map iteration: ascending by id
        if (count >= lo && count <= hi && used.count(id) == 0) {
            out.push_back(id);
        }
    }
    return out;
}

}  // namespace

std::vector<SampledParent> sample_parents(const TraceDataset& dataset, std::uint64_t seed) {
    const auto counts = dataset.parent_link_counts();
    if (counts.size() < 5) {
        fail(ErrorCode::validation,
             "too few parents: need at least 5, have " + std::to_string(counts.size()));
    }

    std::vector<std::size_t> sorted_counts;
    sorted_counts.reserve(counts.size());
    for (const auto& [id, count] : counts) {
        sorted_counts.push_back(count);
    }
    std::sort(sorted_counts.begin(), sorted_counts.end());

    const std::size_t min_count = sorted_counts.front();
    const std::size_t max_count = sorted_counts.back();
    // Lower-middle element for even-length lists, so the median is always an
    // attained count and "three with the median" is well-defined.
    const std::size_t median_count = sorted_counts[(sorted_counts.size() - 1) / 2];

    std::vector<std::size_t> attained(sorted_counts);
    attained.erase(std::unique(attained.begin(), attained.end()), attained.end());

    Rng rng(seed);
    std::set<std::string> used;
    std::vector<SampledParent> result;

    // min slot
    {
        auto candidates = unused_with_count_in(counts, used, min_count, min_count);
        const std::string& pick = candidates[draw_below(rng, candidates.size())];
        used.insert(pick);
        result.push_back({"min", pick});
    }

    // median slots: widen the band over attained counts until it can supply
    // three picks while leaving one max-count parent for the max slot.
    {
        auto median_it = std::find(attained.begin(), attained.end(), median_count);
        std::size_t lo_idx = static_cast<std::size_t>(median_it - attained.begin());
        std::size_t hi_idx = lo_idx;

        std::vector<std::string> picks;
        while (true) {
            auto candidates = unused_with_count_in(counts, used, attained[lo_idx], attained[hi_idx]);
            const bool band_has_max = attained[hi_idx] == max_count;
            std::size_t max_in_band = 0;
            if (band_has_max) {
                for (const auto& id : candidates) {
                    if (counts.at(id) == max_count) ++max_in_band;
                }
            }
            const std::size_t reserve_for_max = (band_has_max && max_in_band > 0) ? 1 : 0;

            if (candidates.size() - std::min(candidates.size(), reserve_for_max) >= 3) {
                seeded_shuffle(candidates, rng);
                std::size_t max_taken = 0;
                for (const auto& id : candidates) {
                    if (picks.size() == 3) break;
                    if (band_has_max && counts.at(id) == max_count) {
                        if (max_taken + 1 >= max_in_band) continue;  // keep one for the max slot
                        ++max_taken;
                    }
                    picks.push_back(id);
                }
                break;
            }
            if (lo_idx == 0 && hi_idx + 1 == attained.size()) {
                fail(ErrorCode::validation,
                     "too few median candidates: cannot fill three median slots");
            }
            if (lo_idx > 0) --lo_idx;
            if (hi_idx + 1 < attained.size()) ++hi_idx;
        }

        for (const auto& id : picks) {
            used.insert(id);
            result.push_back({"med", id});
        }
    }

    // max slot
    {
        auto candidates = unused_with_count_in(counts, used, max_count, max_count);
        if (candidates.empty()) {
            fail(ErrorCode::validation, "no parent left for the max slot");
        }
        const std::string& pick = candidates[draw_below(rng, candidates.size())];
        used.insert(pick);
        result.push_back({"max", pick});
    }

    return result;
}

}  // namespace tracebench
