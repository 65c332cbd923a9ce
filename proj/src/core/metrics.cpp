#include "core/metrics.hpp"

#include "core/errors.hpp"

namespace tracebench {

ConfusionCounts confusion(const std::vector<std::pair<PairKey, bool>>& predictions,
                          const std::set<PairKey>& truth) {
    ConfusionCounts counts;
    std::set<PairKey> seen;
    for (const auto& [pair, predicted] : predictions) {
        if (!seen.insert(pair).second) {
            fail(ErrorCode::validation,
                 "duplicate pair: " + pair.first + " -> " + pair.second);
        }
        const bool is_true = truth.count(pair) != 0;
        if (predicted && is_true) ++counts.tp;
        else if (predicted && !is_true) ++counts.fp;
        else if (!predicted && is_true) ++counts.fn;
        else ++counts.tn;
    }
    return counts;
}

Rate precision(const ConfusionCounts& counts) {
    const std::int64_t denominator = counts.tp + counts.fp;
    if (denominator == 0) return {0.0, true};
    return {static_cast<double>(counts.tp) / static_cast<double>(denominator), false};
}

Rate recall(const ConfusionCounts& counts) {
    const std::int64_t denominator = counts.tp + counts.fn;
    if (denominator == 0) return {0.0, true};
    return {static_cast<double>(counts.tp) / static_cast<double>(denominator), false};
}

double average_precision(const std::vector<std::string>& ranking,
                         const std::set<std::string>& relevant) {
    if (relevant.empty()) {
        fail(ErrorCode::validation, "undefined average precision: no relevant items");
    }
    std::set<std::string> ranked_ids;
    for (const auto& id : ranking) {
        if (!ranked_ids.insert(id).second) {
            fail(ErrorCode::validation, "duplicate id in ranking: " + id);
        }
    }
    for (const auto& id : relevant) {
        if (ranked_ids.count(id) == 0) {
            fail(ErrorCode::validation, "relevant id missing from ranking: " + id);
        }
    }

    double sum = 0.0;
    std::size_t hits = 0;
    for (std::size_t rank = 1; rank <= ranking.size(); ++rank) {
        if (relevant.count(ranking[rank - 1]) != 0) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(rank);
        }
    }
    return sum / static_cast<double>(relevant.size());
}

double map_score(const std::vector<QueryEvaluation>& evaluations) {
    double sum = 0.0;
    std::size_t defined = 0;
    for (const auto& evaluation : evaluations) {
        if (evaluation.average_precision.has_value()) {
            sum += *evaluation.average_precision;
            ++defined;
        }
    }
    if (defined == 0) {
        fail(ErrorCode::validation, "no defined queries: MAP has an empty denominator");
    }
    return sum / static_cast<double>(defined);
}

}  // namespace tracebench
