#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "core/corpus.hpp"
#include "core/errors.hpp"
#include "core/gateway.hpp"
#include "core/metrics.hpp"
#include "core/prompting.hpp"
#include "core/vsm.hpp"

namespace tracebench {

enum class ClassifyMode { simple, cot, multi_question };
enum class ErrorPolicy { abort_run, skip_errors };

struct ClassificationOutcome {
    std::string parent_id;
    std::string child_id;
    bool predicted{false};
    std::optional<int> votes;                                   // multi-question mode only
    std::optional<std::map<std::string, std::string>> rationale;  // tagged schemas only
    std::string prompt_id;
    std::string response_digest;
};

struct PairFailure {
    std::string parent_id;
    std::string child_id;
    ErrorCode code{ErrorCode::generic};
    std::string message;
};

struct ClassifyOptions {
    ClassifyMode mode{ClassifyMode::simple};
    ErrorPolicy policy{ErrorPolicy::abort_run};
    int reask_limit{0};  // extra identical re-asks after a parse failure
    ModelParams model;
};

struct ClassifyRun {
    std::vector<ClassificationOutcome> outcomes;  // parent-major, child-ascending
    std::vector<PairFailure> failures;            // skip_errors policy only
};

// Classifies every (parent, candidate) pair of every query. Pairs may be
// processed concurrently up to the gateway limit; the outcome order is the
// deterministic iteration order regardless of completion order.
ClassifyRun classify_pairs(const std::vector<TraceQuery>& queries, const PromptTemplate& tmpl,
                           Gateway& gateway, const ClassifyOptions& options);

// predicted = votes >= k. Every outcome must carry votes.
std::vector<std::pair<PairKey, bool>> threshold_by_votes(
    const std::vector<ClassificationOutcome>& outcomes, int k);

enum class InitialOrder { vsm, canonical, shuffled };

struct RankOptions {
    InitialOrder initial_order{InitialOrder::vsm};
    std::uint64_t shuffle_seed{0};  // shuffled order only
    std::uint64_t repair_seed{0};   // seeds the missing-id repair
    bool allow_empty_fallback{false};
    ModelParams model;
};

struct RankingOutcome {
    std::string parent_id;
    std::vector<std::string> initial_order;
    std::vector<std::string> final_order;  // permutation of initial_order
    std::vector<std::string> repaired;     // ids appended by the repair step
    std::string prompt_id;
    std::string response_digest;
};

// Presents the candidates in the configured initial order (VSM by default),
// asks the model for a ranking, and repairs omissions.
RankingOutcome rank_query(const TraceQuery& query, const IdfTable& idf,
                          const PromptTemplate& tmpl, Gateway& gateway,
                          const RankOptions& options);

struct SummarizeResult {
    TraceDataset dataset;                          // code bodies replaced by summaries
    std::map<std::string, std::string> originals;  // child id -> original body
    std::vector<PairFailure> failures;             // per-artifact gateway errors
};

// Replaces the bodies of code children with model summaries; originals are
// kept alongside and per-artifact failures are collected, not fatal.
SummarizeResult summarize_code(const TraceDataset& dataset, Gateway& gateway,
                               const PromptTemplate& tmpl, const ModelParams& model);

}  // namespace tracebench
