#include "core/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <mutex>
#include <thread>

#include "core/parsing.hpp"
#include "core/rng.hpp"

namespace tracebench {

namespace {

// Runs fn(0..count) across up to `workers` threads. Results land in caller
// slots indexed by i, so collection order never depends on scheduling. When
// a task throws, the exception for the smallest index is rethrown after all
// workers drain.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
    const std::size_t thread_count =
        std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, workers)));
    if (thread_count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    std::size_t first_error_index = count;
    std::atomic<bool> stop{false};

    auto worker = [&] {
        while (!stop.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < first_error_index) {
                    first_error_index = i;
                    first_error = std::current_exception();
                }
                stop.store(true, std::memory_order_relaxed);
            }
        }
    };

    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (std::size_t t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
    if (first_error) std::rethrow_exception(first_error);
}

const std::string kAnswerTag = "answer";
const std::string kTracedTag = "traced";

std::vector<std::string> vote_tags_of(const PromptTemplate& tmpl) {
    std::vector<std::string> tags;
    for (const auto& tag : tmpl.schema.tags) {
        if (tag != "related" && tag != "unrelated" && tag != kTracedTag) {
            tags.push_back(tag);
        }
    }
    return tags;
}

void check_mode_schema(const PromptTemplate& tmpl, ClassifyMode mode) {
    switch (mode) {
        case ClassifyMode::simple:
            if (tmpl.schema.kind != SchemaKind::yes_no) {
                fail(ErrorCode::config,
                     "schema mismatch: simple mode needs a yes-no template, got '" + tmpl.id + "'");
            }
            return;
        case ClassifyMode::cot:
            if (tmpl.schema.kind != SchemaKind::tagged_sections ||
                std::find(tmpl.schema.tags.begin(), tmpl.schema.tags.end(), kAnswerTag) ==
                    tmpl.schema.tags.end()) {
                fail(ErrorCode::config,
                     "schema mismatch: cot mode needs a tagged template with an 'answer' tag");
            }
            return;
        case ClassifyMode::multi_question:
            if (tmpl.schema.kind != SchemaKind::tagged_sections ||
                std::find(tmpl.schema.tags.begin(), tmpl.schema.tags.end(), kTracedTag) ==
                    tmpl.schema.tags.end()) {
                fail(ErrorCode::config,
                     "schema mismatch: multi mode needs a tagged template with a 'traced' tag");
            }
            return;
    }
}

ClassificationOutcome classify_one(const Artifact& parent, const Artifact& child,
                                   const PromptTemplate& tmpl, Gateway& gateway,
                                   const ClassifyOptions& options) {
    const CompletionRequest request =
        make_request(render_pair(tmpl, parent, child), options.model);

    ClassificationOutcome outcome;
    outcome.parent_id = parent.id;
    outcome.child_id = child.id;
    outcome.prompt_id = tmpl.id;
    outcome.response_digest = request_digest(request);

    int attempts_left = 1 + std::max(0, options.reask_limit);
    while (true) {
        const std::string response = attempts_left == 1 + std::max(0, options.reask_limit)
                                         ? gateway.complete(request)
                                         : gateway.complete_fresh(request);
        --attempts_left;
        try {
            switch (options.mode) {
                case ClassifyMode::simple:
                    outcome.predicted = parse_yes_no(response);
                    break;
                case ClassifyMode::cot: {
                    const TaggedResponse tagged = parse_tagged(response, tmpl.schema.tags);
                    outcome.predicted = parse_yes_no(tagged.sections.at(kAnswerTag));
                    std::map<std::string, std::string> rationale = tagged.sections;
                    rationale.erase(kAnswerTag);
                    outcome.rationale = std::move(rationale);
                    break;
                }
                case ClassifyMode::multi_question: {
                    const TaggedResponse tagged = parse_tagged(response, tmpl.schema.tags);
                    outcome.votes = vote_count(tagged, vote_tags_of(tmpl));
                    outcome.predicted = parse_yes_no(tagged.sections.at(kTracedTag));
                    std::map<std::string, std::string> rationale = tagged.sections;
                    rationale.erase(kTracedTag);
                    outcome.rationale = std::move(rationale);
                    break;
                }
            }
            return outcome;
        } catch (const Error& e) {
            if (e.code() != ErrorCode::parse || attempts_left == 0) {
                throw;
            }
        }
    }
}

}  // namespace

ClassifyRun classify_pairs(const std::vector<TraceQuery>& queries, const PromptTemplate& tmpl,
                           Gateway& gateway, const ClassifyOptions& options) {
    check_mode_schema(tmpl, options.mode);

    struct PairRef {
        const Artifact* parent;
        const Artifact* child;
    };
    std::vector<PairRef> pairs;
    for (const auto& query : queries) {
        for (const auto& candidate : query.candidates) {
            pairs.push_back({&query.parent, &candidate});
        }
    }

    std::vector<std::optional<ClassificationOutcome>> slots(pairs.size());
    std::vector<std::optional<PairFailure>> failure_slots(pairs.size());

    parallel_for(pairs.size(), gateway.max_in_flight(), [&](std::size_t i) {
        const auto& [parent, child] = pairs[i];
        try {
            slots[i] = classify_one(*parent, *child, tmpl, gateway, options);
        } catch (const Error& e) {
            if (options.policy == ErrorPolicy::abort_run) {
                throw Error(e.code(), std::string(e.what()) + " (pair " + parent->id + " -> " +
                                          child->id + ")");
            }
            failure_slots[i] = PairFailure{parent->id, child->id, e.code(), e.what()};
        }
    });

    ClassifyRun run;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (slots[i].has_value()) {
            run.outcomes.push_back(std::move(*slots[i]));
        } else if (failure_slots[i].has_value()) {
            run.failures.push_back(std::move(*failure_slots[i]));
        }
    }
    return run;
}

std::vector<std::pair<PairKey, bool>> threshold_by_votes(
    const std::vector<ClassificationOutcome>& outcomes, int k) {
    std::vector<std::pair<PairKey, bool>> predictions;
    predictions.reserve(outcomes.size());
    for (const auto& outcome : outcomes) {
        if (!outcome.votes.has_value()) {
            fail(ErrorCode::validation,
                 "missing votes: " + outcome.parent_id + " -> " + outcome.child_id);
        }
        predictions.push_back({{outcome.parent_id, outcome.child_id}, *outcome.votes >= k});
    }
    return predictions;
}

RankingOutcome rank_query(const TraceQuery& query, const IdfTable& idf,
                          const PromptTemplate& tmpl, Gateway& gateway,
                          const RankOptions& options) {
    if (query.candidates.empty()) {
        fail(ErrorCode::validation, "query has no candidates: " + query.parent.id);
    }

    std::vector<Artifact> ordered;
    switch (options.initial_order) {
        case InitialOrder::vsm: {
            for (const auto& ranked : vsm_rank(query, idf)) {
                ordered.push_back(*std::find_if(
                    query.candidates.begin(), query.candidates.end(),
                    [&](const Artifact& a) { return a.id == ranked.child_id; }));
            }
            break;
        }
        case InitialOrder::canonical:
            ordered = query.candidates;
            break;
        case InitialOrder::shuffled: {
            ordered = query.candidates;
            Rng rng(options.shuffle_seed);
            seeded_shuffle(ordered, rng);
            break;
        }
    }

    std::vector<std::string> initial_ids;
    std::set<std::string> expected;
    for (const auto& artifact : ordered) {
        initial_ids.push_back(artifact.id);
        expected.insert(artifact.id);
    }

    const CompletionRequest request =
        make_request(render_ranking(tmpl, query.parent, ordered), options.model);

    RankingOutcome outcome;
    outcome.parent_id = query.parent.id;
    outcome.initial_order = std::move(initial_ids);
    outcome.prompt_id = tmpl.id;
    outcome.response_digest = request_digest(request);

    try {
        const std::string response = gateway.complete(request);
        RankingParse parsed =
            parse_ranking(response, expected, options.repair_seed, options.allow_empty_fallback);
        outcome.final_order = std::move(parsed.order);
        outcome.repaired = std::move(parsed.appended);
    } catch (const Error& e) {
        throw Error(e.code(), std::string(e.what()) + " (query " + query.parent.id + ")");
    }
    return outcome;
}

SummarizeResult summarize_code(const TraceDataset& dataset, Gateway& gateway,
                               const PromptTemplate& tmpl, const ModelParams& model) {
    SummarizeResult result;
    result.dataset = dataset;
    if (!dataset.children_are_code) {
        return result;  // nothing flagged as code
    }

    std::vector<std::optional<PairFailure>> failure_slots(dataset.children.size());
    std::vector<std::optional<std::string>> summaries(dataset.children.size());

    parallel_for(dataset.children.size(), gateway.max_in_flight(), [&](std::size_t i) {
        const Artifact& child = dataset.children[i];
        try {
            const CompletionRequest request =
                make_request(render_summary(tmpl, child), model);
            const std::string summary = gateway.complete(request);
            Artifact replacement = child;
            replacement.body = summary;
            validate_artifact(replacement);  // summaries must be non-blank
            summaries[i] = summary;
        } catch (const Error& e) {
            failure_slots[i] = PairFailure{dataset.name, child.id, e.code(), e.what()};
        }
    });

    for (std::size_t i = 0; i < dataset.children.size(); ++i) {
        if (summaries[i].has_value()) {
            result.originals[dataset.children[i].id] = dataset.children[i].body;
            result.dataset.children[i].body = *summaries[i];
        } else if (failure_slots[i].has_value()) {
            result.failures.push_back(*failure_slots[i]);
        }
    }
    result.dataset.children_are_code = false;  // bodies are now prose summaries
    return result;
}

}  // namespace tracebench
