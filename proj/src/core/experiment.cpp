#include "core/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "core/corpus.hpp"
#include "core/digest.hpp"
#include "core/errors.hpp"
#include "core/metrics.hpp"
#include "core/pipeline.hpp"
#include "core/report.hpp"
#include "core/sampler.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace tracebench {

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::io, "cannot read file: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCode::io, "cannot write file: " + path.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

[[noreturn]] void config_error(const std::string& field, const std::string& why) {
    fail(ErrorCode::config, "invalid config field: " + field + " (" + why + ")");
}

void check_keys(const json& config, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : config.items()) {
        if (allowed.count(key) == 0) {
            config_error(key, "unknown key");
        }
    }
}

std::string require_string(const json& config, const std::string& field) {
    if (!config.contains(field) || !config[field].is_string() ||
        config[field].get<std::string>().empty()) {
        config_error(field, "required non-empty string");
    }
    return config[field].get<std::string>();
}

fs::path resolve(const fs::path& base_dir, const std::string& value) {
    fs::path p(value);
    return p.is_absolute() ? p : base_dir / p;
}

ModelParams parse_model(const json& config) {
    ModelParams model;
    if (!config.contains("model")) return model;
    const json& m = config["model"];
    check_keys(m, {"model_id", "temperature", "max_output_tokens"});
    if (m.contains("model_id")) model.model_id = m["model_id"].get<std::string>();
    if (m.contains("temperature")) model.temperature = m["temperature"].get<double>();
    if (m.contains("max_output_tokens")) model.max_output_tokens = m["max_output_tokens"].get<int>();
    if (model.temperature < 0.0) config_error("model.temperature", "must be >= 0");
    if (model.max_output_tokens <= 0) config_error("model.max_output_tokens", "must be positive");
    return model;
}

struct GatewaySetup {
    std::shared_ptr<Gateway> gateway;
    std::vector<fs::path> flush_paths;  // archives to write after the run
};

GatewaySetup make_gateway(const json& config, const fs::path& base_dir) {
    const std::string spec = require_string(config, "backend");
    GatewayOptions options;
    if (config.contains("max_in_flight")) {
        options.max_in_flight = config["max_in_flight"].get<int>();
        if (options.max_in_flight < 1) config_error("max_in_flight", "must be >= 1");
    }

    GatewaySetup setup;
    if (spec == "live") {
        setup.gateway = std::make_shared<Gateway>(HttpBackend::from_env(), options);
    } else if (spec.starts_with("replay:")) {
        const fs::path archive = resolve(base_dir, spec.substr(7));
        setup.gateway = std::make_shared<Gateway>(ReplayBackend::from_archive(archive), options);
    } else if (spec.starts_with("cached-live:")) {
        const fs::path store = resolve(base_dir, spec.substr(12));
        setup.gateway = std::make_shared<Gateway>(HttpBackend::from_env(), options);
        if (fs::exists(store)) {
            setup.gateway->preload(load_archive(store));
        }
        setup.flush_paths.push_back(store);
    } else {
        config_error("backend", "expected live, cached-live:PATH, or replay:PATH");
    }
    if (config.contains("record_to")) {
        setup.flush_paths.push_back(resolve(base_dir, config["record_to"].get<std::string>()));
    }
    return setup;
}

const PromptTemplate& lookup_prompt(const std::vector<PromptTemplate>& catalog,
                                    const std::string& id, const std::string& field) {
    const PromptTemplate* tmpl = find_template(catalog, id);
    if (tmpl == nullptr) {
        config_error(field, "unknown prompt id '" + id + "'");
    }
    return *tmpl;
}

std::vector<PromptTemplate> catalog_for(const json& config, const fs::path& base_dir) {
    if (config.contains("prompts_dir")) {
        return load_templates(resolve(base_dir, config["prompts_dir"].get<std::string>()));
    }
    return builtin_catalog();
}

struct ParentSelection {
    std::vector<std::string> ids;
    json sampled = json::array();  // [{category, id}] when sampled by seed
    std::optional<std::uint64_t> seed;
};

ParentSelection pick_parents(const json& config, const TraceDataset& dataset) {
    if (!config.contains("parents")) config_error("parents", "required object");
    const json& parents = config["parents"];
    check_keys(parents, {"ids", "seed"});
    ParentSelection selection;
    if (parents.contains("ids") == parents.contains("seed")) {
        config_error("parents", "exactly one of 'ids' or 'seed' required");
    }
    if (parents.contains("ids")) {
        for (const auto& id : parents["ids"]) {
            selection.ids.push_back(id.get<std::string>());
        }
        if (selection.ids.empty()) config_error("parents.ids", "must not be empty");
    } else {
        selection.seed = parents["seed"].get<std::uint64_t>();
        for (const auto& pick : sample_parents(dataset, *selection.seed)) {
            selection.ids.push_back(pick.id);
            selection.sampled.push_back({{"category", pick.category}, {"id", pick.id}});
        }
    }
    return selection;
}

json rate_to_json(const Rate& rate) {
    return {{"value", rate.value}, {"zero_denominator", rate.zero_denominator}};
}

json counts_to_json(const ConfusionCounts& counts) {
    return {{"tp", counts.tp}, {"tn", counts.tn}, {"fp", counts.fp}, {"fn", counts.fn}};
}

json classification_to_json(const ClassificationOutcome& outcome) {
    json line;
    line["type"] = "classification";
    line["parent_id"] = outcome.parent_id;
    line["child_id"] = outcome.child_id;
    line["predicted"] = outcome.predicted;
    line["prompt_id"] = outcome.prompt_id;
    line["response_digest"] = outcome.response_digest;
    if (outcome.votes.has_value()) line["votes"] = *outcome.votes;
    if (outcome.rationale.has_value()) line["rationale"] = *outcome.rationale;
    return line;
}

json ranking_to_json(const RankingOutcome& outcome) {
    json line;
    line["type"] = "ranking";
    line["parent_id"] = outcome.parent_id;
    line["initial_order"] = outcome.initial_order;
    line["final_order"] = outcome.final_order;
    line["repaired"] = outcome.repaired;
    line["prompt_id"] = outcome.prompt_id;
    line["response_digest"] = outcome.response_digest;
    return line;
}

struct OutcomeSet {
    std::vector<ClassificationOutcome> classifications;
    std::vector<RankingOutcome> rankings;
    std::vector<json> failures;
};

OutcomeSet parse_outcome_lines(const std::string& text, const std::string& origin) {
    OutcomeSet set;
    std::istringstream lines(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(lines, line)) {
        ++line_no;
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            fail(ErrorCode::validation, "malformed outcome line " + std::to_string(line_no) +
                                            " in " + origin + ": " + e.what());
        }
        const std::string type = j.value("type", std::string{});
        if (type == "classification") {
            ClassificationOutcome outcome;
            outcome.parent_id = j.at("parent_id").get<std::string>();
            outcome.child_id = j.at("child_id").get<std::string>();
            outcome.predicted = j.at("predicted").get<bool>();
            outcome.prompt_id = j.at("prompt_id").get<std::string>();
            outcome.response_digest = j.value("response_digest", std::string{});
            if (j.contains("votes")) outcome.votes = j["votes"].get<int>();
            set.classifications.push_back(std::move(outcome));
        } else if (type == "ranking") {
            RankingOutcome outcome;
            outcome.parent_id = j.at("parent_id").get<std::string>();
            outcome.initial_order = j.at("initial_order").get<std::vector<std::string>>();
            outcome.final_order = j.at("final_order").get<std::vector<std::string>>();
            outcome.repaired = j.value("repaired", std::vector<std::string>{});
            outcome.prompt_id = j.value("prompt_id", std::string{});
            set.rankings.push_back(std::move(outcome));
        } else if (type == "error") {
            set.failures.push_back(j);
        } else {
            fail(ErrorCode::validation,
                 "unknown outcome type at line " + std::to_string(line_no) + " in " + origin);
        }
    }
    return set;
}

// Confusion, precision/recall, AP and MAP over one outcome set.
json evaluate_outcomes(const TraceDataset& dataset, const OutcomeSet& outcomes,
                       const std::vector<int>& thresholds) {
    json report;

    std::set<PairKey> truth(dataset.true_links.begin(), dataset.true_links.end());
    std::set<std::string> parents_seen;

    if (!outcomes.classifications.empty()) {
        std::map<std::string, std::vector<const ClassificationOutcome*>> by_prompt;
        for (const auto& outcome : outcomes.classifications) {
            by_prompt[outcome.prompt_id].push_back(&outcome);
            parents_seen.insert(outcome.parent_id);
        }
        json classification = json::array();
        for (const auto& [prompt_id, entries] : by_prompt) {
            std::vector<std::pair<PairKey, bool>> predictions;
            bool all_have_votes = true;
            std::vector<ClassificationOutcome> votes_only;
            for (const auto* outcome : entries) {
                predictions.push_back(
                    {{outcome->parent_id, outcome->child_id}, outcome->predicted});
                all_have_votes = all_have_votes && outcome->votes.has_value();
                votes_only.push_back(*outcome);
            }
            const ConfusionCounts counts = confusion(predictions, truth);
            json entry;
            entry["prompt_id"] = prompt_id;
            entry["counts"] = counts_to_json(counts);
            entry["precision"] = rate_to_json(precision(counts));
            entry["recall"] = rate_to_json(recall(counts));
            if (all_have_votes && !thresholds.empty()) {
                json sweep = json::array();
                for (int k : thresholds) {
                    const auto thresholded = threshold_by_votes(votes_only, k);
                    const ConfusionCounts step_counts = confusion(thresholded, truth);
                    json step;
                    step["k"] = k;
                    step["positives"] = step_counts.tp + step_counts.fp;
                    step["counts"] = counts_to_json(step_counts);
                    step["precision"] = rate_to_json(precision(step_counts));
                    step["recall"] = rate_to_json(recall(step_counts));
                    sweep.push_back(step);
                }
                entry["sweep"] = sweep;
            }
            classification.push_back(entry);
        }
        report["classification"] = classification;
    }

    if (!outcomes.rankings.empty()) {
        std::vector<QueryEvaluation> evaluations;
        std::vector<QueryEvaluation> initial_evaluations;
        json queries = json::array();
        std::int64_t excluded = 0;
        for (const auto& outcome : outcomes.rankings) {
            parents_seen.insert(outcome.parent_id);
            std::set<std::string> relevant;
            for (const auto& [parent_id, child_id] : dataset.true_links) {
                if (parent_id == outcome.parent_id) relevant.insert(child_id);
            }
            QueryEvaluation evaluation;
            evaluation.parent_id = outcome.parent_id;
            evaluation.num_relevant = relevant.size();
            if (relevant.empty()) {
                ++excluded;  // undefined AP: flagged and excluded from the mean
            } else {
                evaluation.average_precision = average_precision(outcome.final_order, relevant);
                evaluation.initial_average_precision =
                    average_precision(outcome.initial_order, relevant);
            }
            json q;
            q["parent_id"] = evaluation.parent_id;
            q["num_relevant"] = evaluation.num_relevant;
            q["average_precision"] =
                evaluation.average_precision.has_value() ? json(*evaluation.average_precision)
                                                         : json(nullptr);
            q["initial_average_precision"] =
                evaluation.initial_average_precision.has_value()
                    ? json(*evaluation.initial_average_precision)
                    : json(nullptr);
            q["repaired"] = outcome.repaired;
            queries.push_back(q);

            QueryEvaluation initial = evaluation;
            initial.average_precision = evaluation.initial_average_precision;
            initial_evaluations.push_back(initial);
            evaluations.push_back(std::move(evaluation));
        }

        json ranking;
        ranking["excluded_queries"] = excluded;
        const std::size_t defined = evaluations.size() - static_cast<std::size_t>(excluded);
        ranking["map_final"] = defined > 0 ? json(map_score(evaluations)) : json(nullptr);
        ranking["map_initial"] =
            defined > 0 ? json(map_score(initial_evaluations)) : json(nullptr);
        report["ranking"] = ranking;
        report["queries"] = queries;
        report["n_queries"] = defined;
    } else {
        report["n_queries"] = parents_seen.size();
    }

    if (!outcomes.failures.empty()) {
        report["failures"] = outcomes.failures;
    }
    return report;
}

std::vector<int> parse_thresholds(const json& config, bool multi_mode) {
    std::vector<int> thresholds;
    if (config.contains("thresholds")) {
        for (const auto& k : config["thresholds"]) thresholds.push_back(k.get<int>());
    } else if (multi_mode) {
        for (int k = 0; k <= 6; ++k) thresholds.push_back(k);  // 5 vote tags + 1
    }
    return thresholds;
}

void write_outcome_lines(const fs::path& path, const std::vector<json>& lines) {
    std::string text;
    for (const auto& line : lines) {
        text += line.dump() + "\n";
    }
    write_file(path, text);
}

const std::set<std::string> kRunKeys = {
    "dataset",     "strategy",   "prompt",        "mode",          "parents",
    "backend",     "record_to",  "model",         "initial_order", "shuffle_seed",
    "repair_seed", "ranker",     "thresholds",    "summarize_code", "summary_prompt",
    "error_policy", "reask_limit", "prompts_dir", "allow_empty_ranking_fallback",
    "max_in_flight"};

}  // namespace

json load_config_file(const fs::path& path) {
    json config;
    try {
        config = json::parse(read_file(path));
    } catch (const json::exception& e) {
        fail(ErrorCode::config, "malformed config " + path.string() + ": " + e.what());
    }
    if (!config.is_object()) {
        fail(ErrorCode::config, "config must be a JSON object: " + path.string());
    }
    return config;
}

StageOutput run_experiment(const json& config, const fs::path& base_dir,
                           const fs::path& out_dir) {
    check_keys(config, kRunKeys);
    const std::string strategy = require_string(config, "strategy");
    if (strategy != "classify" && strategy != "rank") {
        config_error("strategy", "expected 'classify' or 'rank'");
    }

    TraceDataset dataset = load_dataset(resolve(base_dir, require_string(config, "dataset")));
    const auto catalog = catalog_for(config, base_dir);
    const ModelParams model = parse_model(config);
    const std::string ranker = config.value("ranker", std::string("llm"));
    if (ranker != "llm" && ranker != "vsm") config_error("ranker", "expected 'llm' or 'vsm'");
    const bool needs_backend =
        strategy == "classify" || ranker == "llm" || config.value("summarize_code", false);

    GatewaySetup setup;
    if (needs_backend) {
        setup = make_gateway(config, base_dir);
    }

    fs::create_directories(out_dir);

    json summarize_failures = json::array();
    if (config.value("summarize_code", false)) {
        const auto& tmpl = lookup_prompt(
            catalog, config.value("summary_prompt", std::string("summarize-code-v1")),
            "summary_prompt");
        SummarizeResult summarized = summarize_code(dataset, *setup.gateway, tmpl, model);
        const fs::path summarized_dir = out_dir / "summarized_dataset";
        save_dataset(summarized.dataset, summarized_dir);
        fs::create_directories(summarized_dir / "children_orig");
        for (const auto& [id, body] : summarized.originals) {
            write_file(summarized_dir / "children_orig" / (id + ".txt"), body);
        }
        for (const auto& failure : summarized.failures) {
            summarize_failures.push_back({{"child_id", failure.child_id},
                                          {"message", failure.message}});
        }
        dataset = std::move(summarized.dataset);
    }

    const ParentSelection parents = pick_parents(config, dataset);
    std::vector<TraceQuery> queries = build_queries(dataset, parents.ids);

    std::vector<json> outcome_lines;
    OutcomeSet outcomes;

    if (strategy == "classify") {
        const auto& tmpl = lookup_prompt(catalog, require_string(config, "prompt"), "prompt");
        ClassifyOptions options;
        options.model = model;
        const std::string mode = config.value("mode", std::string("simple"));
        if (mode == "simple") options.mode = ClassifyMode::simple;
        else if (mode == "cot") options.mode = ClassifyMode::cot;
        else if (mode == "multi") options.mode = ClassifyMode::multi_question;
        else config_error("mode", "expected simple, cot, or multi");
        const std::string policy = config.value("error_policy", std::string("abort"));
        if (policy == "abort") options.policy = ErrorPolicy::abort_run;
        else if (policy == "skip") options.policy = ErrorPolicy::skip_errors;
        else config_error("error_policy", "expected abort or skip");
        options.reask_limit = config.value("reask_limit", 0);

        ClassifyRun run = classify_pairs(queries, tmpl, *setup.gateway, options);
        for (const auto& outcome : run.outcomes) {
            outcome_lines.push_back(classification_to_json(outcome));
        }
        for (const auto& failure : run.failures) {
            outcome_lines.push_back({{"type", "error"},
                                     {"parent_id", failure.parent_id},
                                     {"child_id", failure.child_id},
                                     {"code", static_cast<int>(failure.code)},
                                     {"message", failure.message}});
        }
        outcomes.classifications = std::move(run.outcomes);
        for (const auto& line : outcome_lines) {
            if (line["type"] == "error") outcomes.failures.push_back(line);
        }
    } else {
        const IdfTable idf = [&] {
            std::vector<Artifact> corpus = dataset.parents;
            corpus.insert(corpus.end(), dataset.children.begin(), dataset.children.end());
            return fit_corpus(corpus);
        }();

        if (ranker == "vsm") {
            for (const auto& query : queries) {
                const auto ranked = vsm_rank(query, idf);
                RankingOutcome outcome;
                outcome.parent_id = query.parent.id;
                outcome.prompt_id = "vsm";
                for (const auto& candidate : ranked) {
                    outcome.initial_order.push_back(candidate.child_id);
                }
                outcome.final_order = outcome.initial_order;

                std::string csv = "rank,child_id,score\n";
                for (std::size_t i = 0; i < ranked.size(); ++i) {
                    char buffer[64];
                    std::snprintf(buffer, sizeof(buffer), "%.9f", ranked[i].score);
                    csv += std::to_string(i + 1) + "," + ranked[i].child_id + "," + buffer + "\n";
                }
                write_file(out_dir / ("vsm_rank_" + query.parent.id + ".csv"), csv);

                outcome_lines.push_back(ranking_to_json(outcome));
                outcomes.rankings.push_back(std::move(outcome));
            }
        } else {
            const auto& tmpl = lookup_prompt(
                catalog, config.value("prompt", std::string("rank-v1")), "prompt");
            RankOptions options;
            options.model = model;
            options.repair_seed = config.value("repair_seed", std::uint64_t{0});
            options.shuffle_seed = config.value("shuffle_seed", std::uint64_t{0});
            options.allow_empty_fallback = config.value("allow_empty_ranking_fallback", false);
            const std::string order = config.value("initial_order", std::string("vsm"));
            if (order == "vsm") options.initial_order = InitialOrder::vsm;
            else if (order == "canonical") options.initial_order = InitialOrder::canonical;
            else if (order == "shuffle") options.initial_order = InitialOrder::shuffled;
            else config_error("initial_order", "expected vsm, canonical, or shuffle");

            for (const auto& query : queries) {
                RankingOutcome outcome = rank_query(query, idf, tmpl, *setup.gateway, options);
                outcome_lines.push_back(ranking_to_json(outcome));
                outcomes.rankings.push_back(std::move(outcome));
            }
        }
    }

    write_outcome_lines(out_dir / "outcomes.jsonl", outcome_lines);

    const bool multi_mode = config.value("mode", std::string{}) == "multi";
    json report = evaluate_outcomes(dataset, outcomes, parse_thresholds(config, multi_mode));
    report["dataset"] = dataset.name;
    report["config"] = config;
    report["config_digest"] = sha256_hex(config.dump());
    report["backend"] = needs_backend ? require_string(config, "backend") : std::string("none");
    json prompt_ids = json::array();
    if (config.contains("prompt")) prompt_ids.push_back(config["prompt"]);
    if (strategy == "rank" && !config.contains("prompt") && ranker == "llm") {
        prompt_ids.push_back("rank-v1");
    }
    if (ranker == "vsm" && strategy == "rank") prompt_ids.push_back("vsm");
    report["prompt_ids"] = prompt_ids;
    report["parent_ids"] = parents.ids;
    if (parents.seed.has_value()) {
        report["sampled_parents"] = parents.sampled;
        report["seeds"]["sample"] = *parents.seed;
    }
    if (config.contains("repair_seed")) report["seeds"]["repair"] = config["repair_seed"];
    if (config.contains("shuffle_seed")) report["seeds"]["shuffle"] = config["shuffle_seed"];
    if (!summarize_failures.empty()) report["summarize_failures"] = summarize_failures;

    for (const auto& flush_path : setup.flush_paths) {
        setup.gateway->write_session_archive(flush_path);
    }

    StageOutput output;
    output.report = report;
    output.report_text = report_to_text(report);
    write_file(out_dir / "report.json", report.dump(2) + "\n");
    write_file(out_dir / "report.txt", output.report_text);
    return output;
}

json run_summarize(const json& config, const fs::path& base_dir) {
    check_keys(config, {"dataset", "backend", "record_to", "prompt", "model", "out_dir",
                        "prompts_dir", "max_in_flight"});
    TraceDataset dataset = load_dataset(resolve(base_dir, require_string(config, "dataset")));
    const auto catalog = catalog_for(config, base_dir);
    const auto& tmpl = lookup_prompt(
        catalog, config.value("prompt", std::string("summarize-code-v1")), "prompt");
    GatewaySetup setup = make_gateway(config, base_dir);
    const fs::path out_dir = resolve(base_dir, require_string(config, "out_dir"));

    SummarizeResult result = summarize_code(dataset, *setup.gateway, tmpl, parse_model(config));
    save_dataset(result.dataset, out_dir);
    fs::create_directories(out_dir / "children_orig");
    for (const auto& [id, body] : result.originals) {
        write_file(out_dir / "children_orig" / (id + ".txt"), body);
    }
    for (const auto& flush_path : setup.flush_paths) {
        setup.gateway->write_session_archive(flush_path);
    }

    json summary;
    summary["dataset"] = dataset.name;
    summary["summarized"] = result.originals.size();
    summary["out_dir"] = out_dir.string();
    json failures = json::array();
    for (const auto& failure : result.failures) {
        failures.push_back({{"child_id", failure.child_id}, {"message", failure.message}});
    }
    summary["failures"] = failures;
    return summary;
}

StageOutput run_eval(const json& config, const fs::path& base_dir) {
    check_keys(config, {"dataset", "outcomes", "thresholds", "out_dir"});
    TraceDataset dataset = load_dataset(resolve(base_dir, require_string(config, "dataset")));
    const fs::path outcomes_path = resolve(base_dir, require_string(config, "outcomes"));
    OutcomeSet outcomes = parse_outcome_lines(read_file(outcomes_path), outcomes_path.string());

    json report = evaluate_outcomes(dataset, outcomes, parse_thresholds(config, false));
    report["dataset"] = dataset.name;
    report["config"] = config;
    report["config_digest"] = sha256_hex(config.dump());
    report["backend"] = "offline-eval";
    std::set<std::string> prompt_ids;
    for (const auto& outcome : outcomes.classifications) prompt_ids.insert(outcome.prompt_id);
    for (const auto& outcome : outcomes.rankings) prompt_ids.insert(outcome.prompt_id);
    report["prompt_ids"] = prompt_ids;

    StageOutput output;
    output.report = report;
    output.report_text = report_to_text(report);
    if (config.contains("out_dir")) {
        const fs::path out_dir = resolve(base_dir, config["out_dir"].get<std::string>());
        fs::create_directories(out_dir);
        write_file(out_dir / "report.json", report.dump(2) + "\n");
        write_file(out_dir / "report.txt", output.report_text);
    }
    return output;
}

}  // namespace tracebench
