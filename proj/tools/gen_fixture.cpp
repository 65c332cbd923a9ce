// Regenerates the bundled end-to-end fixture: a small synthetic dataset plus
// replay archives covering one classification run and one ranking run, and
// the two config files that drive them. Run from the repo root:
//
//   ./build/tools/gen_fixture [--out tests/fixtures/e2e]
//
// The archives are produced by rendering the real pipeline prompts, so they
// stay in sync with the prompt catalog and digest scheme; re-run this tool
// after changing either.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "core/corpus.hpp"
#include "core/experiment.hpp"
#include "core/gateway.hpp"
#include "core/pipeline.hpp"
#include "core/prompting.hpp"
#include "core/sampler.hpp"
#include "core/vsm.hpp"

namespace fs = std::filesystem;
using namespace tracebench;
using nlohmann::json;

namespace {

TraceDataset demo_dataset() {
    TraceDataset dataset;
    dataset.name = "demo-sat";
    dataset.parent_kind = "high-level requirement";
    dataset.child_kind = "low-level requirement";

    auto parent = [&](const std::string& id, const std::string& body) {
        dataset.parents.push_back({id, Layer::parent, dataset.parent_kind, body});
    };
    auto child = [&](const std::string& id, const std::string& body) {
        dataset.children.push_back({id, Layer::child, dataset.child_kind, body});
    };

    parent("HLR-1", "The telemetry handler shall decode incoming frames and queue decoded "
                    "errors for the housekeeping monitor.\n");
    parent("HLR-2", "The command dispatcher shall validate uplinked commands and route them "
                    "to the scheduler within the allotted cycle.\n");
    parent("HLR-3", "The scheduler shall execute periodic maintenance tasks and report "
                    "missed deadlines in housekeeping.\n");
    parent("HLR-4", "The storage manager shall write payload measurements to nonvolatile "
                    "memory and verify each write.\n");
    parent("HLR-5", "The fault manager shall collect error reports from all subsystems and "
                    "trigger safe mode when thresholds are exceeded.\n");

    child("LLR-A", "Error queue implementation. Decoded errors are placed on a bounded "
                   "queue; the housekeeping monitor drains the queue once per cycle and the "
                   "fault manager inspects overflow counters.\n");
    child("LLR-B", "Input validation. Each received request is checked against the mission "
                   "dictionary before dispatch; malformed requests are rejected and counted.\n");
    child("LLR-C", "Dispatch and scheduling. Validated commands are routed to the scheduler "
                   "queue; periodic tasks execute in fixed slots within the allotted cycle.\n");
    child("LLR-D", "Deadline reporting. Missed deadlines of periodic maintenance tasks are "
                   "recorded and emitted in the housekeeping packet; repeated misses raise an "
                   "error report.\n");
    child("LLR-E", "Nonvolatile write path. Payload measurements are buffered and written to "
                   "flash banks in fixed-size pages.\n");
    child("LLR-F", "Write verification and faults. Every write to nonvolatile memory is read "
                   "back and compared; mismatches produce error reports consumed by the fault "
                   "manager.\n");

    dataset.true_links = {
        {"HLR-1", "LLR-A"},
        {"HLR-2", "LLR-B"}, {"HLR-2", "LLR-C"},
        {"HLR-3", "LLR-C"}, {"HLR-3", "LLR-D"},
        {"HLR-4", "LLR-E"}, {"HLR-4", "LLR-F"},
        {"HLR-5", "LLR-A"}, {"HLR-5", "LLR-D"}, {"HLR-5", "LLR-F"},
    };
    return dataset;
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

constexpr std::uint64_t kSampleSeed = 7;
constexpr std::uint64_t kRepairSeed = 11;

ModelParams fixture_model() {
    ModelParams model;
    model.model_id = "demo-model";
    model.max_output_tokens = 256;
    return model;
}

std::vector<CompletionRecord> record_classify(const TraceDataset& dataset,
                                              const std::vector<TraceQuery>& queries) {
    const PromptTemplate& tmpl = *find_template(builtin_catalog(), "cm1-q1");
    std::vector<CompletionRecord> records;
    std::size_t index = 0;
    for (const auto& query : queries) {
        for (const auto& candidate : query.candidates) {
            const bool linked = query.relevant_ids.count(candidate.id) != 0;
            bool predicted = linked;
            // One planned false positive and one false negative keep the
            // confusion table interesting.
            if (query.parent.id == "HLR-1" && candidate.id == "LLR-F") predicted = true;
            if (query.parent.id == "HLR-5" && candidate.id == "LLR-D") predicted = false;

            std::string response;
            if (query.parent.id == "HLR-2" && candidate.id == "LLR-C") {
                response = "Yes, there is a traceability link between (1) and (2). (1) routes "
                           "validated commands to the scheduler and (2) implements that "
                           "dispatch path.";
            } else if (predicted) {
                response = index % 2 == 0 ? "Yes." : "yes, the artifacts are related.";
            } else {
                response = index % 2 == 0 ? "No." : "no";
            }
            const CompletionRequest request =
                make_request(render_pair(tmpl, query.parent, candidate), fixture_model());
            records.push_back({request_digest(request), request, response, "fixture", 0});
            ++index;
        }
    }
    return records;
}

std::vector<CompletionRecord> record_rank(const TraceDataset& dataset,
                                          const std::vector<TraceQuery>& queries) {
    const PromptTemplate& tmpl = *find_template(builtin_catalog(), "rank-v1");
    std::vector<Artifact> corpus = dataset.parents;
    corpus.insert(corpus.end(), dataset.children.begin(), dataset.children.end());
    const IdfTable idf = fit_corpus(corpus);

    std::vector<CompletionRecord> records;
    std::size_t query_index = 0;
    for (const auto& query : queries) {
        std::vector<Artifact> ordered;
        for (const auto& ranked : vsm_rank(query, idf)) {
            ordered.push_back(*std::find_if(
                query.candidates.begin(), query.candidates.end(),
                [&](const Artifact& a) { return a.id == ranked.child_id; }));
        }

        // Scripted "model": relevant ids first (ascending), then the rest in
        // the presented order.
        std::vector<std::string> response_ids(query.relevant_ids.begin(),
                                              query.relevant_ids.end());
        for (const auto& artifact : ordered) {
            if (query.relevant_ids.count(artifact.id) == 0) {
                response_ids.push_back(artifact.id);
            }
        }
        if (query_index == 1) {
            response_ids.resize(response_ids.size() - 2);  // exercise the repair path
        }
        if (query_index == 2) {
            response_ids.insert(response_ids.begin() + 1, "LLR-Z");  // unknown token
        }

        std::string response;
        for (std::size_t i = 0; i < response_ids.size(); ++i) {
            if (i > 0) response += ", ";
            response += response_ids[i];
        }

        const CompletionRequest request =
            make_request(render_ranking(tmpl, query.parent, ordered), fixture_model());
        records.push_back({request_digest(request), request, response, "fixture", 0});
        ++query_index;
    }
    return records;
}

}  // namespace

int main(int argc, char** argv) {
    fs::path out_dir = "tests/fixtures/e2e";
    for (int i = 1; i + 1 < argc; i += 2) {
        if (std::string(argv[i]) == "--out") out_dir = argv[i + 1];
    }

    const TraceDataset dataset = demo_dataset();
    save_dataset(dataset, out_dir / "dataset");

    std::vector<std::string> parent_ids;
    for (const auto& pick : sample_parents(dataset, kSampleSeed)) {
        parent_ids.push_back(pick.id);
    }
    const auto queries = build_queries(dataset, parent_ids);

    write_archive(record_classify(dataset, queries), out_dir / "replay_classify.jsonl");
    write_archive(record_rank(dataset, queries), out_dir / "replay_rank.jsonl");

    json classify_config;
    classify_config["dataset"] = "dataset";
    classify_config["strategy"] = "classify";
    classify_config["prompt"] = "cm1-q1";
    classify_config["mode"] = "simple";
    classify_config["parents"] = {{"seed", kSampleSeed}};
    classify_config["backend"] = "replay:replay_classify.jsonl";
    classify_config["model"] = {{"model_id", "demo-model"},
                                {"temperature", 0.0},
                                {"max_output_tokens", 256}};
    write_text(out_dir / "config_classify.json", classify_config.dump(2) + "\n");

    json rank_config;
    rank_config["dataset"] = "dataset";
    rank_config["strategy"] = "rank";
    rank_config["prompt"] = "rank-v1";
    rank_config["initial_order"] = "vsm";
    rank_config["repair_seed"] = kRepairSeed;
    rank_config["parents"] = {{"seed", kSampleSeed}};
    rank_config["backend"] = "replay:replay_rank.jsonl";
    rank_config["model"] = {{"model_id", "demo-model"},
                            {"temperature", 0.0},
                            {"max_output_tokens", 256}};
    write_text(out_dir / "config_rank.json", rank_config.dump(2) + "\n");

    // Verify the fixture actually replays end to end.
    for (const char* name : {"config_classify.json", "config_rank.json"}) {
        const fs::path config_path = out_dir / name;
        const auto config = load_config_file(config_path);
        const fs::path scratch = out_dir / ".verify";
        const auto result = run_experiment(config, out_dir, scratch);
        std::printf("%s: ok (report %zu bytes)\n", name, result.report_text.size());
        fs::remove_all(scratch);
    }
    std::printf("fixture written to %s\n", out_dir.string().c_str());
    return 0;
}
