// tracebench command line: ingest -> sample -> summarize -> classify/rank ->
// eval -> report, all driven through the shared-library C API.

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "tracebench/tracebench.h"

using nlohmann::json;

namespace {

int exit_code_for(tb_status status) {
    switch (status) {
        case TB_OK: return 0;
        case TB_ERROR_CONFIG: return 2;
        case TB_ERROR_PROVIDER: return 3;
        case TB_ERROR_PARSE: return 4;
        default: return 1;
    }
}

int fail_with(tb_status status) {
    std::fprintf(stderr, "tracebench: %s\n", tb_last_error());
    return exit_code_for(status);
}

struct OwnedString {
    char* value{nullptr};
    ~OwnedString() { tb_string_free(value); }
};

// Shared flags for stages that call a backend.
struct BackendFlags {
    std::string backend;
    std::string record_to;
    std::string model_id;
    double temperature{0.0};
    int max_tokens{1024};
    int max_in_flight{4};

    void attach(CLI::App* cmd, bool required = true) {
        auto* opt = cmd->add_option("--backend", backend,
                                    "live, cached-live:PATH, or replay:PATH");
        if (required) opt->required();
        cmd->add_option("--record", record_to, "also write the session archive to PATH");
        cmd->add_option("--model", model_id, "model id recorded in request digests");
        cmd->add_option("--temperature", temperature, "sampling temperature (default 0)");
        cmd->add_option("--max-tokens", max_tokens, "max output tokens");
        cmd->add_option("--jobs", max_in_flight, "max in-flight requests (default 4)");
    }

    void fill(json& config) const {
        if (!backend.empty()) config["backend"] = backend;
        if (!record_to.empty()) config["record_to"] = record_to;
        json model;
        if (!model_id.empty()) model["model_id"] = model_id;
        model["temperature"] = temperature;
        model["max_output_tokens"] = max_tokens;
        config["model"] = model;
        config["max_in_flight"] = max_in_flight;
    }
};

struct ParentFlags {
    std::string ids_csv;
    std::uint64_t seed{0};

    void attach(CLI::App* cmd) {
        cmd->add_option("--parents", ids_csv, "explicit comma-separated parent ids");
        cmd->add_option("--sample-seed", seed,
                        "sample 5 representative parents with this seed (default 0)");
    }

    void fill(json& config) const {
        json parents;
        if (!ids_csv.empty()) {
            json ids = json::array();
            std::size_t start = 0;
            while (start <= ids_csv.size()) {
                const std::size_t pos = ids_csv.find(',', start);
                const std::string id =
                    ids_csv.substr(start, pos == std::string::npos ? std::string::npos
                                                                   : pos - start);
                if (!id.empty()) ids.push_back(id);
                if (pos == std::string::npos) break;
                start = pos + 1;
            }
            parents["ids"] = ids;
        } else {
            parents["seed"] = seed;
        }
        config["parents"] = parents;
    }
};

int print_report(const char* report_json) {
    OwnedString text;
    const tb_status status = tb_report_text(report_json, &text.value);
    if (status != TB_OK) return fail_with(status);
    std::fputs(text.value, stdout);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"trace-link experiments over LLM prompts, reproducible from replay archives"};
    app.require_subcommand(1);

    // ingest
    std::string ingest_dataset, ingest_out;
    auto* ingest = app.add_subcommand("ingest", "load and validate a dataset directory");
    ingest->add_option("--dataset", ingest_dataset, "dataset directory")->required();
    ingest->add_option("--out", ingest_out, "write a normalized copy here");

    // sample
    std::string sample_dataset;
    std::uint64_t sample_seed = 0;
    auto* sample = app.add_subcommand("sample", "pick 5 representative parent queries");
    sample->add_option("--dataset", sample_dataset, "dataset directory")->required();
    sample->add_option("--seed", sample_seed, "sampling seed")->required();

    // prompts list|show
    auto* prompts = app.add_subcommand("prompts", "inspect the prompt catalog");
    prompts->require_subcommand(1);
    auto* prompts_list = prompts->add_subcommand("list", "list templates");
    std::string show_id;
    auto* prompts_show = prompts->add_subcommand("show", "print one template file");
    prompts_show->add_option("id", show_id, "template id")->required();

    // summarize
    std::string summarize_dataset, summarize_out, summarize_prompt = "summarize-code-v1";
    BackendFlags summarize_backend;
    auto* summarize = app.add_subcommand("summarize", "replace code bodies with model summaries");
    summarize->add_option("--dataset", summarize_dataset, "dataset directory")->required();
    summarize->add_option("--out", summarize_out, "output dataset directory")->required();
    summarize->add_option("--prompt", summarize_prompt, "summary template id");
    summarize_backend.attach(summarize);

    // classify
    std::string classify_dataset, classify_prompt, classify_mode = "simple";
    std::string classify_out = ".", classify_policy = "abort";
    int classify_reask = 0;
    BackendFlags classify_backend;
    ParentFlags classify_parents;
    auto* classify = app.add_subcommand("classify", "classify every (parent, candidate) pair");
    classify->add_option("--dataset", classify_dataset, "dataset directory")->required();
    classify->add_option("--prompt", classify_prompt, "prompt template id")->required();
    classify->add_option("--mode", classify_mode, "simple, cot, or multi");
    classify->add_option("--out", classify_out, "output directory");
    classify->add_option("--policy", classify_policy, "abort or skip on pair errors");
    classify->add_option("--reask", classify_reask, "bounded re-asks after parse failures");
    classify_backend.attach(classify);
    classify_parents.attach(classify);

    // rank
    std::string rank_dataset, rank_prompt = "rank-v1", rank_strategy = "llm";
    std::string rank_init = "vsm", rank_out = ".";
    std::uint64_t rank_repair_seed = 0;
    BackendFlags rank_backend;
    ParentFlags rank_parents;
    auto* rank = app.add_subcommand("rank", "rank candidates per query");
    rank->add_option("--dataset", rank_dataset, "dataset directory")->required();
    rank->add_option("--strategy", rank_strategy, "llm (VSM-initialized re-rank) or vsm");
    rank->add_option("--prompt", rank_prompt, "ranking template id");
    rank->add_option("--init", rank_init, "initial order: vsm, canonical, or shuffle:SEED");
    rank->add_option("--repair-seed", rank_repair_seed, "seed for missing-id repair");
    rank->add_option("--out", rank_out, "output directory");
    rank_backend.attach(rank, /*required=*/false);
    rank_parents.attach(rank);

    // eval
    std::string eval_dataset, eval_outcomes, eval_out;
    auto* eval = app.add_subcommand("eval", "re-evaluate an outcomes file");
    eval->add_option("--dataset", eval_dataset, "dataset directory")->required();
    eval->add_option("--outcomes", eval_outcomes, "outcomes.jsonl path")->required();
    eval->add_option("--out", eval_out, "directory for report.json / report.txt");

    // report
    std::string report_path;
    auto* report = app.add_subcommand("report", "render a report.json as tables");
    report->add_option("--report", report_path, "report.json path")->required();

    // run
    std::string run_config, run_out = ".";
    auto* run = app.add_subcommand("run", "run a config file end to end");
    run->add_option("--config", run_config, "experiment config file")->required();
    run->add_option("--out", run_out, "output directory");

    CLI11_PARSE(app, argc, argv);

    if (ingest->parsed()) {
        tb_dataset* dataset = nullptr;
        tb_status status = tb_dataset_load(ingest_dataset.c_str(), &dataset);
        if (status != TB_OK) return fail_with(status);
        OwnedString stats;
        status = tb_dataset_stats(dataset, &stats.value);
        if (status != TB_OK) {
            tb_dataset_free(dataset);
            return fail_with(status);
        }
        const json parsed = json::parse(stats.value);
        std::printf("name: %s\nparents: %zu\nchildren: %zu\ntrue links: %zu\n",
                    parsed["name"].get<std::string>().c_str(),
                    parsed["parents"].get<std::size_t>(),
                    parsed["children"].get<std::size_t>(),
                    parsed["true_links"].get<std::size_t>());
        if (!ingest_out.empty()) {
            status = tb_dataset_save(dataset, ingest_out.c_str());
            if (status != TB_OK) {
                tb_dataset_free(dataset);
                return fail_with(status);
            }
            std::printf("saved normalized copy to %s\n", ingest_out.c_str());
        }
        tb_dataset_free(dataset);
        return 0;
    }

    if (sample->parsed()) {
        tb_dataset* dataset = nullptr;
        tb_status status = tb_dataset_load(sample_dataset.c_str(), &dataset);
        if (status != TB_OK) return fail_with(status);
        OwnedString picks;
        status = tb_sample_parents(dataset, sample_seed, &picks.value);
        tb_dataset_free(dataset);
        if (status != TB_OK) return fail_with(status);
        for (const auto& pick : json::parse(picks.value)) {
            std::printf("%s: %s\n", pick["category"].get<std::string>().c_str(),
                        pick["id"].get<std::string>().c_str());
        }
        return 0;
    }

    if (prompts_list->parsed()) {
        OwnedString list;
        const tb_status status = tb_prompts_list(&list.value);
        if (status != TB_OK) return fail_with(status);
        for (const auto& entry : json::parse(list.value)) {
            std::printf("%-20s %-14s %s\n", entry["id"].get<std::string>().c_str(),
                        entry["schema"].get<std::string>().c_str(),
                        entry["description"].get<std::string>().c_str());
        }
        return 0;
    }

    if (prompts_show->parsed()) {
        OwnedString text;
        const tb_status status = tb_prompt_text(show_id.c_str(), &text.value);
        if (status != TB_OK) return fail_with(status);
        std::fputs(text.value, stdout);
        return 0;
    }

    if (summarize->parsed()) {
        json config;
        config["dataset"] = summarize_dataset;
        config["out_dir"] = summarize_out;
        config["prompt"] = summarize_prompt;
        summarize_backend.fill(config);
        OwnedString summary;
        const tb_status status = tb_summarize(config.dump().c_str(), &summary.value);
        if (status != TB_OK) return fail_with(status);
        std::fputs(summary.value, stdout);
        return 0;
    }

    if (classify->parsed()) {
        json config;
        config["dataset"] = classify_dataset;
        config["prompt"] = classify_prompt;
        config["mode"] = classify_mode;
        config["error_policy"] = classify_policy;
        if (classify_reask > 0) config["reask_limit"] = classify_reask;
        config["out_dir"] = classify_out;
        classify_backend.fill(config);
        classify_parents.fill(config);
        OwnedString report_json;
        const tb_status status = tb_classify(config.dump().c_str(), &report_json.value);
        if (status != TB_OK) return fail_with(status);
        return print_report(report_json.value);
    }

    if (rank->parsed()) {
        json config;
        config["dataset"] = rank_dataset;
        config["ranker"] = rank_strategy;
        config["out_dir"] = rank_out;
        config["repair_seed"] = rank_repair_seed;
        if (rank_strategy == "llm") {
            config["prompt"] = rank_prompt;
            if (rank_backend.backend.empty()) {
                std::fprintf(stderr, "tracebench: --backend is required for --strategy llm\n");
                return 2;
            }
        }
        if (rank_init.rfind("shuffle:", 0) == 0) {
            config["initial_order"] = "shuffle";
            config["shuffle_seed"] = std::stoull(rank_init.substr(8));
        } else {
            config["initial_order"] = rank_init;
        }
        if (!rank_backend.backend.empty()) {
            rank_backend.fill(config);
        }
        rank_parents.fill(config);
        OwnedString report_json;
        const tb_status status = tb_rank(config.dump().c_str(), &report_json.value);
        if (status != TB_OK) return fail_with(status);
        return print_report(report_json.value);
    }

    if (eval->parsed()) {
        json config;
        config["dataset"] = eval_dataset;
        config["outcomes"] = eval_outcomes;
        if (!eval_out.empty()) config["out_dir"] = eval_out;
        OwnedString report_json;
        const tb_status status = tb_eval(config.dump().c_str(), &report_json.value);
        if (status != TB_OK) return fail_with(status);
        return print_report(report_json.value);
    }

    if (report->parsed()) {
        std::FILE* file = std::fopen(report_path.c_str(), "rb");
        if (file == nullptr) {
            std::fprintf(stderr, "tracebench: cannot read %s\n", report_path.c_str());
            return 1;
        }
        std::string content;
        char buffer[4096];
        std::size_t read = 0;
        while ((read = std::fread(buffer, 1, sizeof(buffer), file)) > 0) {
            content.append(buffer, read);
        }
        std::fclose(file);
        return print_report(content.c_str());
    }

    if (run->parsed()) {
        OwnedString report_json;
        const tb_status status =
            tb_run_experiment(run_config.c_str(), run_out.c_str(), &report_json.value);
        if (status != TB_OK) return fail_with(status);
        return print_report(report_json.value);
    }

    return 0;
}
