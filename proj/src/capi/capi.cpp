#include "tracebench/tracebench.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include <nlohmann/json.hpp>

#include "core/corpus.hpp"
#include "core/errors.hpp"
#include "core/experiment.hpp"
#include "core/prompting.hpp"
#include "core/report.hpp"
#include "core/sampler.hpp"

using nlohmann::json;

struct tb_dataset {
    tracebench::TraceDataset dataset;
};

namespace {

thread_local std::string g_last_error;

tb_status set_error(tb_status status, const std::string& message) {
    g_last_error = message;
    return status;
}

tb_status status_from(const tracebench::Error& error) {
    switch (error.code()) {
        case tracebench::ErrorCode::config: return TB_ERROR_CONFIG;
        case tracebench::ErrorCode::provider: return TB_ERROR_PROVIDER;
        case tracebench::ErrorCode::parse: return TB_ERROR_PARSE;
        case tracebench::ErrorCode::io: return TB_ERROR_IO;
        case tracebench::ErrorCode::validation: return TB_ERROR_VALIDATION;
        case tracebench::ErrorCode::generic: break;
    }
    return TB_ERROR;
}

char* copy_string(const std::string& text) {
    char* out = static_cast<char*>(std::malloc(text.size() + 1));
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

// Runs fn, converting exceptions into statuses and writing *out on success.
template <typename Fn>
tb_status guarded_string(char** out, Fn&& fn) {
    if (out == nullptr) return set_error(TB_ERROR, "null output pointer");
    *out = nullptr;
    try {
        *out = copy_string(fn());
        return TB_OK;
    } catch (const tracebench::Error& e) {
        return set_error(status_from(e), e.what());
    } catch (const std::exception& e) {
        return set_error(TB_ERROR, e.what());
    }
}

json parse_config(const char* config_json) {
    if (config_json == nullptr) {
        tracebench::fail(tracebench::ErrorCode::config, "null config");
    }
    json config;
    try {
        config = json::parse(config_json);
    } catch (const json::exception& e) {
        tracebench::fail(tracebench::ErrorCode::config,
                         std::string("malformed config json: ") + e.what());
    }
    if (!config.is_object()) {
        tracebench::fail(tracebench::ErrorCode::config, "config must be a JSON object");
    }
    return config;
}

std::string run_strategy(const char* config_json, const char* expected_strategy) {
    json config = parse_config(config_json);
    if (config.contains("strategy") &&
        config["strategy"].get<std::string>() != expected_strategy) {
        tracebench::fail(tracebench::ErrorCode::config,
                         std::string("invalid config field: strategy (expected '") +
                             expected_strategy + "')");
    }
    config["strategy"] = expected_strategy;
    std::string out_dir = ".";
    if (config.contains("out_dir")) {
        out_dir = config["out_dir"].get<std::string>();
        config.erase("out_dir");
    }
    return tracebench::run_experiment(config, ".", out_dir).report.dump(2) + "\n";
}

}  // namespace

extern "C" {

const char* tb_version(void) { return "0.1.0"; }

const char* tb_last_error(void) { return g_last_error.c_str(); }

void tb_string_free(char* text) { std::free(text); }

tb_status tb_dataset_load(const char* root_dir, tb_dataset** out_dataset) {
    if (root_dir == nullptr || out_dataset == nullptr) {
        return set_error(TB_ERROR, "null argument");
    }
    *out_dataset = nullptr;
    try {
        auto* handle = new tb_dataset{tracebench::load_dataset(root_dir)};
        *out_dataset = handle;
        return TB_OK;
    } catch (const tracebench::Error& e) {
        return set_error(status_from(e), e.what());
    } catch (const std::exception& e) {
        return set_error(TB_ERROR, e.what());
    }
}

tb_status tb_dataset_save(const tb_dataset* dataset, const char* root_dir) {
    if (dataset == nullptr || root_dir == nullptr) {
        return set_error(TB_ERROR, "null argument");
    }
    try {
        tracebench::save_dataset(dataset->dataset, root_dir);
        return TB_OK;
    } catch (const tracebench::Error& e) {
        return set_error(status_from(e), e.what());
    } catch (const std::exception& e) {
        return set_error(TB_ERROR, e.what());
    }
}

tb_status tb_dataset_stats(const tb_dataset* dataset, char** out_json) {
    if (dataset == nullptr) return set_error(TB_ERROR, "null dataset");
    return guarded_string(out_json, [&] {
        json stats;
        stats["name"] = dataset->dataset.name;
        stats["parents"] = dataset->dataset.parents.size();
        stats["children"] = dataset->dataset.children.size();
        stats["true_links"] = dataset->dataset.true_links.size();
        stats["children_are_code"] = dataset->dataset.children_are_code;
        return stats.dump();
    });
}

void tb_dataset_free(tb_dataset* dataset) { delete dataset; }

tb_status tb_sample_parents(const tb_dataset* dataset, uint64_t seed, char** out_json) {
    if (dataset == nullptr) return set_error(TB_ERROR, "null dataset");
    return guarded_string(out_json, [&] {
        json picks = json::array();
        for (const auto& pick : tracebench::sample_parents(dataset->dataset, seed)) {
            picks.push_back({{"category", pick.category}, {"id", pick.id}});
        }
        return picks.dump();
    });
}

tb_status tb_prompts_list(char** out_json) {
    return guarded_string(out_json, [] {
        json list = json::array();
        for (const auto& tmpl : tracebench::builtin_catalog()) {
            json entry;
            entry["id"] = tmpl.id;
            entry["description"] = tmpl.description;
            switch (tmpl.schema.kind) {
                case tracebench::SchemaKind::yes_no: entry["schema"] = "yes-no"; break;
                case tracebench::SchemaKind::tagged_sections:
                    entry["schema"] = tmpl.schema.tags.empty() ? "summary" : "tagged";
                    break;
                case tracebench::SchemaKind::ranked_id_list:
                    entry["schema"] = "ranked-id-list";
                    break;
            }
            entry["tags"] = tmpl.schema.tags;
            list.push_back(entry);
        }
        return list.dump();
    });
}

tb_status tb_prompt_text(const char* prompt_id, char** out_text) {
    if (prompt_id == nullptr) return set_error(TB_ERROR, "null prompt id");
    return guarded_string(out_text, [&]() -> std::string {
        std::string text = tracebench::builtin_template_text(prompt_id);
        if (text.empty()) {
            tracebench::fail(tracebench::ErrorCode::config,
                             std::string("unknown prompt id '") + prompt_id + "'");
        }
        return text;
    });
}

tb_status tb_summarize(const char* config_json, char** out_json) {
    return guarded_string(out_json, [&] {
        return tracebench::run_summarize(parse_config(config_json), ".").dump(2) + "\n";
    });
}

tb_status tb_classify(const char* config_json, char** out_report_json) {
    return guarded_string(out_report_json,
                          [&] { return run_strategy(config_json, "classify"); });
}

tb_status tb_rank(const char* config_json, char** out_report_json) {
    return guarded_string(out_report_json, [&] { return run_strategy(config_json, "rank"); });
}

tb_status tb_eval(const char* config_json, char** out_report_json) {
    return guarded_string(out_report_json, [&] {
        return tracebench::run_eval(parse_config(config_json), ".").report.dump(2) + "\n";
    });
}

tb_status tb_report_text(const char* report_json, char** out_text) {
    return guarded_string(out_text, [&] {
        if (report_json == nullptr) {
            tracebench::fail(tracebench::ErrorCode::config, "null report json");
        }
        json report;
        try {
            report = json::parse(report_json);
        } catch (const json::exception& e) {
            tracebench::fail(tracebench::ErrorCode::config,
                             std::string("malformed report json: ") + e.what());
        }
        return tracebench::report_to_text(report);
    });
}

tb_status tb_run_experiment(const char* config_path, const char* out_dir,
                            char** out_report_json) {
    return guarded_string(out_report_json, [&] {
        if (config_path == nullptr || out_dir == nullptr) {
            tracebench::fail(tracebench::ErrorCode::config, "null argument");
        }
        const std::filesystem::path path(config_path);
        const json config = tracebench::load_config_file(path);
        const auto base_dir = path.has_parent_path() ? path.parent_path()
                                                     : std::filesystem::path(".");
        return tracebench::run_experiment(config, base_dir, out_dir).report.dump(2) + "\n";
    });
}

}  // extern "C"
