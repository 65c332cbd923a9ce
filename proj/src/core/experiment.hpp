#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace tracebench {

struct StageOutput {
    nlohmann::json report;
    std::string report_text;
};

// Reads a config file; relative paths inside it resolve against the file's
// directory, so bundled configs work from any working directory.
nlohmann::json load_config_file(const std::filesystem::path& path);

// Full lifecycle for strategy "classify" or "rank": load -> select parents ->
// (summarize) -> classify/rank -> eval -> report. Writes outcomes.jsonl,
// report.json, report.txt, and any recorded archive under out_dir.
StageOutput run_experiment(const nlohmann::json& config,
                           const std::filesystem::path& base_dir,
                           const std::filesystem::path& out_dir);

// Standalone code-summarization pass; writes the summarized dataset (plus a
// children_orig/ audit copy) to the configured out_dir.
nlohmann::json run_summarize(const nlohmann::json& config,
                             const std::filesystem::path& base_dir);

// Re-evaluates an outcomes file against a dataset and renders a report.
StageOutput run_eval(const nlohmann::json& config, const std::filesystem::path& base_dir);

}  // namespace tracebench
