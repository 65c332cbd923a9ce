#include "core/report.hpp"

#include <cstdio>
#include <sstream>
#include <vector>

namespace tracebench {

namespace {

std::string pad(const std::string& text, std::size_t width) {
    std::string out = text;
    while (out.size() < width) out.push_back(' ');
    return out;
}

void render_table(std::ostringstream& out, const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> widths;
    for (const auto& row : rows) {
        if (widths.size() < row.size()) widths.resize(row.size(), 0);
        for (std::size_t i = 0; i < row.size(); ++i) {
            widths[i] = std::max(widths[i], row[i].size());
        }
    }
    for (const auto& row : rows) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            line += pad(row[i], i + 1 == row.size() ? row[i].size() : widths[i] + 2);
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out << line << "\n";
    }
}

std::string format_ap(double value) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.4f", value);
    return buffer;
}

}  // namespace

std::string format_percent(double value, bool zero_denominator) {
    char buffer[32];
    std::snprintf(buffer, sizeof(buffer), "%.1f%%", value * 100.0);
    std::string out = buffer;
    if (zero_denominator) out += "*";
    return out;
}

std::string report_to_text(const nlohmann::json& report) {
    std::ostringstream out;
    out << "dataset: " << report.value("dataset", std::string("?")) << "\n";
    out << "backend: " << report.value("backend", std::string("?"))
        << "  config digest: " << report.value("config_digest", std::string("?")) << "\n";
    if (report.contains("sampled_parents")) {
        out << "parents:";
        for (const auto& entry : report["sampled_parents"]) {
            out << " " << entry["category"].get<std::string>() << ":"
                << entry["id"].get<std::string>();
        }
        out << "\n";
    }
    bool zero_denominator_seen = false;

    if (report.contains("classification") && !report["classification"].empty()) {
        out << "\n";
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"Prompt", "Precision", "Recall", "TP", "TN", "FP", "FN"});
        for (const auto& entry : report["classification"]) {
            const auto& counts = entry["counts"];
            const bool p_flag = entry["precision"]["zero_denominator"].get<bool>();
            const bool r_flag = entry["recall"]["zero_denominator"].get<bool>();
            zero_denominator_seen = zero_denominator_seen || p_flag || r_flag;
            rows.push_back({entry["prompt_id"].get<std::string>(),
                            format_percent(entry["precision"]["value"].get<double>(), p_flag),
                            format_percent(entry["recall"]["value"].get<double>(), r_flag),
                            std::to_string(counts["tp"].get<std::int64_t>()),
                            std::to_string(counts["tn"].get<std::int64_t>()),
                            std::to_string(counts["fp"].get<std::int64_t>()),
                            std::to_string(counts["fn"].get<std::int64_t>())});
        }
        render_table(out, rows);

        for (const auto& entry : report["classification"]) {
            if (!entry.contains("sweep")) continue;
            out << "\nvote threshold sweep (" << entry["prompt_id"].get<std::string>() << ")\n";
            std::vector<std::vector<std::string>> sweep_rows;
            sweep_rows.push_back({"k", "Positives", "Precision", "Recall", "TP", "FP"});
            for (const auto& step : entry["sweep"]) {
                const bool p_flag = step["precision"]["zero_denominator"].get<bool>();
                const bool r_flag = step["recall"]["zero_denominator"].get<bool>();
                zero_denominator_seen = zero_denominator_seen || p_flag || r_flag;
                sweep_rows.push_back(
                    {std::to_string(step["k"].get<int>()),
                     std::to_string(step["positives"].get<std::int64_t>()),
                     format_percent(step["precision"]["value"].get<double>(), p_flag),
                     format_percent(step["recall"]["value"].get<double>(), r_flag),
                     std::to_string(step["counts"]["tp"].get<std::int64_t>()),
                     std::to_string(step["counts"]["fp"].get<std::int64_t>())});
            }
            render_table(out, sweep_rows);
        }
    }

    if (report.contains("ranking")) {
        const auto& ranking = report["ranking"];
        out << "\n";
        std::vector<std::vector<std::string>> rows;
        rows.push_back({"Dataset", "MAP-VSM", "MAP-VSM+LLM"});
        std::string map_vsm = "-";
        std::string map_llm = "-";
        if (ranking.contains("map_initial") && !ranking["map_initial"].is_null()) {
            map_vsm = format_percent(ranking["map_initial"].get<double>());
        }
        if (ranking.contains("map_final") && !ranking["map_final"].is_null()) {
            map_llm = format_percent(ranking["map_final"].get<double>());
        }
        rows.push_back({report.value("dataset", std::string("?")), map_vsm, map_llm});
        render_table(out, rows);

        if (report.contains("queries")) {
            out << "\n";
            std::vector<std::vector<std::string>> query_rows;
            query_rows.push_back({"Parent", "Relevant", "AP-initial", "AP-final"});
            for (const auto& query : report["queries"]) {
                std::string initial = "-";
                std::string final_ap = "-";
                if (!query["initial_average_precision"].is_null()) {
                    initial = format_ap(query["initial_average_precision"].get<double>());
                }
                if (!query["average_precision"].is_null()) {
                    final_ap = format_ap(query["average_precision"].get<double>());
                }
                query_rows.push_back({query["parent_id"].get<std::string>(),
                                      std::to_string(query["num_relevant"].get<std::size_t>()),
                                      initial, final_ap});
            }
            render_table(out, query_rows);
            if (ranking.contains("excluded_queries") &&
                ranking["excluded_queries"].get<std::int64_t>() > 0) {
                out << "(" << ranking["excluded_queries"].get<std::int64_t>()
                    << " queries with no relevant links excluded from MAP)\n";
            }
        }
    }

    if (zero_denominator_seen) {
        out << "\n* zero denominator, reported as 0\n";
    }
    return out.str();
}

}  // namespace tracebench
