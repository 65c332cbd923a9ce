#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace tracebench {

// Renders a metrics report JSON object as the human-readable tables
// (Prompt / Precision / Recall / TP / TN / FP / FN and Dataset / MAP-VSM /
// MAP-VSM+LLM), plus the vote-threshold sweep when present.
std::string report_to_text(const nlohmann::json& report);

// "18.2%" style formatting; flagged zero-denominator rates render as "0.0%*".
std::string format_percent(double value, bool zero_denominator = false);

}  // namespace tracebench
