#include "core/prompting.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "core/errors.hpp"
#include "core/prompts_data.hpp"
#include "core/strings.hpp"

namespace fs = std::filesystem;

namespace tracebench {

namespace {

constexpr std::string_view kSourcePlaceholder = "{source_body}";
constexpr std::string_view kTargetPlaceholder = "{target_body}";
constexpr std::string_view kArtifactListPlaceholder = "{artifact_list}";

std::size_t count_occurrences(std::string_view text, std::string_view needle) {
    std::size_t count = 0;
    std::size_t pos = text.find(needle);
    while (pos != std::string_view::npos) {
        ++count;
        pos = text.find(needle, pos + needle.size());
    }
    return count;
}

// Placeholders each schema must contain exactly once.
std::vector<std::string_view> required_placeholders(const ResponseSchema& schema) {
    switch (schema.kind) {
        case SchemaKind::yes_no:
            return {kSourcePlaceholder, kTargetPlaceholder};
        case SchemaKind::tagged_sections:
            if (schema.tags.empty()) {
                return {kSourcePlaceholder};  // free-text summary
            }
            return {kSourcePlaceholder, kTargetPlaceholder};
        case SchemaKind::ranked_id_list:
            return {kSourcePlaceholder, kArtifactListPlaceholder};
    }
    return {};
}

// Single-pass substitution; replacement text is never rescanned, so bodies
// containing placeholder-like text render verbatim.
std::string substitute(std::string_view body,
                       const std::map<std::string_view, std::string_view>& values) {
    std::string out;
    out.reserve(body.size());
    std::size_t pos = 0;
    while (pos < body.size()) {
        if (body[pos] == '{') {
            bool replaced = false;
            for (const auto& [name, value] : values) {
                if (body.compare(pos, name.size(), name) == 0) {
                    out.append(value);
                    pos += name.size();
                    replaced = true;
                    break;
                }
            }
            if (replaced) continue;
        }
        out.push_back(body[pos]);
        ++pos;
    }
    return out;
}

// Collects tag names from adjacent "<name></name>" instruction pairs.
std::set<std::string> instruction_tags(std::string_view body) {
    std::set<std::string> tags;
    std::size_t pos = 0;
    while ((pos = body.find('<', pos)) != std::string_view::npos) {
        std::size_t close = body.find('>', pos);
        if (close == std::string_view::npos) break;
        std::string_view name = body.substr(pos + 1, close - pos - 1);
        if (!name.empty() && name.find_first_of("</ ") == std::string_view::npos) {
            const std::string closing = "</" + std::string(name) + ">";
            if (body.compare(close + 1, closing.size(), closing) == 0) {
                tags.insert(std::string(name));
            }
        }
        pos = close + 1;
    }
    return tags;
}

SchemaKind parse_schema_kind(std::string_view value, std::string_view origin) {
    if (value == "yes-no") return SchemaKind::yes_no;
    if (value == "tagged") return SchemaKind::tagged_sections;
    if (value == "ranked-id-list") return SchemaKind::ranked_id_list;
    fail(ErrorCode::config, "unknown schema '" + std::string(value) + "' in " + std::string(origin));
}

std::vector<PromptTemplate> parse_embedded() {
    std::vector<PromptTemplate> catalog;
    for (std::size_t i = 0; i < detail::kPromptFileCount; ++i) {
        PromptTemplate tmpl =
            parse_template_text(detail::kPromptFiles[i].text, detail::kPromptFiles[i].name);
        validate_template(tmpl);
        catalog.push_back(std::move(tmpl));
    }
    std::sort(catalog.begin(), catalog.end(),
              [](const PromptTemplate& a, const PromptTemplate& b) { return a.id < b.id; });
    return catalog;
}

}  // namespace

PromptTemplate parse_template_text(std::string_view file_text, std::string_view origin) {
    std::istringstream lines{std::string(file_text)};
    PromptTemplate tmpl;
    std::string line;
    bool saw_separator = false;
    std::size_t consumed = 0;
    while (std::getline(lines, line)) {
        consumed += line.size() + 1;
        if (trim(line) == "---") {
            saw_separator = true;
            break;
        }
        const auto colon = line.find(':');
        if (colon == std::string::npos) {
            fail(ErrorCode::config,
                 "malformed front-matter line '" + line + "' in " + std::string(origin));
        }
        const std::string key = trim(line.substr(0, colon));
        const std::string value = trim(line.substr(colon + 1));
        if (key == "id") {
            tmpl.id = value;
        } else if (key == "schema") {
            tmpl.schema.kind = parse_schema_kind(value, origin);
        } else if (key == "tags") {
            for (const auto& tag : split(value, ',')) {
                tmpl.schema.tags.push_back(trim(tag));
            }
        } else if (key == "description") {
            tmpl.description = value;
        } else {
            fail(ErrorCode::config,
                 "unknown front-matter key '" + key + "' in " + std::string(origin));
        }
    }
    if (!saw_separator) {
        fail(ErrorCode::config, "missing '---' separator in " + std::string(origin));
    }
    tmpl.body = std::string(file_text.substr(std::min(consumed, file_text.size())));
    return tmpl;
}

void validate_template(const PromptTemplate& tmpl) {
    if (tmpl.id.empty() ||
        tmpl.id.find_first_not_of(
            "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-_") !=
            std::string::npos) {
        fail(ErrorCode::config, "invalid template id: '" + tmpl.id + "'");
    }
    if (tmpl.schema.kind != SchemaKind::tagged_sections && !tmpl.schema.tags.empty()) {
        fail(ErrorCode::config, "template " + tmpl.id + ": tags declared for untagged schema");
    }

    const auto required = required_placeholders(tmpl.schema);
    const std::vector<std::string_view> known = {kSourcePlaceholder, kTargetPlaceholder,
                                                 kArtifactListPlaceholder};
    for (const auto& placeholder : known) {
        const std::size_t n = count_occurrences(tmpl.body, placeholder);
        const bool needed =
            std::find(required.begin(), required.end(), placeholder) != required.end();
        if (needed && n != 1) {
            fail(ErrorCode::config, "template " + tmpl.id + ": placeholder " +
                                        std::string(placeholder) + " must appear exactly once");
        }
        if (!needed && n != 0) {
            fail(ErrorCode::config, "template " + tmpl.id + ": unexpected placeholder " +
                                        std::string(placeholder));
        }
    }

    if (tmpl.schema.kind == SchemaKind::tagged_sections) {
        std::set<std::string> declared(tmpl.schema.tags.begin(), tmpl.schema.tags.end());
        if (declared.size() != tmpl.schema.tags.size()) {
            fail(ErrorCode::config, "template " + tmpl.id + ": duplicate tags declared");
        }
        const auto instructed = instruction_tags(tmpl.body);
        if (instructed != declared) {
            fail(ErrorCode::config,
                 "template " + tmpl.id + ": instructed tags do not match the declared tag list");
        }
    }
}

const std::vector<PromptTemplate>& builtin_catalog() {
    static const std::vector<PromptTemplate> catalog = parse_embedded();
    return catalog;
}

std::string builtin_template_text(std::string_view id) {
    const std::string name = std::string(id) + ".prompt";
    for (std::size_t i = 0; i < detail::kPromptFileCount; ++i) {
        if (name == detail::kPromptFiles[i].name) {
            return detail::kPromptFiles[i].text;
        }
    }
    return {};
}

std::vector<PromptTemplate> load_templates(const fs::path& dir) {
    if (!fs::is_directory(dir)) {
        fail(ErrorCode::io, "prompt directory missing: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".prompt") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    std::vector<PromptTemplate> catalog;
    for (const auto& file : files) {
        std::ifstream in(file, std::ios::binary);
        std::ostringstream buffer;
        buffer << in.rdbuf();
        PromptTemplate tmpl = parse_template_text(buffer.str(), file.string());
        validate_template(tmpl);
        catalog.push_back(std::move(tmpl));
    }
    std::sort(catalog.begin(), catalog.end(),
              [](const PromptTemplate& a, const PromptTemplate& b) { return a.id < b.id; });
    return catalog;
}

const PromptTemplate* find_template(const std::vector<PromptTemplate>& catalog,
                                    std::string_view id) {
    for (const auto& tmpl : catalog) {
        if (tmpl.id == id) return &tmpl;
    }
    return nullptr;
}

std::string render_pair(const PromptTemplate& tmpl, const Artifact& source,
                        const Artifact& target) {
    const bool pairwise = tmpl.schema.kind == SchemaKind::yes_no ||
                          (tmpl.schema.kind == SchemaKind::tagged_sections &&
                           !tmpl.schema.tags.empty());
    if (!pairwise) {
        fail(ErrorCode::config,
             "schema mismatch: template '" + tmpl.id + "' does not render artifact pairs");
    }
    return substitute(tmpl.body, {{kSourcePlaceholder, source.body},
                                  {kTargetPlaceholder, target.body}});
}

std::string render_ranking(const PromptTemplate& tmpl, const Artifact& source,
                           const std::vector<Artifact>& ordered_candidates) {
    if (tmpl.schema.kind != SchemaKind::ranked_id_list) {
        fail(ErrorCode::config,
             "schema mismatch: template '" + tmpl.id + "' does not render ranked lists");
    }
    if (ordered_candidates.empty()) {
        fail(ErrorCode::validation, "empty candidates: nothing to rank");
    }
    std::string blocks;
    for (std::size_t i = 0; i < ordered_candidates.size(); ++i) {
        if (i > 0) blocks += "\n\n";
        const Artifact& candidate = ordered_candidates[i];
        blocks += "<artifact>\n<id>" + candidate.id + "</id>\n<body>" + candidate.body +
                  "</body>\n</artifact>";
    }
    return substitute(tmpl.body, {{kSourcePlaceholder, source.body},
                                  {kArtifactListPlaceholder, blocks}});
}

std::string render_summary(const PromptTemplate& tmpl, const Artifact& code) {
    if (tmpl.schema.kind != SchemaKind::tagged_sections || !tmpl.schema.tags.empty()) {
        fail(ErrorCode::config,
             "schema mismatch: template '" + tmpl.id + "' is not a summary template");
    }
    return substitute(tmpl.body, {{kSourcePlaceholder, code.body}});
}

}  // namespace tracebench
