#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "core/corpus.hpp"

namespace tracebench {

enum class SchemaKind {
    yes_no,          // single yes/no token answer
    tagged_sections, // angle-bracket tagged sections; zero tags means free-text summary
    ranked_id_list,  // comma-delimited artifact ids
};

struct ResponseSchema {
    SchemaKind kind{SchemaKind::yes_no};
    std::vector<std::string> tags;  // tagged_sections only

    bool operator==(const ResponseSchema&) const = default;
};

// A named, versioned prompt. The body carries the full layout including the
// {source_body} / {target_body} / {artifact_list} placeholders, so rendering
// is pure substitution and prompts stay diffable data files.
struct PromptTemplate {
    std::string id;
    std::string description;
    ResponseSchema schema;
    std::string body;

    bool operator==(const PromptTemplate&) const = default;
};

// Parses the template file format: front-matter lines (id, schema, tags,
// description), a '---' separator, then the verbatim body.
PromptTemplate parse_template_text(std::string_view file_text, std::string_view origin);

// Checks placeholder and tag-instruction invariants for one template.
void validate_template(const PromptTemplate& tmpl);

// The templates compiled in from data/prompts/, sorted by id.
const std::vector<PromptTemplate>& builtin_catalog();

// Raw file text of a built-in template (for `prompts show`); empty if absent.
std::string builtin_template_text(std::string_view id);

// Loads *.prompt files from a directory; same format as the built-ins.
std::vector<PromptTemplate> load_templates(const std::filesystem::path& dir);

const PromptTemplate* find_template(const std::vector<PromptTemplate>& catalog,
                                    std::string_view id);

// Renders a pairwise classification prompt (yes-no or tagged schema).
std::string render_pair(const PromptTemplate& tmpl, const Artifact& source,
                        const Artifact& target);

// Renders the list-ranking prompt with candidate blocks in the given order.
std::string render_ranking(const PromptTemplate& tmpl, const Artifact& source,
                           const std::vector<Artifact>& ordered_candidates);

// Renders the code-summary prompt (tagged schema with zero tags).
std::string render_summary(const PromptTemplate& tmpl, const Artifact& code);

}  // namespace tracebench
