#pragma once

#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tracebench {

enum class Layer { parent, child };

// One software artifact: a requirement, design definition, or code summary.
// Bodies are stored verbatim so rendered prompts reproduce the input exactly.
struct Artifact {
    std::string id;
    Layer layer{Layer::parent};
    std::string kind;
    std::string body;

    bool operator==(const Artifact&) const = default;
};

// Checks the per-artifact invariants: non-empty id without commas or angle
// brackets (ids must survive comma-delimited rankings and tag-delimited
// prompts), and a body that is non-empty after trimming.
void validate_artifact(const Artifact& artifact);

using LinkSet = std::set<std::pair<std::string, std::string>>;

// A two-layer traceability dataset. Immutable after load; safe to share
// across worker threads without synchronization.
struct TraceDataset {
    std::string name;
    std::vector<Artifact> parents;   // sorted ascending by id
    std::vector<Artifact> children;  // sorted ascending by id
    LinkSet true_links;              // (parent_id, child_id)
    std::string parent_kind;
    std::string child_kind;
    bool children_are_code{false};

    bool operator==(const TraceDataset&) const = default;

    const Artifact* find_parent(std::string_view id) const;
    const Artifact* find_child(std::string_view id) const;

    // True-link count per parent id; parents with no links map to 0.
    std::map<std::string, std::size_t> parent_link_counts() const;
};

// Validates ids, bodies, per-layer uniqueness, sortedness, and that every
// link references existing artifacts.
void validate_dataset(const TraceDataset& dataset);

// One parent plus its full candidate list, in canonical (ascending id) order.
struct TraceQuery {
    Artifact parent;
    std::vector<Artifact> candidates;
    std::set<std::string> relevant_ids;
};

// Loads a dataset directory: dataset.json descriptor, one <id>.txt per
// artifact, and a parent_id,child_id links file with a header row.
TraceDataset load_dataset(const std::filesystem::path& root);

// Writes the dataset back out in the same layout (parents/, children/,
// links.csv); load_dataset(save_dataset(d)) == d.
void save_dataset(const TraceDataset& dataset, const std::filesystem::path& root);

// One query per requested parent, candidates in canonical order.
std::vector<TraceQuery> build_queries(const TraceDataset& dataset,
                                      const std::vector<std::string>& parent_ids);

}  // namespace tracebench
