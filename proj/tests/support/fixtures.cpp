#include "support/fixtures.hpp"

namespace tbtest {

using tracebench::Artifact;
using tracebench::Layer;
using tracebench::TraceDataset;

Artifact make_parent(const std::string& id, const std::string& body) {
    return {id, Layer::parent, "requirement", body};
}

Artifact make_child(const std::string& id, const std::string& body) {
    return {id, Layer::child, "design", body};
}

TraceDataset make_shaped_dataset(const std::string& name, std::size_t n_children,
                                 const std::vector<std::size_t>& parent_link_counts) {
    TraceDataset dataset;
    dataset.name = name;
    dataset.parent_kind = "requirement";
    dataset.child_kind = "design";

    char buffer[32];
    for (std::size_t p = 0; p < parent_link_counts.size(); ++p) {
        std::snprintf(buffer, sizeof(buffer), "P%03zu", p + 1);
        dataset.parents.push_back(make_parent(
            buffer, "parent requirement " + std::to_string(p + 1) + " drives subsystem behavior"));
    }
    std::vector<std::string> child_ids;
    for (std::size_t c = 0; c < n_children; ++c) {
        std::snprintf(buffer, sizeof(buffer), "C%04zu", c + 1);
        child_ids.push_back(buffer);
        dataset.children.push_back(make_child(
            buffer, "child design element " + std::to_string(c + 1) + " realizes a behavior"));
    }
    for (std::size_t p = 0; p < parent_link_counts.size(); ++p) {
        for (std::size_t j = 0; j < parent_link_counts[p]; ++j) {
            dataset.true_links.insert(
                {dataset.parents[p].id, child_ids[(p * 7 + j) % n_children]});
        }
    }
    return dataset;
}

}  // namespace tbtest
