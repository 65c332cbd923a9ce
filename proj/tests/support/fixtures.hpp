#pragma once

#include <cstdio>
#include <string>
#include <vector>

#include "core/corpus.hpp"

namespace tbtest {

tracebench::Artifact make_parent(const std::string& id, const std::string& body);
tracebench::Artifact make_child(const std::string& id, const std::string& body);

// Synthetic dataset with the given per-parent true-link counts over
// n_children children. Link targets are spread deterministically so distinct
// parents share some children.
tracebench::TraceDataset make_shaped_dataset(const std::string& name, std::size_t n_children,
                                             const std::vector<std::size_t>& parent_link_counts);

inline std::string fixture_dir() { return TRACEBENCH_FIXTURE_DIR; }

}  // namespace tbtest
