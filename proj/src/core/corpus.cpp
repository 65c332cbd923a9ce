#include "core/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "core/errors.hpp"
#include "core/strings.hpp"

namespace fs = std::filesystem;

namespace tracebench {

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(ErrorCode::io, "cannot read file: " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_file(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorCode::io, "cannot write file: " + path.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
        fail(ErrorCode::io, "write failed: " + path.string());
    }
}

std::vector<Artifact> load_layer(const fs::path& dir, Layer layer, const std::string& kind) {
    if (!fs::is_directory(dir)) {
        fail(ErrorCode::validation, "artifact directory missing: " + dir.string());
    }
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".txt") {
            files.push_back(entry.path());
        }
    }
    std::sort(files.begin(), files.end());

    std::vector<Artifact> artifacts;
    artifacts.reserve(files.size());
    for (const auto& file : files) {
        Artifact artifact{file.stem().string(), layer, kind, read_file(file)};
        validate_artifact(artifact);
        artifacts.push_back(std::move(artifact));
    }
    return artifacts;
}

const Artifact* find_by_id(const std::vector<Artifact>& artifacts, std::string_view id) {
    auto it = std::lower_bound(artifacts.begin(), artifacts.end(), id,
                               [](const Artifact& a, std::string_view value) { return a.id < value; });
    if (it != artifacts.end() && it->id == id) {
        return &*it;
    }
    return nullptr;
}

}  // namespace

void validate_artifact(const Artifact& artifact) {
    if (artifact.id.empty()) {
        fail(ErrorCode::validation, "invalid artifact id: empty");
    }
    if (artifact.id.find_first_of(",<>") != std::string::npos) {
        fail(ErrorCode::validation,
             "invalid artifact id: '" + artifact.id + "' contains a comma or angle bracket");
    }
    if (trim(artifact.body).empty()) {
        fail(ErrorCode::validation, "empty body: " + artifact.id);
    }
}

const Artifact* TraceDataset::find_parent(std::string_view id) const {
    return find_by_id(parents, id);
}

const Artifact* TraceDataset::find_child(std::string_view id) const {
    return find_by_id(children, id);
}

std::map<std::string, std::size_t> TraceDataset::parent_link_counts() const {
    std::map<std::string, std::size_t> counts;
    for (const auto& parent : parents) {
        counts[parent.id] = 0;
    }
    for (const auto& [parent_id, child_id] : true_links) {
        ++counts.at(parent_id);
    }
    return counts;
}

void validate_dataset(const TraceDataset& dataset) {
    auto check_layer = [](const std::vector<Artifact>& artifacts, Layer layer) {
        for (std::size_t i = 0; i < artifacts.size(); ++i) {
            validate_artifact(artifacts[i]);
            if (artifacts[i].layer != layer) {
                fail(ErrorCode::validation, "artifact in wrong layer: " + artifacts[i].id);
            }
            if (i > 0 && artifacts[i - 1].id == artifacts[i].id) {
                fail(ErrorCode::validation, "duplicate artifact id: " + artifacts[i].id);
            }
            if (i > 0 && artifacts[i - 1].id > artifacts[i].id) {
                fail(ErrorCode::validation, "artifacts not sorted by id at: " + artifacts[i].id);
            }
        }
    };
    check_layer(dataset.parents, Layer::parent);
    check_layer(dataset.children, Layer::child);

    for (const auto& [parent_id, child_id] : dataset.true_links) {
        if (dataset.find_parent(parent_id) == nullptr || dataset.find_child(child_id) == nullptr) {
            fail(ErrorCode::validation,
                 "dangling link reference: " + parent_id + " -> " + child_id);
        }
    }
}

TraceDataset load_dataset(const fs::path& root) {
    const fs::path descriptor_path = root / "dataset.json";
    if (!fs::is_regular_file(descriptor_path)) {
        fail(ErrorCode::validation, "missing descriptor: " + descriptor_path.string());
    }

    nlohmann::json descriptor;
    try {
        descriptor = nlohmann::json::parse(read_file(descriptor_path));
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::validation, "malformed descriptor " + descriptor_path.string() + ": " + e.what());
    }

    auto required = [&](const char* field) -> std::string {
        if (!descriptor.contains(field) || !descriptor[field].is_string()) {
            fail(ErrorCode::validation,
                 "descriptor missing string field '" + std::string(field) + "': " + descriptor_path.string());
        }
        return descriptor[field].get<std::string>();
    };

    TraceDataset dataset;
    dataset.name = required("name");
    dataset.parent_kind = descriptor.value("parent_kind", std::string{});
    dataset.child_kind = descriptor.value("child_kind", std::string{});
    dataset.children_are_code = descriptor.value("children_are_code", false);
    dataset.parents = load_layer(root / required("parents_dir"), Layer::parent, dataset.parent_kind);
    dataset.children = load_layer(root / required("children_dir"), Layer::child, dataset.child_kind);

    const fs::path links_path = root / required("links_file");
    if (!fs::is_regular_file(links_path)) {
        fail(ErrorCode::validation, "links file missing: " + links_path.string());
    }
    std::istringstream lines(read_file(links_path));
    std::string line;
    bool saw_header = false;
    while (std::getline(lines, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (trim(line).empty()) {
            continue;
        }
        if (!saw_header) {
            saw_header = true;
            if (trim(line) != "parent_id,child_id") {
                fail(ErrorCode::validation,
                     "links file must start with header 'parent_id,child_id': " + links_path.string());
            }
            continue;
        }
        auto cols = split(line, ',');
        if (cols.size() != 2) {
            fail(ErrorCode::validation, "malformed links row: '" + line + "'");
        }
        std::pair<std::string, std::string> link{trim(cols[0]), trim(cols[1])};
        if (!dataset.true_links.insert(link).second) {
            fail(ErrorCode::validation,
                 "duplicate link: " + link.first + " -> " + link.second);
        }
    }

    validate_dataset(dataset);
    return dataset;
}

void save_dataset(const TraceDataset& dataset, const fs::path& root) {
    validate_dataset(dataset);
    fs::create_directories(root / "parents");
    fs::create_directories(root / "children");

    nlohmann::json descriptor;
    descriptor["name"] = dataset.name;
    descriptor["parents_dir"] = "parents";
    descriptor["children_dir"] = "children";
    descriptor["links_file"] = "links.csv";
    descriptor["parent_kind"] = dataset.parent_kind;
    descriptor["child_kind"] = dataset.child_kind;
    descriptor["children_are_code"] = dataset.children_are_code;
    write_file(root / "dataset.json", descriptor.dump(2) + "\n");

    for (const auto& artifact : dataset.parents) {
        write_file(root / "parents" / (artifact.id + ".txt"), artifact.body);
    }
    for (const auto& artifact : dataset.children) {
        write_file(root / "children" / (artifact.id + ".txt"), artifact.body);
    }

    std::string links = "parent_id,child_id\n";
    for (const auto& [parent_id, child_id] : dataset.true_links) {
        links += parent_id + "," + child_id + "\n";
    }
    write_file(root / "links.csv", links);
}

std::vector<TraceQuery> build_queries(const TraceDataset& dataset,
                                      const std::vector<std::string>& parent_ids) {
    std::vector<TraceQuery> queries;
    queries.reserve(parent_ids.size());
    for (const auto& parent_id : parent_ids) {
        const Artifact* parent = dataset.find_parent(parent_id);
        if (parent == nullptr) {
            fail(ErrorCode::validation, "unknown parent: " + parent_id);
        }
        TraceQuery query;
        query.parent = *parent;
        query.candidates = dataset.children;  // already in canonical ascending order
        for (const auto& child : dataset.children) {
            if (dataset.true_links.count({parent_id, child.id}) != 0) {
                query.relevant_ids.insert(child.id);
            }
        }
        queries.push_back(std::move(query));
    }
    return queries;
}

}  // namespace tracebench
