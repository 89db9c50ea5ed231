#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "byzlink/graph.hpp"

namespace byzlink {

/// A graph together with its optional node labels (empty when absent).
struct LabeledGraph {
    DiGraph graph;
    std::vector<std::string> labels;
};

/// Parse {"n": int, "edges": [[j,i],...], "labels": [...]?}. Edge [j,i] is a
/// channel from j to i.
LabeledGraph graph_from_json(const nlohmann::json& j);

/// Canonical form: sorted keys, sorted edge list; round-trips byte-identically.
nlohmann::json graph_to_json(const DiGraph& g, const std::vector<std::string>& labels = {});

LabeledGraph load_graph(const std::filesystem::path& path);
void save_graph(const std::filesystem::path& path, const DiGraph& g,
                const std::vector<std::string>& labels = {});

/// Graphviz emission; labels fall back to node ids.
std::string to_dot(const DiGraph& g, const std::vector<std::string>& labels = {});

}  // namespace byzlink
