#include "byzlink/graph_io.hpp"

#include <fstream>
#include <sstream>

#include "byzlink/common.hpp"

namespace byzlink {

LabeledGraph graph_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("n") || !j.contains("edges"))
        throw Error("graph JSON must be an object with \"n\" and \"edges\"");
    NodeId n = j.at("n").get<NodeId>();
    std::vector<Edge> edges;
    for (const auto& e : j.at("edges")) {
        if (!e.is_array() || e.size() != 2) throw Error("edge must be a [from,to] pair");
        edges.push_back({e.at(0).get<NodeId>(), e.at(1).get<NodeId>()});
    }
    std::vector<std::string> labels;
    if (j.contains("labels") && !j.at("labels").is_null()) {
        labels = j.at("labels").get<std::vector<std::string>>();
        if (static_cast<NodeId>(labels.size()) != n)
            throw Error("labels length must equal n");
    }
    return {DiGraph(n, std::move(edges)), std::move(labels)};
}

nlohmann::json graph_to_json(const DiGraph& g, const std::vector<std::string>& labels) {
    nlohmann::json j;
    j["n"] = g.node_count();
    auto edges = nlohmann::json::array();
    for (const Edge& e : g.edges()) edges.push_back({e.from, e.to});
    j["edges"] = std::move(edges);
    if (!labels.empty()) j["labels"] = labels;
    return j;
}

LabeledGraph load_graph(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open graph file: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw Error("malformed graph JSON in " + path.string() + ": " + e.what());
    }
    return graph_from_json(j);
}

void save_graph(const std::filesystem::path& path, const DiGraph& g,
                const std::vector<std::string>& labels) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write graph file: " + path.string());
    out << graph_to_json(g, labels).dump(2) << "\n";
}

std::string to_dot(const DiGraph& g, const std::vector<std::string>& labels) {
    std::ostringstream os;
    os << "digraph G {\n";
    for (NodeId i = 0; i < g.node_count(); ++i) {
        os << "  n" << i;
        if (!labels.empty()) os << " [label=\"" << labels[static_cast<std::size_t>(i)] << "\"]";
        os << ";\n";
    }
    for (const Edge& e : g.edges()) os << "  n" << e.from << " -> n" << e.to << ";\n";
    os << "}\n";
    return os.str();
}

}  // namespace byzlink
