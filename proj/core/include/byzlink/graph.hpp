#pragma once

#include <compare>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace byzlink {

using NodeId = std::int32_t;

/// Directed communication channel from node `from` to node `to`.
struct Edge {
    NodeId from = 0;
    NodeId to = 0;

    friend auto operator<=>(const Edge&, const Edge&) = default;
};

/// Immutable simple directed graph on nodes 0..n-1.
///
/// Invariants enforced at construction: n >= 2, no self-loops, each ordered
/// pair appears at most once. Node ids are dense so they can double as matrix
/// indices; external names map through a label table at the I/O layer.
class DiGraph {
public:
    DiGraph(NodeId n, std::vector<Edge> edges);

    NodeId node_count() const { return n_; }
    /// All edges, sorted by (from, to).
    const std::vector<Edge>& edges() const { return edges_; }

    /// Nodes j with an edge (j, i), sorted ascending.
    std::span<const NodeId> in_neighbors(NodeId i) const;
    /// Nodes j with an edge (i, j), sorted ascending.
    std::span<const NodeId> out_neighbors(NodeId i) const;
    /// Incoming links of i, sorted.
    std::vector<Edge> in_links(NodeId i) const;

    NodeId in_degree(NodeId i) const;
    NodeId max_in_degree() const;
    NodeId min_in_degree() const;
    bool has_edge(NodeId from, NodeId to) const;

private:
    NodeId n_;
    std::vector<Edge> edges_;
    std::vector<std::vector<NodeId>> in_;
    std::vector<std::vector<NodeId>> out_;
};

/// Partition into strongly connected components plus the (acyclic)
/// condensation. Components are listed sorted by their smallest member id and
/// each component's node list is sorted; this keeps traces and goldens
/// reproducible.
struct Decomposition {
    std::vector<std::vector<NodeId>> components;
    std::vector<int> component_of;                 // node id -> component index
    std::vector<std::pair<int, int>> dag_edges;    // condensation edges, sorted
    std::vector<int> source_indices;               // condensation in-degree 0
};

/// Decompose an arbitrary adjacency structure (out-neighbor lists).
Decomposition decompose_adjacency(NodeId n,
                                  const std::vector<std::vector<NodeId>>& out);

Decomposition decompose(const DiGraph& g);

/// The components whose condensation vertex has in-degree zero.
std::vector<std::vector<NodeId>> source_components(const Decomposition& d);

/// True iff every node is reachable from s via directed edges.
bool reaches_all(const DiGraph& g, NodeId s);

}  // namespace byzlink
