#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "byzlink/bigint.hpp"
#include "byzlink/graph.hpp"

namespace byzlink {

/// One link-reduced variant of a base graph: the fault set F is removed, then
/// at each node up to f additional surviving incoming links. Reduced graphs
/// are identified by their removal choices, not by the resulting edge set, so
/// two distinct choices may coincide as edge sets; no dedupe is applied.
class ReducedGraph {
public:
    ReducedGraph(const DiGraph& base, std::vector<Edge> fault_set,
                 std::vector<std::vector<NodeId>> removed_per_node, int f);

    const DiGraph& base() const { return *base_; }
    int fault_budget() const { return f_; }
    const std::vector<Edge>& fault_set() const { return fault_set_; }
    /// Per node i, the extra removed in-neighbors (N_i^r), sorted.
    const std::vector<std::vector<NodeId>>& removed_per_node() const { return removed_; }
    /// Per node i, the surviving in-neighbors, sorted.
    const std::vector<std::vector<NodeId>>& in_neighbors() const { return in_; }
    NodeId node_count() const { return base_->node_count(); }

    std::vector<Edge> surviving_edges() const;
    std::vector<std::vector<NodeId>> out_adjacency() const;
    Decomposition decompose() const;

private:
    const DiGraph* base_;
    int f_;
    std::vector<Edge> fault_set_;
    std::vector<std::vector<NodeId>> removed_;
    std::vector<std::vector<NodeId>> in_;
};

/// Lazily yields every reduced graph for a fixed fault set, exactly once, in
/// lexicographic order: per node, removal subsets ordered by size then by id
/// tuple; the per-node choices advance odometer-style with the last node
/// fastest. Single-consumer.
class ReducedGraphEnumerator {
public:
    ReducedGraphEnumerator(const DiGraph& g, std::vector<Edge> fault_set, int f);

    std::optional<ReducedGraph> next();
    /// Number of reduced graphs for this fault set (product formula).
    const BigInt& total() const { return total_; }

private:
    const DiGraph* g_;
    int f_;
    std::vector<Edge> fault_set_;
    std::vector<std::vector<NodeId>> surviving_in_;       // per node, sorted
    std::vector<std::vector<std::vector<NodeId>>> options_;  // per node, ordered subsets
    std::vector<std::size_t> cursor_;
    bool done_ = false;
    BigInt total_;
};

/// All fault sets F with |F| <= f, ordered by size then lexicographically over
/// the sorted edge list.
std::vector<std::vector<Edge>> enumerate_fault_sets(const DiGraph& g, int f,
                                                    std::uint64_t cap = 10'000'000);

/// Number of reduced graphs for one fault set, without materializing any.
BigInt count_reductions_for(const DiGraph& g, std::span<const Edge> fault_set, int f);

/// r: the total number of link-reduced graphs over all admissible fault sets.
/// Computed combinatorially; exact.
BigInt count_reduced_graphs(const DiGraph& g, int f);

/// 0/1 matrix with H[i][j] = 1 iff j == i or (j,i) survives the reduction.
/// Rows are bitmasks, which caps n at 64; plenty for desk-scale graphs.
class ConnectivityMatrix {
public:
    ConnectivityMatrix(NodeId n, std::vector<std::uint64_t> rows);

    NodeId size() const { return n_; }
    bool at(NodeId i, NodeId j) const;
    const std::vector<std::uint64_t>& rows() const { return rows_; }

    /// Boolean matrix product.
    ConnectivityMatrix operator*(const ConnectivityMatrix& rhs) const;
    ConnectivityMatrix pow(int k) const;
    /// True iff some column is all ones.
    bool has_all_positive_column() const;

private:
    NodeId n_;
    std::vector<std::uint64_t> rows_;
};

ConnectivityMatrix connectivity_matrix(const ReducedGraph& rg);

}  // namespace byzlink
