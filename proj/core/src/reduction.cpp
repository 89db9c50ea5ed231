#include "byzlink/reduction.hpp"

#include <algorithm>
#include <functional>

#include "byzlink/common.hpp"

namespace byzlink {

namespace {

std::vector<std::vector<NodeId>> surviving_in_neighbors(const DiGraph& g,
                                                        std::span<const Edge> fault_set) {
    std::vector<std::vector<NodeId>> in(static_cast<std::size_t>(g.node_count()));
    for (NodeId i = 0; i < g.node_count(); ++i) {
        auto nbrs = g.in_neighbors(i);
        auto& row = in[static_cast<std::size_t>(i)];
        for (NodeId j : nbrs) {
            bool removed = std::find(fault_set.begin(), fault_set.end(), Edge{j, i}) !=
                           fault_set.end();
            if (!removed) row.push_back(j);
        }
    }
    return in;
}

void validate_fault_set(const DiGraph& g, std::span<const Edge> fault_set, int f) {
    if (f < 0) throw Error("fault budget f must be non-negative");
    if (static_cast<int>(fault_set.size()) > f)
        throw Error("fault set larger than budget f");
    for (const Edge& e : fault_set)
        if (!g.has_edge(e.from, e.to)) throw Error("fault set contains a non-edge");
    for (std::size_t i = 1; i < fault_set.size(); ++i)
        if (!(fault_set[i - 1] < fault_set[i]))
            throw Error("fault set must be sorted and duplicate-free");
}

/// Subsets of `items` with size 0..f, ordered by size then lexicographically.
std::vector<std::vector<NodeId>> removal_options(const std::vector<NodeId>& items, int f) {
    std::vector<std::vector<NodeId>> options;
    options.push_back({});
    const int m = static_cast<int>(items.size());
    for (int k = 1; k <= std::min(f, m); ++k) {
        std::vector<int> idx(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
        while (true) {
            std::vector<NodeId> subset;
            subset.reserve(static_cast<std::size_t>(k));
            for (int i : idx) subset.push_back(items[static_cast<std::size_t>(i)]);
            options.push_back(std::move(subset));
            int pos = k - 1;
            while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - k + pos) --pos;
            if (pos < 0) break;
            ++idx[static_cast<std::size_t>(pos)];
            for (int i = pos + 1; i < k; ++i)
                idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
        }
    }
    return options;
}

BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    BigInt r = 1;
    for (int i = 0; i < k; ++i) {
        r *= n - i;
        r /= i + 1;
    }
    return r;
}

/// Streams every fault set F with |F| <= f in size-then-lexicographic order.
/// Returns false if the callback aborted.
bool for_each_fault_set(const DiGraph& g, int f,
                        const std::function<bool(const std::vector<Edge>&)>& fn) {
    const auto& edges = g.edges();
    const int m = static_cast<int>(edges.size());
    std::vector<Edge> fs;
    if (!fn(fs)) return false;
    for (int k = 1; k <= std::min(f, m); ++k) {
        std::vector<int> idx(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i) idx[static_cast<std::size_t>(i)] = i;
        while (true) {
            fs.clear();
            for (int i : idx) fs.push_back(edges[static_cast<std::size_t>(i)]);
            if (!fn(fs)) return false;
            int pos = k - 1;
            while (pos >= 0 && idx[static_cast<std::size_t>(pos)] == m - k + pos) --pos;
            if (pos < 0) break;
            ++idx[static_cast<std::size_t>(pos)];
            for (int i = pos + 1; i < k; ++i)
                idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
        }
    }
    return true;
}

}  // namespace

ReducedGraph::ReducedGraph(const DiGraph& base, std::vector<Edge> fault_set,
                           std::vector<std::vector<NodeId>> removed_per_node, int f)
    : base_(&base), f_(f), fault_set_(std::move(fault_set)), removed_(std::move(removed_per_node)) {
    std::sort(fault_set_.begin(), fault_set_.end());
    validate_fault_set(base, fault_set_, f);
    if (removed_.size() != static_cast<std::size_t>(base.node_count()))
        throw Error("removed_per_node must have one entry per node");

    in_ = surviving_in_neighbors(base, fault_set_);
    for (NodeId i = 0; i < base.node_count(); ++i) {
        auto& removed = removed_[static_cast<std::size_t>(i)];
        std::sort(removed.begin(), removed.end());
        if (static_cast<int>(removed.size()) > f)
            throw Error("per-node removal set larger than budget f");
        auto& row = in_[static_cast<std::size_t>(i)];
        for (NodeId j : removed) {
            auto it = std::find(row.begin(), row.end(), j);
            if (it == row.end())
                throw Error("per-node removal must target a surviving incoming link");
            row.erase(it);
        }
    }
}

std::vector<Edge> ReducedGraph::surviving_edges() const {
    std::vector<Edge> out;
    for (NodeId i = 0; i < node_count(); ++i)
        for (NodeId j : in_[static_cast<std::size_t>(i)]) out.push_back({j, i});
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::vector<NodeId>> ReducedGraph::out_adjacency() const {
    std::vector<std::vector<NodeId>> out(static_cast<std::size_t>(node_count()));
    for (NodeId i = 0; i < node_count(); ++i)
        for (NodeId j : in_[static_cast<std::size_t>(i)]) out[static_cast<std::size_t>(j)].push_back(i);
    for (auto& row : out) std::sort(row.begin(), row.end());
    return out;
}

Decomposition ReducedGraph::decompose() const {
    return decompose_adjacency(node_count(), out_adjacency());
}

ReducedGraphEnumerator::ReducedGraphEnumerator(const DiGraph& g, std::vector<Edge> fault_set,
                                               int f)
    : g_(&g), f_(f), fault_set_(std::move(fault_set)) {
    std::sort(fault_set_.begin(), fault_set_.end());
    validate_fault_set(g, fault_set_, f);
    surviving_in_ = surviving_in_neighbors(g, fault_set_);
    options_.reserve(static_cast<std::size_t>(g.node_count()));
    total_ = 1;
    for (NodeId i = 0; i < g.node_count(); ++i) {
        options_.push_back(removal_options(surviving_in_[static_cast<std::size_t>(i)], f_));
        total_ *= static_cast<unsigned>(options_.back().size());
    }
    cursor_.assign(static_cast<std::size_t>(g.node_count()), 0);
}

std::optional<ReducedGraph> ReducedGraphEnumerator::next() {
    if (done_) return std::nullopt;
    std::vector<std::vector<NodeId>> removed;
    removed.reserve(cursor_.size());
    for (std::size_t i = 0; i < cursor_.size(); ++i) removed.push_back(options_[i][cursor_[i]]);
    ReducedGraph rg(*g_, fault_set_, std::move(removed), f_);

    // Odometer advance, last node fastest.
    std::size_t pos = cursor_.size();
    while (pos > 0) {
        --pos;
        if (++cursor_[pos] < options_[pos].size()) break;
        cursor_[pos] = 0;
        if (pos == 0) done_ = true;
    }
    return rg;
}

std::vector<std::vector<Edge>> enumerate_fault_sets(const DiGraph& g, int f, std::uint64_t cap) {
    const int m = static_cast<int>(g.edges().size());
    BigInt count = 0;
    for (int k = 0; k <= std::min(f, m); ++k) count += binomial(m, k);
    if (count > cap)
        throw Error("fault-set space too large (" + count.str() + " sets); reduce f");
    std::vector<std::vector<Edge>> out;
    out.reserve(static_cast<std::size_t>(count));
    for_each_fault_set(g, f, [&](const std::vector<Edge>& fs) {
        out.push_back(fs);
        return true;
    });
    return out;
}

BigInt count_reductions_for(const DiGraph& g, std::span<const Edge> fault_set, int f) {
    validate_fault_set(g, fault_set, f);
    auto in = surviving_in_neighbors(g, fault_set);
    BigInt total = 1;
    for (const auto& row : in) {
        const int d = static_cast<int>(row.size());
        BigInt per_node = 0;
        for (int k = 0; k <= std::min(f, d); ++k) per_node += binomial(d, k);
        total *= per_node;
    }
    return total;
}

BigInt count_reduced_graphs(const DiGraph& g, int f) {
    if (f < 0) throw Error("fault budget f must be non-negative");
    BigInt r = 0;
    for_each_fault_set(g, f, [&](const std::vector<Edge>& fs) {
        r += count_reductions_for(g, fs, f);
        return true;
    });
    return r;
}

ConnectivityMatrix::ConnectivityMatrix(NodeId n, std::vector<std::uint64_t> rows)
    : n_(n), rows_(std::move(rows)) {
    if (n < 1 || n > 64) throw Error("connectivity matrix supports 1..64 nodes");
    if (rows_.size() != static_cast<std::size_t>(n)) throw Error("row count mismatch");
}

bool ConnectivityMatrix::at(NodeId i, NodeId j) const {
    return (rows_.at(static_cast<std::size_t>(i)) >> j) & 1u;
}

ConnectivityMatrix ConnectivityMatrix::operator*(const ConnectivityMatrix& rhs) const {
    if (n_ != rhs.n_) throw Error("dimension mismatch");
    std::vector<std::uint64_t> out(static_cast<std::size_t>(n_), 0);
    for (NodeId i = 0; i < n_; ++i) {
        std::uint64_t acc = 0;
        std::uint64_t row = rows_[static_cast<std::size_t>(i)];
        while (row) {
            int k = std::countr_zero(row);
            row &= row - 1;
            acc |= rhs.rows_[static_cast<std::size_t>(k)];
        }
        out[static_cast<std::size_t>(i)] = acc;
    }
    return ConnectivityMatrix(n_, std::move(out));
}

ConnectivityMatrix ConnectivityMatrix::pow(int k) const {
    if (k < 1) throw Error("power must be >= 1");
    ConnectivityMatrix acc = *this;
    for (int i = 1; i < k; ++i) acc = acc * *this;
    return acc;
}

bool ConnectivityMatrix::has_all_positive_column() const {
    std::uint64_t meet = ~0ull;
    for (std::uint64_t row : rows_) meet &= row;
    if (n_ < 64) meet &= (1ull << n_) - 1;
    return meet != 0;
}

ConnectivityMatrix connectivity_matrix(const ReducedGraph& rg) {
    const NodeId n = rg.node_count();
    if (n > 64) throw Error("connectivity matrix supports up to 64 nodes");
    std::vector<std::uint64_t> rows(static_cast<std::size_t>(n), 0);
    for (NodeId i = 0; i < n; ++i) {
        std::uint64_t row = 1ull << i;  // non-zero diagonal
        for (NodeId j : rg.in_neighbors()[static_cast<std::size_t>(i)]) row |= 1ull << j;
        rows[static_cast<std::size_t>(i)] = row;
    }
    return ConnectivityMatrix(n, std::move(rows));
}

}  // namespace byzlink
