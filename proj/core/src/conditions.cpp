#include "byzlink/conditions.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <thread>

#include "byzlink/common.hpp"

namespace byzlink {

namespace {

enum Label : std::uint8_t { kLeft = 0, kCenter = 1, kRight = 2 };

std::vector<std::vector<NodeId>> in_neighbors_without(const DiGraph& g,
                                                      std::span<const Edge> removed) {
    std::vector<std::vector<NodeId>> in(static_cast<std::size_t>(g.node_count()));
    for (NodeId i = 0; i < g.node_count(); ++i) {
        auto nbrs = g.in_neighbors(i);
        auto& row = in[static_cast<std::size_t>(i)];
        row.reserve(nbrs.size());
        for (NodeId j : nbrs)
            if (std::find(removed.begin(), removed.end(), Edge{j, i}) == removed.end())
                row.push_back(j);
    }
    return in;
}

/// Neither side reaches the other across this labeling in the filtered graph.
bool is_partition_violation(const std::vector<std::vector<NodeId>>& in,
                            const std::vector<std::uint8_t>& label, int f) {
    const NodeId n = static_cast<NodeId>(label.size());
    // (C u R) => L would need a node in L with more than f incoming links
    // from outside L; symmetric for R.
    for (NodeId i = 0; i < n; ++i) {
        const std::uint8_t li = label[static_cast<std::size_t>(i)];
        if (li == kCenter) continue;
        int cross = 0;
        for (NodeId j : in[static_cast<std::size_t>(i)])
            if (label[static_cast<std::size_t>(j)] != li) ++cross;
        if (cross > f) return false;
    }
    return true;
}

Partition partition_from_labels(const std::vector<std::uint8_t>& label) {
    Partition p;
    for (NodeId i = 0; i < static_cast<NodeId>(label.size()); ++i) {
        switch (label[static_cast<std::size_t>(i)]) {
            case kLeft: p.left.push_back(i); break;
            case kCenter: p.center.push_back(i); break;
            default: p.right.push_back(i); break;
        }
    }
    return p;
}

std::uint64_t pow3(NodeId n) {
    std::uint64_t r = 1;
    for (NodeId i = 0; i < n; ++i) r *= 3;
    return r;
}

/// Base-3 digits of `index` with node 0 the most significant digit.
void labels_for_index(std::uint64_t index, std::vector<std::uint8_t>& label) {
    for (std::size_t pos = label.size(); pos-- > 0;) {
        label[pos] = static_cast<std::uint8_t>(index % 3);
        index /= 3;
    }
}

struct RangeSplit {
    std::size_t begin, end;
};

std::vector<RangeSplit> split_ranges(std::size_t total, int threads) {
    const std::size_t workers = std::max<std::size_t>(
        1, std::min<std::size_t>(static_cast<std::size_t>(threads), total));
    std::vector<RangeSplit> out;
    std::size_t base = total / workers, extra = total % workers, at = 0;
    for (std::size_t w = 0; w < workers; ++w) {
        std::size_t len = base + (w < extra ? 1 : 0);
        out.push_back({at, at + len});
        at += len;
    }
    return out;
}

}  // namespace

void validate_partition(const Partition& p, NodeId n) {
    if (p.left.empty() || p.right.empty()) throw Error("partition needs non-empty L and R");
    std::vector<int> seen(static_cast<std::size_t>(n), 0);
    auto mark = [&](const std::vector<NodeId>& part) {
        for (NodeId v : part) {
            if (v < 0 || v >= n) throw Error("partition node out of range");
            if (seen[static_cast<std::size_t>(v)]++) throw Error("partition sets overlap");
        }
    };
    mark(p.left);
    mark(p.center);
    mark(p.right);
    for (int s : seen)
        if (!s) throw Error("partition does not cover all nodes");
}

bool implies(const DiGraph& g, std::span<const NodeId> a, std::span<const NodeId> b, int f,
             std::span<const Edge> removed) {
    if (a.empty() || b.empty()) throw Error("implies: sets must be non-empty");
    std::vector<bool> in_a(static_cast<std::size_t>(g.node_count()), false);
    for (NodeId v : a) {
        if (v < 0 || v >= g.node_count()) throw Error("implies: node out of range");
        in_a[static_cast<std::size_t>(v)] = true;
    }
    for (NodeId v : b)
        if (v >= 0 && v < g.node_count() && in_a[static_cast<std::size_t>(v)])
            throw Error("implies: sets must be disjoint");

    for (NodeId i : b) {
        int count = 0;
        for (NodeId j : g.in_neighbors(i)) {
            if (!in_a[static_cast<std::size_t>(j)]) continue;
            if (std::find(removed.begin(), removed.end(), Edge{j, i}) != removed.end()) continue;
            ++count;
        }
        if (count > f) return true;
    }
    return false;
}

PCheckResult check_condition_p(const DiGraph& g, int f, const CheckOptions& opts) {
    if (f < 0) throw Error("fault budget f must be non-negative");
    if (g.node_count() > opts.max_nodes_p && !opts.override_caps)
        throw Error("graph exceeds partition-check cap of " + std::to_string(opts.max_nodes_p) +
                    " nodes (3^n assignments); pass the override to proceed");

    const auto fault_sets = enumerate_fault_sets(g, f);
    const std::uint64_t partition_count = pow3(g.node_count());

    struct Winner {
        std::uint64_t fidx, pidx;
        PViolationWitness witness;
    };
    std::mutex mu;
    std::optional<Winner> best;
    std::atomic<std::uint64_t> best_fidx{UINT64_MAX};
    std::atomic<std::uint64_t> partitions_total{0};

    auto scan = [&](std::size_t lo, std::size_t hi) {
        std::vector<std::uint8_t> label(static_cast<std::size_t>(g.node_count()));
        std::uint64_t scanned = 0;
        for (std::size_t fidx = lo; fidx < hi; ++fidx) {
            if (best_fidx.load(std::memory_order_relaxed) < fidx) break;
            const auto in = in_neighbors_without(g, fault_sets[fidx]);
            for (std::uint64_t pidx = 0; pidx < partition_count; ++pidx) {
                labels_for_index(pidx, label);
                bool has_l = false, has_r = false;
                for (std::uint8_t l : label) {
                    has_l |= l == kLeft;
                    has_r |= l == kRight;
                }
                if (!has_l || !has_r) continue;
                ++scanned;
                if (is_partition_violation(in, label, f)) {
                    std::lock_guard lock(mu);
                    if (!best || fidx < best->fidx || (fidx == best->fidx && pidx < best->pidx)) {
                        best = Winner{fidx, pidx,
                                      PViolationWitness{partition_from_labels(label),
                                                        fault_sets[fidx]}};
                        std::uint64_t cur = best_fidx.load();
                        while (fidx < cur && !best_fidx.compare_exchange_weak(cur, fidx)) {
                        }
                    }
                    partitions_total += scanned;
                    return;  // first hit in an ascending scan is this range's minimum
                }
            }
        }
        partitions_total += scanned;
    };

    const auto ranges = split_ranges(fault_sets.size(), opts.threads);
    if (ranges.size() <= 1) {
        scan(0, fault_sets.size());
    } else {
        std::vector<std::thread> pool;
        pool.reserve(ranges.size());
        for (const auto& r : ranges) pool.emplace_back(scan, r.begin, r.end);
        for (auto& t : pool) t.join();
    }

    PCheckResult result;
    result.fault_sets_checked = fault_sets.size();
    result.partitions_checked = partitions_total.load();
    if (best) {
        verify_witness(g, f, best->witness);
        result.witness = std::move(best->witness);
    }
    return result;
}

SCheckResult check_condition_s(const DiGraph& g, int f, const CheckOptions& opts) {
    if (f < 0) throw Error("fault budget f must be non-negative");
    BigInt total = count_reduced_graphs(g, f);
    if (g.node_count() > opts.max_nodes_s && total > opts.max_reductions && !opts.override_caps)
        throw Error("reduction space too large (" + total.str() +
                    " reduced graphs on n=" + std::to_string(g.node_count()) +
                    "); pass the override to proceed");

    const auto fault_sets = enumerate_fault_sets(g, f);

    struct Winner {
        std::uint64_t fidx, ordinal;
        std::optional<SViolationWitness> witness;
    };
    std::mutex mu;
    std::optional<Winner> best;
    std::atomic<std::uint64_t> best_fidx{UINT64_MAX};
    std::mutex count_mu;
    BigInt checked = 0;

    auto scan = [&](std::size_t lo, std::size_t hi) {
        BigInt local = 0;
        for (std::size_t fidx = lo; fidx < hi; ++fidx) {
            if (best_fidx.load(std::memory_order_relaxed) < fidx) break;
            ReducedGraphEnumerator en(g, fault_sets[fidx], f);
            std::uint64_t ordinal = 0;
            while (auto rg = en.next()) {
                ++local;
                Decomposition d = rg->decompose();
                if (d.source_indices.size() != 1) {
                    std::lock_guard lock(mu);
                    if (!best || fidx < best->fidx ||
                        (fidx == best->fidx && ordinal < best->ordinal)) {
                        best = Winner{fidx, ordinal,
                                      SViolationWitness{fault_sets[fidx], std::move(*rg),
                                                        source_components(d)}};
                        std::uint64_t cur = best_fidx.load();
                        while (fidx < cur && !best_fidx.compare_exchange_weak(cur, fidx)) {
                        }
                    }
                    std::lock_guard clock(count_mu);
                    checked += local;
                    return;
                }
                ++ordinal;
            }
        }
        std::lock_guard clock(count_mu);
        checked += local;
    };

    const auto ranges = split_ranges(fault_sets.size(), opts.threads);
    if (ranges.size() <= 1) {
        scan(0, fault_sets.size());
    } else {
        std::vector<std::thread> pool;
        pool.reserve(ranges.size());
        for (const auto& r : ranges) pool.emplace_back(scan, r.begin, r.end);
        for (auto& t : pool) t.join();
    }

    SCheckResult result;
    result.fault_sets_checked = fault_sets.size();
    result.reductions_checked = checked;
    if (best && best->witness) {
        verify_witness(g, f, *best->witness);
        result.witness = std::move(best->witness);
    }
    return result;
}

bool check_equivalence(const DiGraph& g, int f, const CheckOptions& opts) {
    return check_condition_p(g, f, opts).satisfied() == check_condition_s(g, f, opts).satisfied();
}

bool check_min_indegree(const DiGraph& g, int f) {
    if (f <= 0) throw Error("min in-degree filter requires f > 0");
    return g.min_in_degree() >= 2 * f + 1;
}

void verify_witness(const DiGraph& g, int f, const PViolationWitness& w) {
    validate_partition(w.partition, g.node_count());
    if (static_cast<int>(w.fault_set.size()) > f) throw Error("witness fault set exceeds f");
    for (const Edge& e : w.fault_set)
        if (!g.has_edge(e.from, e.to)) throw Error("witness fault set contains a non-edge");

    std::vector<NodeId> cr = w.partition.center;
    cr.insert(cr.end(), w.partition.right.begin(), w.partition.right.end());
    std::vector<NodeId> lc = w.partition.left;
    lc.insert(lc.end(), w.partition.center.begin(), w.partition.center.end());
    if (implies(g, cr, w.partition.left, f, w.fault_set) ||
        implies(g, lc, w.partition.right, f, w.fault_set))
        throw Error("partition witness does not violate the condition");
}

void verify_witness(const DiGraph& g, int f, const SViolationWitness& w) {
    if (static_cast<int>(w.fault_set.size()) > f) throw Error("witness fault set exceeds f");
    ReducedGraph check(g, w.fault_set, w.reduced.removed_per_node(), f);
    Decomposition d = check.decompose();
    if (d.source_indices.size() < 2)
        throw Error("reduced-graph witness does not have two source components");
}

}  // namespace byzlink
