#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "byzlink/bigint.hpp"
#include "byzlink/graph.hpp"
#include "byzlink/reduction.hpp"

namespace byzlink {

/// L / C / R node partition with L and R non-empty.
struct Partition {
    std::vector<NodeId> left;
    std::vector<NodeId> center;
    std::vector<NodeId> right;
};

/// Checks disjointness, coverage of 0..n-1 and non-emptiness of L and R.
void validate_partition(const Partition& p, NodeId n);

/// Evidence that the partition condition fails: with `fault_set` removed,
/// neither side of the partition can force a value into the other.
struct PViolationWitness {
    Partition partition;
    std::vector<Edge> fault_set;
};

/// Evidence that the source-component condition fails: a reduced graph whose
/// decomposition has two or more source components.
struct SViolationWitness {
    std::vector<Edge> fault_set;
    ReducedGraph reduced;
    std::vector<std::vector<NodeId>> sources;
};

/// Size caps and parallelism for the exhaustive checkers. The partition check
/// walks 3^n label assignments per fault set and the source check walks every
/// reduced graph, so both refuse oversized inputs unless overridden.
struct CheckOptions {
    NodeId max_nodes_p = 12;
    NodeId max_nodes_s = 8;
    BigInt max_reductions = BigInt(10'000'000);
    bool override_caps = false;
    int threads = 1;
};

/// A "implies" B iff some node of B has at least f+1 incoming links from
/// nodes of A, after subtracting `removed` from the edge set. A and B must be
/// non-empty and disjoint.
bool implies(const DiGraph& g, std::span<const NodeId> a, std::span<const NodeId> b, int f,
             std::span<const Edge> removed = {});

struct PCheckResult {
    std::optional<PViolationWitness> witness;
    std::uint64_t fault_sets_checked = 0;
    std::uint64_t partitions_checked = 0;

    bool satisfied() const { return !witness.has_value(); }
};

struct SCheckResult {
    std::optional<SViolationWitness> witness;
    std::uint64_t fault_sets_checked = 0;
    BigInt reductions_checked;

    bool satisfied() const { return !witness.has_value(); }
};

/// Exhaustive partition condition: for every fault set F (|F| <= f) and every
/// partition with L, R non-empty, one of the two cross-implications must hold
/// in (V, E - F). Returns the first violation in enumeration order (fault
/// sets by size then lexicographic; partitions as base-3 counters with node 0
/// the most significant digit).
PCheckResult check_condition_p(const DiGraph& g, int f, const CheckOptions& opts = {});

/// Exhaustive source-component condition: every reduced graph for every
/// admissible fault set must have exactly one source component.
SCheckResult check_condition_s(const DiGraph& g, int f, const CheckOptions& opts = {});

/// Cross-validation oracle: the two checkers must agree on every graph.
bool check_equivalence(const DiGraph& g, int f, const CheckOptions& opts = {});

/// Fast necessary filter for f > 0: every node needs in-degree >= 2f+1.
bool check_min_indegree(const DiGraph& g, int f);

/// Re-verify witnesses against the graph; throws Error when they do not hold.
void verify_witness(const DiGraph& g, int f, const PViolationWitness& w);
void verify_witness(const DiGraph& g, int f, const SViolationWitness& w);

}  // namespace byzlink
