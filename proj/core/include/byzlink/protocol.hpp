#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "byzlink/adversary.hpp"
#include "byzlink/graph.hpp"

namespace byzlink {

/// Result of one node's trim-and-average update. The node's own value is
/// never eliminated: the trim discards the f smallest and f largest of the
/// received values, then averages the survivors together with the own value
/// under uniform weight 1/(indegree + 1 - 2f).
struct TrimBreakdown {
    std::vector<NodeId> trimmed_small;  // senders of the f smallest received values
    std::vector<NodeId> trimmed_large;  // senders of the f largest received values
    std::vector<NodeId> kept;           // surviving senders, sorted, includes self
    double value = 0.0;
};

/// `received` must hold one (sender, value) entry per incoming neighbor, with
/// dropped deliveries already substituted by the receiver's own value. Ties
/// sort by (value, sender id). Rejects received counts below 2f, where the
/// trim would eliminate everything. The returned mean is clamped into the
/// [min, max] of the surviving multiset, so it can never escape the convex
/// hull through rounding.
TrimBreakdown trimmed_mean_update(NodeId self, double own,
                                  std::vector<std::pair<NodeId, double>> received, int f);

enum class StopKind { paper_t_end, empirical, fixed };

const char* to_string(StopKind k);
StopKind stop_kind_from_string(std::string_view s);

struct StopMode {
    StopKind kind = StopKind::empirical;
    std::uint64_t fixed_iterations = 0;
    /// Guard for the empirical mode and feasibility bound for paper_t_end.
    std::uint64_t max_iterations = 1'000'000;
};

struct SimulationConfig {
    SimulationConfig(DiGraph g, std::vector<double> initial_inputs)
        : graph(std::move(g)), inputs(std::move(initial_inputs)) {}

    DiGraph graph;
    std::vector<std::string> labels;
    int f = 0;
    std::vector<double> inputs;
    double mu = 0.0;  // input lower bound
    double U = 1.0;   // input upper bound
    double epsilon = 1e-3;
    StopMode stop;
    AdversaryConfig adversary;
    std::uint64_t seed = 0;  // used when the adversary block has no seed
    bool assume_condition_s = false;

    void validate() const;
    std::uint64_t effective_seed() const { return adversary.seed.value_or(seed); }
};

/// base_dir resolves a relative "graph_path" reference.
SimulationConfig simulation_config_from_json(const nlohmann::json& j,
                                             const std::filesystem::path& base_dir = {});
nlohmann::json simulation_config_to_json(const SimulationConfig& cfg);

struct TamperedDelivery {
    Edge link;
    double value;
};

/// Everything observable about one iteration: post-update states, the audited
/// faulty set (links whose delivery differed from the sent value, drops
/// included), the tampered delivery values, and the post-trim kept sets.
struct IterationRecord {
    std::vector<double> states;
    std::vector<Edge> faults;
    std::vector<Edge> dropped;
    std::vector<TamperedDelivery> tampered;
    std::vector<std::vector<NodeId>> kept;
};

struct TraceSummary {
    std::uint64_t iterations = 0;
    double final_spread = 0.0;
    bool converged = false;
    bool validity_ok = true;
};

struct ExecutionTrace {
    explicit ExecutionTrace(SimulationConfig c) : config(std::move(c)) {}

    SimulationConfig config;
    std::vector<IterationRecord> iterations;
    TraceSummary summary;

    /// States at the start of iteration t (t >= 1): v[t-1].
    const std::vector<double>& states_before(std::uint64_t t) const;
    /// Value delivered to node `to` over link (from, to) in iteration t.
    double delivered(std::uint64_t t, NodeId from, NodeId to) const;
};

ExecutionTrace simulate(const SimulationConfig& cfg);

}  // namespace byzlink
