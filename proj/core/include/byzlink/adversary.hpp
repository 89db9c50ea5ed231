#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "byzlink/conditions.hpp"
#include "byzlink/graph.hpp"

namespace byzlink {

enum class AdversaryKind { none, drop, constant, offset, random, split };

const char* to_string(AdversaryKind k);
AdversaryKind adversary_kind_from_string(std::string_view s);

/// Parameters for the freeze adversary built from a partition-condition
/// violation witness: links into L deliver `below`, links into R deliver
/// `above`, links into C deliver the midpoint of [value_low, value_high].
struct SplitParams {
    Partition partition;
    std::vector<Edge> fault_set;
    double value_low = 0.0;   // m, the value held by L
    double value_high = 1.0;  // M, the value held by R
    double below = -1.0;      // delivered into L; must be < value_low
    double above = 2.0;       // delivered into R; must be > value_high
};

struct AdversaryConfig {
    AdversaryKind kind = AdversaryKind::none;
    /// Fault budget; defaults to the simulation's f when parsed from JSON.
    int f = 0;
    /// Static fault set for drop / constant / offset.
    std::vector<Edge> links;
    double value = 0.0;             // constant kind
    double delta = 0.0;             // offset kind
    double low = -1.0, high = 1.0;  // random kind value range
    std::optional<std::uint64_t> seed;
    std::optional<SplitParams> split;

    /// Throws when the configuration cannot stay within the budget on g.
    void validate(const DiGraph& g) const;
};

AdversaryConfig adversary_from_json(const nlohmann::json& j, int default_f);
nlohmann::json adversary_to_json(const AdversaryConfig& cfg);

/// What a faulty link delivers instead of the sent value.
struct Delivery {
    bool dropped = false;
    double value = 0.0;
};

/// Read-only snapshot of the pre-iteration global state; the omniscient
/// adversary sees everything but mutates nothing.
struct OmniscientView {
    const DiGraph& graph;
    std::span<const double> states;  // v[t-1]
};

/// Overrides for at most f links in iteration t; every other link delivers
/// the sent value verbatim. Deterministic given (cfg, seed, t, view).
std::vector<std::pair<Edge, Delivery>> corrupt(const AdversaryConfig& cfg, std::uint64_t seed,
                                               std::uint64_t t, const OmniscientView& view);

}  // namespace byzlink
