#include "byzlink/adversary.hpp"

#include <algorithm>
#include <cstring>

#include "byzlink/common.hpp"

namespace byzlink {

namespace {

// splitmix64; used instead of <random> engines so that traces replay
// bit-identically on any platform.
struct Rng {
    std::uint64_t state;

    std::uint64_t next() {
        state += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    double uniform(double lo, double hi) {
        double u = static_cast<double>(next() >> 11) * 0x1.0p-53;  // [0,1)
        return lo + u * (hi - lo);
    }

    std::uint64_t below(std::uint64_t bound) { return next() % bound; }
};

Rng rng_for_iteration(std::uint64_t seed, std::uint64_t t) {
    Rng mix{seed ^ (0xd1342543de82ef95ull * (t + 1))};
    mix.next();
    return mix;
}

std::vector<Edge> parse_links(const nlohmann::json& j) {
    std::vector<Edge> links;
    for (const auto& e : j) {
        if (!e.is_array() || e.size() != 2) throw Error("link must be a [from,to] pair");
        links.push_back({e.at(0).get<NodeId>(), e.at(1).get<NodeId>()});
    }
    std::sort(links.begin(), links.end());
    return links;
}

nlohmann::json links_to_json(const std::vector<Edge>& links) {
    auto arr = nlohmann::json::array();
    for (const Edge& e : links) arr.push_back({e.from, e.to});
    return arr;
}

}  // namespace

const char* to_string(AdversaryKind k) {
    switch (k) {
        case AdversaryKind::none: return "none";
        case AdversaryKind::drop: return "drop";
        case AdversaryKind::constant: return "constant";
        case AdversaryKind::offset: return "offset";
        case AdversaryKind::random: return "random";
        case AdversaryKind::split: return "split";
    }
    return "none";
}

AdversaryKind adversary_kind_from_string(std::string_view s) {
    if (s == "none") return AdversaryKind::none;
    if (s == "drop") return AdversaryKind::drop;
    if (s == "constant") return AdversaryKind::constant;
    if (s == "offset") return AdversaryKind::offset;
    if (s == "random") return AdversaryKind::random;
    if (s == "split") return AdversaryKind::split;
    throw Error("unknown adversary kind: " + std::string(s));
}

void AdversaryConfig::validate(const DiGraph& g) const {
    if (f < 0) throw Error("adversary budget must be non-negative");
    for (const Edge& e : links)
        if (!g.has_edge(e.from, e.to)) throw Error("adversary link is not an edge");
    switch (kind) {
        case AdversaryKind::drop:
        case AdversaryKind::constant:
        case AdversaryKind::offset:
            if (static_cast<int>(links.size()) > f)
                throw Error("static fault set larger than budget f");
            break;
        case AdversaryKind::random:
            if (!(low <= high)) throw Error("random adversary needs low <= high");
            break;
        case AdversaryKind::split: {
            if (!split) throw Error("split adversary needs partition parameters");
            validate_partition(split->partition, g.node_count());
            if (static_cast<int>(split->fault_set.size()) > f)
                throw Error("split fault set larger than budget f");
            for (const Edge& e : split->fault_set)
                if (!g.has_edge(e.from, e.to)) throw Error("split fault set contains a non-edge");
            if (!(split->below < split->value_low && split->value_low < split->value_high &&
                  split->value_high < split->above))
                throw Error("split adversary needs below < m < M < above");
            break;
        }
        case AdversaryKind::none: break;
    }
}

AdversaryConfig adversary_from_json(const nlohmann::json& j, int default_f) {
    AdversaryConfig cfg;
    if (!j.is_object() || !j.contains("kind")) throw Error("adversary block needs a \"kind\"");
    cfg.kind = adversary_kind_from_string(j.at("kind").get<std::string>());
    cfg.f = j.value("f", default_f);
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    const nlohmann::json params = j.value("params", nlohmann::json::object());
    if (params.contains("links")) cfg.links = parse_links(params.at("links"));
    cfg.value = params.value("value", 0.0);
    cfg.delta = params.value("delta", 0.0);
    cfg.low = params.value("low", -1.0);
    cfg.high = params.value("high", 1.0);
    if (cfg.kind == AdversaryKind::split) {
        SplitParams sp;
        if (!params.contains("partition")) throw Error("split adversary needs a partition");
        const auto& part = params.at("partition");
        sp.partition.left = part.value("L", std::vector<NodeId>{});
        sp.partition.center = part.value("C", std::vector<NodeId>{});
        sp.partition.right = part.value("R", std::vector<NodeId>{});
        if (params.contains("links")) sp.fault_set = cfg.links;
        sp.value_low = params.value("m", 0.0);
        sp.value_high = params.value("M", 1.0);
        sp.below = params.value("m_minus", sp.value_low - 1.0);
        sp.above = params.value("M_plus", sp.value_high + 1.0);
        cfg.split = std::move(sp);
    }
    return cfg;
}

nlohmann::json adversary_to_json(const AdversaryConfig& cfg) {
    nlohmann::json j;
    j["kind"] = to_string(cfg.kind);
    j["f"] = cfg.f;
    if (cfg.seed) j["seed"] = *cfg.seed;
    nlohmann::json params = nlohmann::json::object();
    switch (cfg.kind) {
        case AdversaryKind::none: break;
        case AdversaryKind::drop: params["links"] = links_to_json(cfg.links); break;
        case AdversaryKind::constant:
            params["links"] = links_to_json(cfg.links);
            params["value"] = cfg.value;
            break;
        case AdversaryKind::offset:
            params["links"] = links_to_json(cfg.links);
            params["delta"] = cfg.delta;
            break;
        case AdversaryKind::random:
            params["low"] = cfg.low;
            params["high"] = cfg.high;
            break;
        case AdversaryKind::split: {
            const SplitParams& sp = *cfg.split;
            params["partition"] = {{"L", sp.partition.left},
                                   {"C", sp.partition.center},
                                   {"R", sp.partition.right}};
            params["links"] = links_to_json(sp.fault_set);
            params["m"] = sp.value_low;
            params["M"] = sp.value_high;
            params["m_minus"] = sp.below;
            params["M_plus"] = sp.above;
            break;
        }
    }
    j["params"] = std::move(params);
    return j;
}

std::vector<std::pair<Edge, Delivery>> corrupt(const AdversaryConfig& cfg, std::uint64_t seed,
                                               std::uint64_t t, const OmniscientView& view) {
    std::vector<std::pair<Edge, Delivery>> overrides;
    auto sent = [&](const Edge& e) { return view.states[static_cast<std::size_t>(e.from)]; };

    switch (cfg.kind) {
        case AdversaryKind::none: break;
        case AdversaryKind::drop:
            for (const Edge& e : cfg.links) overrides.push_back({e, {true, 0.0}});
            break;
        case AdversaryKind::constant:
            for (const Edge& e : cfg.links) overrides.push_back({e, {false, cfg.value}});
            break;
        case AdversaryKind::offset:
            for (const Edge& e : cfg.links) overrides.push_back({e, {false, sent(e) + cfg.delta}});
            break;
        case AdversaryKind::random: {
            Rng rng = rng_for_iteration(seed, t);
            const auto& edges = view.graph.edges();
            const std::size_t picks =
                std::min<std::size_t>(static_cast<std::size_t>(cfg.f), edges.size());
            // Partial Fisher-Yates over edge indices.
            std::vector<std::uint32_t> idx(edges.size());
            for (std::uint32_t i = 0; i < idx.size(); ++i) idx[i] = i;
            for (std::size_t i = 0; i < picks; ++i) {
                std::size_t j = i + static_cast<std::size_t>(rng.below(idx.size() - i));
                std::swap(idx[i], idx[j]);
            }
            std::vector<std::uint32_t> chosen(idx.begin(), idx.begin() + static_cast<long>(picks));
            std::sort(chosen.begin(), chosen.end());
            for (std::uint32_t k : chosen)
                overrides.push_back({edges[k], {false, rng.uniform(cfg.low, cfg.high)}});
            break;
        }
        case AdversaryKind::split: {
            const SplitParams& sp = *cfg.split;
            std::vector<std::uint8_t> side(static_cast<std::size_t>(view.graph.node_count()), 1);
            for (NodeId v : sp.partition.left) side[static_cast<std::size_t>(v)] = 0;
            for (NodeId v : sp.partition.right) side[static_cast<std::size_t>(v)] = 2;
            const double mid = (sp.value_low + sp.value_high) / 2.0;
            for (const Edge& e : sp.fault_set) {
                double v = side[static_cast<std::size_t>(e.to)] == 0   ? sp.below
                           : side[static_cast<std::size_t>(e.to)] == 2 ? sp.above
                                                                       : mid;
                overrides.push_back({e, {false, v}});
            }
            break;
        }
    }
    if (static_cast<int>(overrides.size()) > cfg.f)
        throw Error("adversary produced more overrides than budget f");
    return overrides;
}

}  // namespace byzlink
