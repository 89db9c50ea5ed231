#include "byzlink/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "byzlink/common.hpp"
#include "byzlink/conditions.hpp"
#include "byzlink/graph_io.hpp"
#include "byzlink/termination.hpp"

namespace byzlink {

TrimBreakdown trimmed_mean_update(NodeId self, double own,
                                  std::vector<std::pair<NodeId, double>> received, int f) {
    if (f < 0) throw Error("fault budget f must be non-negative");
    if (static_cast<int>(received.size()) < 2 * f)
        throw Error("trim of 2f values would exhaust the received multiset");
    for (const auto& [sender, value] : received) {
        if (sender == self) throw Error("received values must come from neighbors");
        (void)value;
    }

    std::sort(received.begin(), received.end(),
              [](const auto& a, const auto& b) {
                  return a.second != b.second ? a.second < b.second : a.first < b.first;
              });

    TrimBreakdown out;
    const std::size_t m = received.size();
    const std::size_t fz = static_cast<std::size_t>(f);
    for (std::size_t k = 0; k < fz; ++k) out.trimmed_small.push_back(received[k].first);
    for (std::size_t k = m - fz; k < m; ++k) out.trimmed_large.push_back(received[k].first);
    std::sort(out.trimmed_small.begin(), out.trimmed_small.end());
    std::sort(out.trimmed_large.begin(), out.trimmed_large.end());

    // Survivors plus the own value, summed in (value, id) order so the result
    // is invariant under node relabeling.
    std::vector<std::pair<double, NodeId>> surviving;
    surviving.reserve(m - 2 * fz + 1);
    surviving.push_back({own, self});
    for (std::size_t k = fz; k < m - fz; ++k) {
        surviving.push_back({received[k].second, received[k].first});
        out.kept.push_back(received[k].first);
    }
    out.kept.push_back(self);
    std::sort(out.kept.begin(), out.kept.end());
    std::sort(surviving.begin(), surviving.end());

    double sum = 0.0;
    for (const auto& [value, id] : surviving) sum += value;
    double mean = sum / static_cast<double>(surviving.size());
    out.value = std::clamp(mean, surviving.front().first, surviving.back().first);
    return out;
}

const char* to_string(StopKind k) {
    switch (k) {
        case StopKind::paper_t_end: return "paper_t_end";
        case StopKind::empirical: return "empirical";
        case StopKind::fixed: return "fixed";
    }
    return "empirical";
}

StopKind stop_kind_from_string(std::string_view s) {
    if (s == "paper_t_end") return StopKind::paper_t_end;
    if (s == "empirical") return StopKind::empirical;
    if (s == "fixed") return StopKind::fixed;
    throw Error("unknown stop mode: " + std::string(s));
}

void SimulationConfig::validate() const {
    const NodeId n = graph.node_count();
    if (static_cast<NodeId>(inputs.size()) != n) throw Error("inputs must have one value per node");
    if (!(mu <= U)) throw Error("input bounds need mu <= U");
    for (double v : inputs)
        if (!(v >= mu && v <= U)) throw Error("input outside [mu, U]");
    if (!(epsilon > 0)) throw Error("epsilon must be positive");
    if (f < 0) throw Error("fault budget f must be non-negative");
    if (adversary.f > f) throw Error("adversary budget exceeds the simulation budget f");
    if (f > 0 && graph.min_in_degree() < 2 * f)
        throw Error("some node has in-degree below 2f; the trim step is undefined");
    if (stop.kind == StopKind::fixed && stop.fixed_iterations == 0)
        throw Error("fixed stop mode needs a positive iteration count");
    adversary.validate(graph);
}

SimulationConfig simulation_config_from_json(const nlohmann::json& j,
                                             const std::filesystem::path& base_dir) {
    if (!j.is_object()) throw Error("simulation config must be a JSON object");
    LabeledGraph lg = [&] {
        if (j.contains("graph")) return graph_from_json(j.at("graph"));
        if (j.contains("graph_path")) {
            std::filesystem::path p = j.at("graph_path").get<std::string>();
            if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
            return load_graph(p);
        }
        throw Error("simulation config needs \"graph\" or \"graph_path\"");
    }();

    SimulationConfig cfg(std::move(lg.graph), j.value("inputs", std::vector<double>{}));
    cfg.labels = std::move(lg.labels);
    cfg.f = j.value("f", 0);
    cfg.mu = j.value("mu", 0.0);
    cfg.U = j.value("U", 1.0);
    cfg.epsilon = j.value("epsilon", 1e-3);
    cfg.seed = j.value("seed", std::uint64_t{0});
    cfg.assume_condition_s = j.value("assume_condition_s", false);
    if (j.contains("stop")) {
        const auto& s = j.at("stop");
        cfg.stop.kind = stop_kind_from_string(s.value("kind", "empirical"));
        cfg.stop.fixed_iterations = s.value("iterations", std::uint64_t{0});
        cfg.stop.max_iterations = s.value("max_iterations", std::uint64_t{1'000'000});
    }
    if (j.contains("adversary"))
        cfg.adversary = adversary_from_json(j.at("adversary"), cfg.f);
    else
        cfg.adversary.f = cfg.f;
    cfg.validate();
    return cfg;
}

nlohmann::json simulation_config_to_json(const SimulationConfig& cfg) {
    nlohmann::json j;
    j["graph"] = graph_to_json(cfg.graph, cfg.labels);
    j["f"] = cfg.f;
    j["inputs"] = cfg.inputs;
    j["mu"] = cfg.mu;
    j["U"] = cfg.U;
    j["epsilon"] = cfg.epsilon;
    nlohmann::json stop;
    stop["kind"] = to_string(cfg.stop.kind);
    if (cfg.stop.kind == StopKind::fixed) stop["iterations"] = cfg.stop.fixed_iterations;
    stop["max_iterations"] = cfg.stop.max_iterations;
    j["stop"] = std::move(stop);
    j["adversary"] = adversary_to_json(cfg.adversary);
    j["seed"] = cfg.seed;
    if (cfg.assume_condition_s) j["assume_condition_s"] = true;
    return j;
}

const std::vector<double>& ExecutionTrace::states_before(std::uint64_t t) const {
    if (t == 0 || t > iterations.size()) throw Error("iteration index out of range");
    return t == 1 ? config.inputs : iterations[static_cast<std::size_t>(t - 2)].states;
}

double ExecutionTrace::delivered(std::uint64_t t, NodeId from, NodeId to) const {
    const IterationRecord& rec = iterations.at(static_cast<std::size_t>(t - 1));
    const Edge link{from, to};
    for (const Edge& e : rec.dropped)
        if (e == link) return states_before(t)[static_cast<std::size_t>(to)];
    for (const TamperedDelivery& td : rec.tampered)
        if (td.link == link) return td.value;
    return states_before(t)[static_cast<std::size_t>(from)];
}

namespace {

double spread_of(const std::vector<double>& v) {
    auto [lo, hi] = std::minmax_element(v.begin(), v.end());
    return *hi - *lo;
}

}  // namespace

ExecutionTrace simulate(const SimulationConfig& cfg) {
    cfg.validate();
    const NodeId n = cfg.graph.node_count();

    std::uint64_t planned = 0;
    if (cfg.stop.kind == StopKind::fixed) {
        planned = cfg.stop.fixed_iterations;
    } else if (cfg.stop.kind == StopKind::paper_t_end) {
        if (!cfg.assume_condition_s) {
            auto s = check_condition_s(cfg.graph, cfg.f);
            if (!s.satisfied())
                throw Error("paper_t_end stop mode requires the source-component condition");
        }
        TerminationBound bound =
            compute_t_end(cfg.graph, cfg.f, cfg.epsilon, cfg.U, cfg.mu, /*skip_check=*/true);
        if (bound.t_end > BigInt(cfg.stop.max_iterations))
            throw Error("t_end = 10^" + std::to_string(bound.log10_t_end) +
                        " exceeds max_iterations; use empirical or fixed stop mode");
        planned = bound.t_end.convert_to<std::uint64_t>();
    }

    ExecutionTrace trace(cfg);
    std::vector<double> states = cfg.inputs;
    const std::uint64_t seed = cfg.effective_seed();

    for (std::uint64_t t = 1;; ++t) {
        if ((cfg.stop.kind == StopKind::fixed || cfg.stop.kind == StopKind::paper_t_end) &&
            t > planned)
            break;
        if (cfg.stop.kind == StopKind::empirical && spread_of(states) < cfg.epsilon) {
            trace.summary.converged = true;
            break;
        }
        if (cfg.stop.kind == StopKind::empirical && t > cfg.stop.max_iterations) break;

        const OmniscientView view{cfg.graph, states};
        const auto overrides = corrupt(cfg.adversary, seed, t, view);

        IterationRecord rec;
        rec.kept.resize(static_cast<std::size_t>(n));
        for (const auto& [link, delivery] : overrides) {
            const double sent = states[static_cast<std::size_t>(link.from)];
            if (delivery.dropped) {
                rec.dropped.push_back(link);
                rec.faults.push_back(link);
            } else if (delivery.value != sent) {
                rec.tampered.push_back({link, delivery.value});
                rec.faults.push_back(link);
            }
        }
        std::sort(rec.faults.begin(), rec.faults.end());
        std::sort(rec.dropped.begin(), rec.dropped.end());
        std::sort(rec.tampered.begin(), rec.tampered.end(),
                  [](const auto& a, const auto& b) { return a.link < b.link; });
        if (static_cast<int>(rec.faults.size()) > cfg.f)
            throw Error("adversary exceeded the per-iteration fault budget");

        std::vector<double> next(static_cast<std::size_t>(n));
        for (NodeId i = 0; i < n; ++i) {
            std::vector<std::pair<NodeId, double>> received;
            received.reserve(cfg.graph.in_neighbors(i).size());
            for (NodeId j : cfg.graph.in_neighbors(i)) {
                double value = states[static_cast<std::size_t>(j)];
                for (const auto& [link, delivery] : overrides) {
                    if (link.from == j && link.to == i) {
                        value = delivery.dropped ? states[static_cast<std::size_t>(i)]
                                                 : delivery.value;
                        break;
                    }
                }
                received.push_back({j, value});
            }
            TrimBreakdown up =
                trimmed_mean_update(i, states[static_cast<std::size_t>(i)], std::move(received), cfg.f);
            next[static_cast<std::size_t>(i)] = up.value;
            rec.kept[static_cast<std::size_t>(i)] = std::move(up.kept);
        }

        const auto [old_lo, old_hi] = std::minmax_element(states.begin(), states.end());
        const auto [new_lo, new_hi] = std::minmax_element(next.begin(), next.end());
        if (*new_lo < *old_lo || *new_hi > *old_hi) trace.summary.validity_ok = false;

        states = next;
        rec.states = std::move(next);
        trace.iterations.push_back(std::move(rec));
    }

    trace.summary.iterations = trace.iterations.size();
    trace.summary.final_spread = spread_of(states);
    if (cfg.stop.kind != StopKind::empirical)
        trace.summary.converged = trace.summary.final_spread < cfg.epsilon;
    return trace;
}

}  // namespace byzlink
