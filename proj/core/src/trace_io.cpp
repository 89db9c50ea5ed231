#include "byzlink/trace_io.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <sstream>

namespace byzlink {

nlohmann::json manifest_to_json(const RunManifest& m) {
    nlohmann::json j;
    j["subcommand"] = m.subcommand;
    j["config_hash"] = m.config_hash;
    j["tool_version"] = m.tool_version;
    j["seed"] = m.seed;
    j["timestamp"] = m.timestamp;
    j["inputs"] = m.inputs;
    j["outputs"] = m.outputs;
    return j;
}

RunManifest manifest_from_json(const nlohmann::json& j) {
    RunManifest m;
    m.subcommand = j.value("subcommand", "");
    m.config_hash = j.value("config_hash", "");
    m.tool_version = j.value("tool_version", "");
    m.seed = j.value("seed", std::uint64_t{0});
    m.timestamp = j.value("timestamp", "");
    m.inputs = j.value("inputs", std::vector<std::string>{});
    m.outputs = j.value("outputs", std::vector<std::string>{});
    return m;
}

std::string config_hash_of(const nlohmann::json& config) {
    return hex64(fnv1a64(config.dump()));
}

std::string iso8601_now() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t tt = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

nlohmann::json edges_json(const std::vector<Edge>& edges) {
    auto arr = nlohmann::json::array();
    for (const Edge& e : edges) arr.push_back({e.from, e.to});
    return arr;
}

std::vector<Edge> edges_from(const nlohmann::json& arr) {
    std::vector<Edge> out;
    for (const auto& e : arr) out.push_back({e.at(0).get<NodeId>(), e.at(1).get<NodeId>()});
    return out;
}

}  // namespace

void write_trace_jsonl(std::ostream& out, const ExecutionTrace& trace,
                       const RunManifest& manifest) {
    nlohmann::json meta;
    meta["type"] = "meta";
    meta["config"] = simulation_config_to_json(trace.config);
    meta["config_hash"] = config_hash_of(meta["config"]);
    meta["manifest"] = manifest_to_json(manifest);
    out << meta.dump() << "\n";

    for (std::size_t k = 0; k < trace.iterations.size(); ++k) {
        const IterationRecord& rec = trace.iterations[k];
        nlohmann::json j;
        j["type"] = "iter";
        j["t"] = k + 1;
        j["v"] = rec.states;
        j["faults"] = edges_json(rec.faults);
        j["dropped"] = edges_json(rec.dropped);
        auto tampered = nlohmann::json::array();
        for (const TamperedDelivery& td : rec.tampered)
            tampered.push_back({td.link.from, td.link.to, td.value});
        j["tampered"] = std::move(tampered);
        nlohmann::json kept = nlohmann::json::object();
        for (std::size_t i = 0; i < rec.kept.size(); ++i)
            kept[std::to_string(i)] = rec.kept[i];
        j["kept"] = std::move(kept);
        out << j.dump() << "\n";
    }

    nlohmann::json summary;
    summary["type"] = "summary";
    summary["iterations"] = trace.summary.iterations;
    summary["final_spread"] = trace.summary.final_spread;
    summary["converged"] = trace.summary.converged;
    summary["validity_ok"] = trace.summary.validity_ok;
    out << summary.dump() << "\n";
}

void write_trace_jsonl(const std::filesystem::path& path, const ExecutionTrace& trace,
                       const RunManifest& manifest) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write trace file: " + path.string());
    write_trace_jsonl(out, trace, manifest);
}

LoadedTrace read_trace_jsonl(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error("empty trace file");
    nlohmann::json meta;
    try {
        meta = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("malformed trace meta line: ") + e.what());
    }
    if (meta.value("type", "") != "meta") throw Error("trace must start with a meta record");

    SimulationConfig cfg = simulation_config_from_json(meta.at("config"));
    ExecutionTrace trace(std::move(cfg));
    RunManifest manifest = manifest_from_json(meta.value("manifest", nlohmann::json::object()));

    const NodeId n = trace.config.graph.node_count();
    std::uint64_t expect_t = 1;
    bool saw_summary = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw Error(std::string("malformed trace line: ") + e.what());
        }
        const std::string type = j.value("type", "iter");
        if (type == "summary") {
            trace.summary.iterations = j.value("iterations", std::uint64_t{0});
            trace.summary.final_spread = j.value("final_spread", 0.0);
            trace.summary.converged = j.value("converged", false);
            trace.summary.validity_ok = j.value("validity_ok", true);
            saw_summary = true;
            continue;
        }
        if (type != "iter") throw Error("unknown trace record type: " + type);
        if (j.at("t").get<std::uint64_t>() != expect_t)
            throw Error("trace iterations out of order");
        ++expect_t;

        IterationRecord rec;
        rec.states = j.at("v").get<std::vector<double>>();
        if (static_cast<NodeId>(rec.states.size()) != n)
            throw Error("trace state vector has wrong length");
        rec.faults = edges_from(j.value("faults", nlohmann::json::array()));
        rec.dropped = edges_from(j.value("dropped", nlohmann::json::array()));
        for (const auto& td : j.value("tampered", nlohmann::json::array()))
            rec.tampered.push_back(
                {{td.at(0).get<NodeId>(), td.at(1).get<NodeId>()}, td.at(2).get<double>()});
        rec.kept.resize(static_cast<std::size_t>(n));
        for (const auto& [key, val] : j.at("kept").items())
            rec.kept.at(static_cast<std::size_t>(std::stoi(key))) =
                val.get<std::vector<NodeId>>();
        trace.iterations.push_back(std::move(rec));
    }
    if (!saw_summary) {
        trace.summary.iterations = trace.iterations.size();
        if (!trace.iterations.empty()) {
            const auto& last = trace.iterations.back().states;
            const auto [lo, hi] = std::minmax_element(last.begin(), last.end());
            trace.summary.final_spread = *hi - *lo;
        }
    }
    return {std::move(trace), std::move(manifest)};
}

LoadedTrace read_trace_jsonl(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open trace file: " + path.string());
    return read_trace_jsonl(in);
}

}  // namespace byzlink
