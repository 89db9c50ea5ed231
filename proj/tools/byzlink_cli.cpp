// byzlink: decide link-fault robustness conditions on directed graphs, run
// the trim-and-average consensus protocol under pluggable link adversaries,
// and verify recorded executions against the transition-matrix machinery.
//
// Exit codes: 0 = satisfied / all checks pass, 1 = violated (witness or
// failing report written), 2 = usage or input error.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "byzlink/common.hpp"
#include "byzlink/conditions.hpp"
#include "byzlink/graph_io.hpp"
#include "byzlink/manifest.hpp"
#include "byzlink/matrix.hpp"
#include "byzlink/protocol.hpp"
#include "byzlink/reduction.hpp"
#include "byzlink/termination.hpp"
#include "byzlink/trace_io.hpp"

namespace {

using nlohmann::json;

void emit(const json& payload, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << payload.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw byzlink::Error("cannot write output file: " + out_path);
    out << payload.dump(2) << "\n";
}

byzlink::RunManifest make_manifest(const std::string& subcommand, const json& config,
                                   std::vector<std::string> inputs,
                                   std::vector<std::string> outputs, std::uint64_t seed = 0) {
    byzlink::RunManifest m;
    m.subcommand = subcommand;
    m.config_hash = byzlink::config_hash_of(config);
    m.seed = seed;
    m.timestamp = byzlink::iso8601_now();
    m.inputs = std::move(inputs);
    m.outputs = std::move(outputs);
    return m;
}

std::vector<byzlink::Edge> parse_fault_set(const std::string& spec) {
    std::vector<byzlink::Edge> edges;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        const auto dash = item.find('-');
        if (dash == std::string::npos)
            throw byzlink::Error("fault-set entries look like \"from-to\": " + item);
        edges.push_back({static_cast<byzlink::NodeId>(std::stoi(item.substr(0, dash))),
                         static_cast<byzlink::NodeId>(std::stoi(item.substr(dash + 1)))});
    }
    std::sort(edges.begin(), edges.end());
    return edges;
}

json edges_json(const std::vector<byzlink::Edge>& edges) {
    auto arr = json::array();
    for (const auto& e : edges) arr.push_back({e.from, e.to});
    return arr;
}

json witness_json(const byzlink::PViolationWitness& w) {
    json j;
    j["condition"] = "p";
    j["fault_set"] = edges_json(w.fault_set);
    j["partition"] = {{"L", w.partition.left},
                      {"C", w.partition.center},
                      {"R", w.partition.right}};
    return j;
}

json witness_json(const byzlink::SViolationWitness& w) {
    json j;
    j["condition"] = "s";
    j["fault_set"] = edges_json(w.fault_set);
    json removed = json::object();
    for (std::size_t i = 0; i < w.reduced.removed_per_node().size(); ++i)
        removed[std::to_string(i)] = w.reduced.removed_per_node()[i];
    j["removed_per_node"] = std::move(removed);
    j["surviving_edges"] = edges_json(w.reduced.surviving_edges());
    j["source_components"] = w.sources;
    return j;
}

struct CheckArgs {
    std::string graph_path;
    int f = 0;
    std::string condition = "both";
    std::string witness_path;
    std::string out_path;
    bool force = false;
    int threads = 1;
};

int cmd_check(const CheckArgs& args) {
    auto lg = byzlink::load_graph(args.graph_path);
    byzlink::CheckOptions opts;
    opts.override_caps = args.force;
    opts.threads = args.threads;

    json config = {{"graph", byzlink::graph_to_json(lg.graph, lg.labels)},
                   {"f", args.f},
                   {"condition", args.condition}};
    json report;
    report["condition"] = args.condition;
    report["f"] = args.f;

    std::optional<json> witness;
    bool satisfied = true;

    if (args.condition == "p" || args.condition == "both") {
        auto res = byzlink::check_condition_p(lg.graph, args.f, opts);
        report["p"] = {{"satisfied", res.satisfied()},
                       {"fault_sets_checked", res.fault_sets_checked},
                       {"partitions_checked", res.partitions_checked}};
        if (!res.satisfied()) {
            satisfied = false;
            if (!witness) witness = witness_json(*res.witness);
        }
    }
    if (args.condition == "s" || args.condition == "both") {
        auto res = byzlink::check_condition_s(lg.graph, args.f, opts);
        report["s"] = {{"satisfied", res.satisfied()},
                       {"fault_sets_checked", res.fault_sets_checked},
                       {"reductions_checked", res.reductions_checked.str()}};
        if (!res.satisfied()) {
            satisfied = false;
            if (!witness) witness = witness_json(*res.witness);
        }
    }
    report["satisfied"] = satisfied;

    auto manifest = make_manifest("check", config, {args.graph_path},
                                  args.witness_path.empty()
                                      ? std::vector<std::string>{}
                                      : std::vector<std::string>{args.witness_path});
    report["manifest"] = byzlink::manifest_to_json(manifest);
    if (witness && !args.witness_path.empty()) {
        (*witness)["manifest"] = byzlink::manifest_to_json(manifest);
        emit(*witness, args.witness_path);
    }
    emit(report, args.out_path);
    return satisfied ? 0 : 1;
}

struct ReduceArgs {
    std::string graph_path;
    int f = 0;
    std::string fault_set;
    bool count_only = false;
    std::string out_path;
};

int cmd_reduce(const ReduceArgs& args) {
    auto lg = byzlink::load_graph(args.graph_path);
    const bool has_fault_set = !args.fault_set.empty();
    std::vector<byzlink::Edge> fs = parse_fault_set(args.fault_set);

    json config = {{"graph", byzlink::graph_to_json(lg.graph, lg.labels)},
                   {"f", args.f},
                   {"fault_set", edges_json(fs)},
                   {"count_only", args.count_only}};
    auto manifest = make_manifest("reduce", config, {args.graph_path},
                                  args.out_path.empty() ? std::vector<std::string>{}
                                                        : std::vector<std::string>{args.out_path});

    if (args.count_only) {
        byzlink::BigInt count = has_fault_set
                                    ? byzlink::count_reductions_for(lg.graph, fs, args.f)
                                    : byzlink::count_reduced_graphs(lg.graph, args.f);
        json j = {{"count", count.str()}, {"f", args.f}};
        if (has_fault_set) j["fault_set"] = edges_json(fs);
        j["manifest"] = byzlink::manifest_to_json(manifest);
        emit(j, args.out_path);
        return 0;
    }

    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!args.out_path.empty()) {
        file.open(args.out_path);
        if (!file) throw byzlink::Error("cannot write output file: " + args.out_path);
        out = &file;
    }
    json meta = {{"type", "meta"}, {"manifest", byzlink::manifest_to_json(manifest)}};
    *out << meta.dump() << "\n";

    auto stream_for = [&](const std::vector<byzlink::Edge>& fault_set) {
        byzlink::ReducedGraphEnumerator en(lg.graph, fault_set, args.f);
        while (auto rg = en.next()) {
            json j;
            j["type"] = "reduced";
            j["fault_set"] = edges_json(rg->fault_set());
            json removed = json::object();
            for (std::size_t i = 0; i < rg->removed_per_node().size(); ++i)
                removed[std::to_string(i)] = rg->removed_per_node()[i];
            j["removed_per_node"] = std::move(removed);
            j["edges"] = edges_json(rg->surviving_edges());
            *out << j.dump() << "\n";
        }
    };
    if (has_fault_set) {
        stream_for(fs);
    } else {
        for (const auto& fault_set : byzlink::enumerate_fault_sets(lg.graph, args.f))
            stream_for(fault_set);
    }
    return 0;
}

struct SimulateArgs {
    std::string config_path;
    std::string out_path;
};

int cmd_simulate(const SimulateArgs& args) {
    std::ifstream in(args.config_path);
    if (!in) throw byzlink::Error("cannot open config file: " + args.config_path);
    json config_json;
    try {
        in >> config_json;
    } catch (const json::exception& e) {
        throw byzlink::Error(std::string("malformed config JSON: ") + e.what());
    }
    auto cfg = byzlink::simulation_config_from_json(
        config_json, std::filesystem::path(args.config_path).parent_path());

    auto trace = byzlink::simulate(cfg);
    const json canonical = byzlink::simulation_config_to_json(cfg);
    auto manifest = make_manifest("simulate", canonical, {args.config_path}, {args.out_path},
                                  cfg.effective_seed());
    byzlink::write_trace_jsonl(std::filesystem::path(args.out_path), trace, manifest);

    json summary = {{"iterations", trace.summary.iterations},
                    {"final_spread", trace.summary.final_spread},
                    {"converged", trace.summary.converged},
                    {"validity_ok", trace.summary.validity_ok},
                    {"config_hash", byzlink::config_hash_of(canonical)},
                    {"out", args.out_path}};
    std::cout << summary.dump(2) << "\n";
    return 0;
}

struct VerifyArgs {
    std::string trace_path;
    std::string graph_path;
    int f = -1;
    bool spread_bound = false;
    std::uint64_t spread_up_to = 50;
    std::uint64_t q_block_len = 0;
    std::string out_path;
};

int cmd_verify(const VerifyArgs& args) {
    auto loaded = byzlink::read_trace_jsonl(args.trace_path);
    const byzlink::ExecutionTrace& trace = loaded.trace;

    if (!args.graph_path.empty()) {
        auto lg = byzlink::load_graph(args.graph_path);
        if (lg.graph.node_count() != trace.config.graph.node_count())
            throw byzlink::Error("trace/graph mismatch: node counts differ");
        if (lg.graph.edges() != trace.config.graph.edges())
            throw byzlink::Error("trace/graph mismatch: edge sets differ");
    }
    if (args.f >= 0 && args.f != trace.config.f)
        throw byzlink::Error("trace/graph mismatch: f differs from the trace");

    const byzlink::DiGraph& g = trace.config.graph;
    const long beta_den = byzlink::beta_denominator(g);

    json rows = json::array();
    bool all_ok = true;
    for (std::uint64_t t = 1; t <= trace.iterations.size(); ++t) {
        auto tm = byzlink::build_transition_matrix(trace, t);
        const auto& prev = trace.states_before(t);
        const auto& cur = trace.iterations[static_cast<std::size_t>(t - 1)];

        double residual = 0.0;
        Eigen::VectorXd v_prev(g.node_count());
        for (byzlink::NodeId i = 0; i < g.node_count(); ++i)
            v_prev(i) = prev[static_cast<std::size_t>(i)];
        Eigen::VectorXd predicted = tm.m * v_prev;
        for (byzlink::NodeId i = 0; i < g.node_count(); ++i)
            residual = std::max(residual, std::fabs(predicted(i) -
                                                    cur.states[static_cast<std::size_t>(i)]));

        bool row_sums_ok = true;
        for (byzlink::NodeId i = 0; i < g.node_count(); ++i)
            row_sums_ok = row_sums_ok && std::fabs(tm.m.row(i).sum() - 1.0) < 1e-12;
        const bool beta_ok = byzlink::verify_row_bound(tm, g);
        const bool budget_ok = static_cast<int>(cur.faults.size()) <= trace.config.f;
        const double delta = byzlink::ergodicity(tm.m).delta;
        const bool ok = row_sums_ok && beta_ok && budget_ok && residual < 1e-9;
        all_ok = all_ok && ok;
        rows.push_back({{"t", t},
                        {"residual", residual},
                        {"row_sums_ok", row_sums_ok},
                        {"beta_bound_ok", beta_ok},
                        {"budget_ok", budget_ok},
                        {"delta", delta},
                        {"ok", ok}});
    }

    json report;
    report["iterations"] = trace.iterations.size();
    report["f"] = trace.config.f;
    report["beta"] = "1/" + std::to_string(beta_den);
    report["rows"] = std::move(rows);

    if (args.spread_bound) {
        auto rep = byzlink::check_spread_bound(trace, args.spread_up_to);
        json srows = json::array();
        for (const auto& r : rep.rows)
            srows.push_back({{"t", r.t},
                             {"spread", r.spread},
                             {"bound", r.bound},
                             {"product_residual", r.product_residual},
                             {"ok", r.ok}});
        report["spread_bound"] = {{"rows", std::move(srows)}, {"all_ok", rep.all_ok}};
        all_ok = all_ok && rep.all_ok;
    }

    if (args.q_block_len > 0) {
        std::vector<byzlink::Matrix> ms;
        const std::uint64_t usable =
            trace.iterations.size() - trace.iterations.size() % args.q_block_len;
        for (std::uint64_t t = 1; t <= usable; ++t)
            ms.push_back(byzlink::build_transition_matrix(trace, t).m);
        json blocks = json::array();
        bool blocks_ok = true;
        if (!ms.empty()) {
            auto qs = byzlink::q_blocks(ms, byzlink::BigInt(args.q_block_len), 1);
            // lambda(Q) <= 1 - beta^len, compared in log space since beta^len
            // underflows for realistic block lengths.
            const double log_beta_pow =
                -static_cast<double>(args.q_block_len) * std::log(static_cast<double>(beta_den));
            for (std::size_t b = 0; b < qs.size(); ++b) {
                const double lambda = byzlink::ergodicity(qs[b]).lambda;
                const bool ok = std::log1p(-lambda) >= log_beta_pow - 1e-9;
                blocks_ok = blocks_ok && ok;
                blocks.push_back({{"block", b}, {"lambda", lambda}, {"scrambling_ok", ok}});
            }
        }
        report["q_blocks"] = {{"length", args.q_block_len},
                              {"blocks", std::move(blocks)},
                              {"all_ok", blocks_ok}};
        all_ok = all_ok && blocks_ok;
    }

    report["all_ok"] = all_ok;
    json config = {{"trace", args.trace_path}, {"f", trace.config.f}};
    auto manifest = make_manifest("verify", config, {args.trace_path, args.graph_path},
                                  args.out_path.empty() ? std::vector<std::string>{}
                                                        : std::vector<std::string>{args.out_path});
    report["manifest"] = byzlink::manifest_to_json(manifest);
    emit(report, args.out_path);
    return all_ok ? 0 : 1;
}

struct TendArgs {
    std::string graph_path;
    int f = 0;
    double epsilon = 1e-3;
    double U = 1.0;
    double mu = 0.0;
    bool force = false;
    int threads = 1;
    std::string out_path;
};

int cmd_tend(const TendArgs& args) {
    auto lg = byzlink::load_graph(args.graph_path);
    byzlink::CheckOptions opts;
    opts.override_caps = args.force;
    opts.threads = args.threads;

    auto s = byzlink::check_condition_s(lg.graph, args.f, opts);
    if (!s.satisfied()) {
        std::cerr << "the bound only applies under the source-component condition, and the "
                     "graph violates it; run `byzlink check` for a witness\n";
        return 1;
    }
    auto bound = byzlink::compute_t_end(lg.graph, args.f, args.epsilon, args.U, args.mu,
                                        /*skip_condition_check=*/true);

    json j;
    j["alpha"] = "1/" + std::to_string(bound.alpha_den);
    j["beta"] = "1/" + std::to_string(bound.beta_den);
    j["r"] = bound.r.str();
    j["rn"] = bound.rn.str();
    j["k_blocks_log10"] = bound.k_blocks == 0
                              ? 0.0
                              : static_cast<double>(bound.k_blocks.str().size() - 1);
    j["log10_t_end"] = std::isinf(bound.log10_t_end) ? json(nullptr) : json(bound.log10_t_end);
    const std::string digits = bound.t_end.str();
    j["t_end_digits"] = digits.size();
    if (digits.size() <= 10'000) j["t_end"] = digits;

    json config = {{"graph", byzlink::graph_to_json(lg.graph, lg.labels)},
                   {"f", args.f},
                   {"epsilon", args.epsilon},
                   {"U", args.U},
                   {"mu", args.mu}};
    auto manifest = make_manifest("tend", config, {args.graph_path},
                                  args.out_path.empty() ? std::vector<std::string>{}
                                                        : std::vector<std::string>{args.out_path});
    j["manifest"] = byzlink::manifest_to_json(manifest);
    emit(j, args.out_path);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"robustness conditions, fault-injected consensus simulation and trace "
                 "verification for directed graphs"};
    app.require_subcommand(1);

    int threads = 1;
    app.add_option("--threads", threads, "worker threads for the exhaustive checkers")
        ->envname("BYZLINK_THREADS");

    CheckArgs check;
    auto* c = app.add_subcommand("check", "decide the partition (P) / source-component (S) "
                                          "conditions, optionally writing a violation witness");
    c->add_option("--graph", check.graph_path, "graph JSON file")->required();
    c->add_option("--f", check.f, "fault budget")->required();
    c->add_option("--condition", check.condition, "p, s or both")
        ->check(CLI::IsMember({"p", "s", "both"}))
        ->default_val("both");
    c->add_option("--witness", check.witness_path, "write the violation witness here");
    c->add_option("--out", check.out_path, "write the report here instead of stdout");
    c->add_flag("--force", check.force, "override the size caps");

    ReduceArgs reduce;
    auto* r = app.add_subcommand("reduce", "enumerate or count link-reduced graphs");
    r->add_option("--graph", reduce.graph_path, "graph JSON file")->required();
    r->add_option("--f", reduce.f, "fault budget")->required();
    r->add_option("--fault-set", reduce.fault_set, "removed links, e.g. \"0-1,2-3\"");
    r->add_flag("--count-only", reduce.count_only, "print the count instead of streaming");
    r->add_option("--out", reduce.out_path, "write JSON lines here instead of stdout");

    SimulateArgs simulate;
    auto* s = app.add_subcommand("simulate", "run the protocol under a configured adversary");
    s->add_option("--config", simulate.config_path, "simulation config JSON")->required();
    s->add_option("--out", simulate.out_path, "trace output path (JSON lines)")->required();

    VerifyArgs verify;
    auto* v = app.add_subcommand("verify", "rebuild per-iteration transition matrices from a "
                                           "trace and check the correctness machinery");
    v->add_option("--trace", verify.trace_path, "trace JSONL file")->required();
    v->add_option("--graph", verify.graph_path, "graph JSON file (cross-checked)");
    v->add_option("--f", verify.f, "fault budget (cross-checked)");
    v->add_flag("--spread-bound", verify.spread_bound, "also check the ergodicity spread bound");
    v->add_option("--spread-up-to", verify.spread_up_to, "iterations for the spread bound")
        ->default_val(50);
    v->add_option("--q-blocks", verify.q_block_len, "block length for scrambling checks");
    v->add_option("--out", verify.out_path, "write the report here instead of stdout");

    TendArgs tend;
    auto* t = app.add_subcommand("tend", "compute the worst-case termination iteration bound");
    t->add_option("--graph", tend.graph_path, "graph JSON file")->required();
    t->add_option("--f", tend.f, "fault budget")->required();
    t->add_option("--epsilon", tend.epsilon, "agreement threshold")->default_val(1e-3);
    t->add_option("--U", tend.U, "input upper bound")->default_val(1.0);
    t->add_option("--mu", tend.mu, "input lower bound")->default_val(0.0);
    t->add_flag("--force", tend.force, "override the size caps");
    t->add_option("--out", tend.out_path, "write the report here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        check.threads = threads;
        tend.threads = threads;
        if (c->parsed()) return cmd_check(check);
        if (r->parsed()) return cmd_reduce(reduce);
        if (s->parsed()) return cmd_simulate(simulate);
        if (v->parsed()) return cmd_verify(verify);
        if (t->parsed()) return cmd_tend(tend);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
