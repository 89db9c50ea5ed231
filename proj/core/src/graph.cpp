#include "byzlink/graph.hpp"

#include <algorithm>
#include <set>

#include "byzlink/common.hpp"

namespace byzlink {

std::string hex64(std::uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[i] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

DiGraph::DiGraph(NodeId n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    if (n_ < 2) throw Error("graph must have at least 2 nodes");
    std::sort(edges_.begin(), edges_.end());
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        const Edge& e = edges_[k];
        if (e.from < 0 || e.from >= n_ || e.to < 0 || e.to >= n_)
            throw Error("edge endpoint out of range");
        if (e.from == e.to) throw Error("self-loops are not allowed");
        if (k > 0 && edges_[k - 1] == e) throw Error("duplicate edge");
    }
    in_.resize(n_);
    out_.resize(n_);
    for (const Edge& e : edges_) {
        out_[e.from].push_back(e.to);
        in_[e.to].push_back(e.from);
    }
    for (auto& v : in_) std::sort(v.begin(), v.end());
    for (auto& v : out_) std::sort(v.begin(), v.end());
}

std::span<const NodeId> DiGraph::in_neighbors(NodeId i) const {
    return in_.at(static_cast<std::size_t>(i));
}

std::span<const NodeId> DiGraph::out_neighbors(NodeId i) const {
    return out_.at(static_cast<std::size_t>(i));
}

std::vector<Edge> DiGraph::in_links(NodeId i) const {
    std::vector<Edge> links;
    links.reserve(in_.at(static_cast<std::size_t>(i)).size());
    for (NodeId j : in_[static_cast<std::size_t>(i)]) links.push_back({j, i});
    return links;
}

NodeId DiGraph::in_degree(NodeId i) const {
    return static_cast<NodeId>(in_.at(static_cast<std::size_t>(i)).size());
}

NodeId DiGraph::max_in_degree() const {
    NodeId m = 0;
    for (NodeId i = 0; i < n_; ++i) m = std::max(m, in_degree(i));
    return m;
}

NodeId DiGraph::min_in_degree() const {
    NodeId m = in_degree(0);
    for (NodeId i = 1; i < n_; ++i) m = std::min(m, in_degree(i));
    return m;
}

bool DiGraph::has_edge(NodeId from, NodeId to) const {
    const auto& succ = out_.at(static_cast<std::size_t>(from));
    return std::binary_search(succ.begin(), succ.end(), to);
}

namespace {

// Iterative Tarjan; recursion depth is unbounded on path graphs otherwise.
struct TarjanState {
    const std::vector<std::vector<NodeId>>& out;
    std::vector<int> index, lowlink;
    std::vector<bool> on_stack;
    std::vector<NodeId> stack;
    std::vector<std::vector<NodeId>> sccs;
    int next_index = 0;

    explicit TarjanState(NodeId n, const std::vector<std::vector<NodeId>>& adj)
        : out(adj), index(n, -1), lowlink(n, 0), on_stack(n, false) {}

    void run(NodeId root) {
        struct Frame {
            NodeId v;
            std::size_t child = 0;
        };
        std::vector<Frame> frames;
        frames.push_back({root});
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;

        while (!frames.empty()) {
            Frame& f = frames.back();
            const auto& succ = out[static_cast<std::size_t>(f.v)];
            if (f.child < succ.size()) {
                NodeId w = succ[f.child++];
                if (index[w] == -1) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w});
                } else if (on_stack[w]) {
                    lowlink[f.v] = std::min(lowlink[f.v], index[w]);
                }
            } else {
                if (lowlink[f.v] == index[f.v]) {
                    std::vector<NodeId> comp;
                    NodeId w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp.push_back(w);
                    } while (w != f.v);
                    sccs.push_back(std::move(comp));
                }
                NodeId v = f.v;
                frames.pop_back();
                if (!frames.empty())
                    lowlink[frames.back().v] = std::min(lowlink[frames.back().v], lowlink[v]);
            }
        }
    }
};

}  // namespace

Decomposition decompose_adjacency(NodeId n, const std::vector<std::vector<NodeId>>& out) {
    TarjanState st(n, out);
    for (NodeId v = 0; v < n; ++v)
        if (st.index[v] == -1) st.run(v);

    for (auto& comp : st.sccs) std::sort(comp.begin(), comp.end());
    std::sort(st.sccs.begin(), st.sccs.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });

    Decomposition d;
    d.components = std::move(st.sccs);
    d.component_of.assign(static_cast<std::size_t>(n), -1);
    for (std::size_t c = 0; c < d.components.size(); ++c)
        for (NodeId v : d.components[c]) d.component_of[static_cast<std::size_t>(v)] = static_cast<int>(c);

    std::set<std::pair<int, int>> dag;
    for (NodeId v = 0; v < n; ++v)
        for (NodeId w : out[static_cast<std::size_t>(v)]) {
            int cv = d.component_of[static_cast<std::size_t>(v)];
            int cw = d.component_of[static_cast<std::size_t>(w)];
            if (cv != cw) dag.insert({cv, cw});
        }
    d.dag_edges.assign(dag.begin(), dag.end());

    std::vector<bool> has_in(d.components.size(), false);
    for (const auto& [a, b] : d.dag_edges) has_in[static_cast<std::size_t>(b)] = true;
    for (std::size_t c = 0; c < d.components.size(); ++c)
        if (!has_in[c]) d.source_indices.push_back(static_cast<int>(c));
    return d;
}

Decomposition decompose(const DiGraph& g) {
    std::vector<std::vector<NodeId>> out(static_cast<std::size_t>(g.node_count()));
    for (NodeId i = 0; i < g.node_count(); ++i) {
        auto s = g.out_neighbors(i);
        out[static_cast<std::size_t>(i)].assign(s.begin(), s.end());
    }
    return decompose_adjacency(g.node_count(), out);
}

std::vector<std::vector<NodeId>> source_components(const Decomposition& d) {
    std::vector<std::vector<NodeId>> out;
    out.reserve(d.source_indices.size());
    for (int c : d.source_indices) out.push_back(d.components[static_cast<std::size_t>(c)]);
    return out;
}

bool reaches_all(const DiGraph& g, NodeId s) {
    if (s < 0 || s >= g.node_count()) throw Error("start node out of range");
    std::vector<bool> seen(static_cast<std::size_t>(g.node_count()), false);
    std::vector<NodeId> queue{s};
    seen[static_cast<std::size_t>(s)] = true;
    NodeId visited = 1;
    while (!queue.empty()) {
        NodeId v = queue.back();
        queue.pop_back();
        for (NodeId w : g.out_neighbors(v))
            if (!seen[static_cast<std::size_t>(w)]) {
                seen[static_cast<std::size_t>(w)] = true;
                ++visited;
                queue.push_back(w);
            }
    }
    return visited == g.node_count();
}

}  // namespace byzlink
