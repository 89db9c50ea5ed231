#include "byzlink/matrix.hpp"

#include <algorithm>
#include <cmath>

#include "byzlink/common.hpp"

namespace byzlink {

namespace {

constexpr double kShareTol = 1e-9;

double mean_state_of(const std::vector<NodeId>& nodes, const std::vector<double>& states) {
    double sum = 0.0;
    for (NodeId j : nodes) sum += states[static_cast<std::size_t>(j)];
    return sum / static_cast<double>(nodes.size());
}

/// Convex shares (s, l) with s + l = 1 and value = s*low + l*high. When the
/// envelope is degenerate the value equals both ends; all weight goes to the
/// low side, which keeps the larger share at 1.
std::pair<double, double> convex_shares(double value, double low, double high) {
    if (high - low <= kShareTol * std::max(1.0, std::fabs(high))) return {1.0, 0.0};
    double s = std::clamp((high - value) / (high - low), 0.0, 1.0);
    return {s, 1.0 - s};
}

}  // namespace

const char* to_string(RowCase c) {
    switch (c) {
        case RowCase::replacement: return "replacement";
        case RowCase::self_split: return "self_split";
        case RowCase::uniform: return "uniform";
    }
    return "uniform";
}

long alpha_denominator(const DiGraph& g) { return g.max_in_degree() + 1; }

long beta_denominator(const DiGraph& g) {
    return alpha_denominator(g) * 4 * static_cast<long>(g.node_count());
}

TransitionMatrix build_transition_matrix(const ExecutionTrace& trace, std::uint64_t t) {
    const DiGraph& g = trace.config.graph;
    const int f = trace.config.f;
    const NodeId n = g.node_count();
    if (t == 0 || t > trace.iterations.size()) throw Error("iteration index out of range");
    const IterationRecord& rec = trace.iterations[static_cast<std::size_t>(t - 1)];
    const std::vector<double>& prev = trace.states_before(t);

    std::vector<std::vector<NodeId>> faulty_in(static_cast<std::size_t>(n));
    for (const Edge& e : rec.faults) faulty_in[static_cast<std::size_t>(e.to)].push_back(e.from);

    TransitionMatrix out;
    out.m = Matrix::Zero(n, n);
    out.rows.resize(static_cast<std::size_t>(n));

    for (NodeId i = 0; i < n; ++i) {
        std::vector<std::pair<NodeId, double>> received;
        for (NodeId j : g.in_neighbors(i)) received.push_back({j, trace.delivered(t, j, i)});
        TrimBreakdown trim =
            trimmed_mean_update(i, prev[static_cast<std::size_t>(i)], received, f);
        if (trim.kept != rec.kept[static_cast<std::size_t>(i)])
            throw Error("trace kept set does not match a re-run of the trim step");

        RowMeta& meta = out.rows[static_cast<std::size_t>(i)];
        meta.kept = trim.kept;
        meta.faulty = faulty_in[static_cast<std::size_t>(i)];
        std::sort(meta.faulty.begin(), meta.faulty.end());

        auto is_faulty = [&](NodeId j) {
            return std::binary_search(meta.faulty.begin(), meta.faulty.end(), j);
        };
        for (NodeId j : trim.trimmed_small)
            if (!is_faulty(j)) meta.trimmed_small_good.push_back(j);
        for (NodeId j : trim.trimmed_large)
            if (!is_faulty(j)) meta.trimmed_large_good.push_back(j);

        std::vector<NodeId> kept_faulty;
        for (NodeId j : trim.kept)
            if (j != i && is_faulty(j)) kept_faulty.push_back(j);

        const double a = 1.0 / static_cast<double>(trim.kept.size());
        auto row = out.m.row(i);
        const auto& small_good = meta.trimmed_small_good;
        const auto& large_good = meta.trimmed_large_good;

        if (!small_good.empty() && !large_good.empty() && !kept_faulty.empty()) {
            meta.tag = RowCase::replacement;
            const double m_small = mean_state_of(small_good, prev);
            const double m_large = mean_state_of(large_good, prev);
            double sum_small = 0.0, sum_large = 0.0;
            for (NodeId k : kept_faulty) {
                const double w = trace.delivered(t, k, i);
                if (w < m_small - kShareTol || w > m_large + kShareTol)
                    throw Error("kept faulty value escapes the trimmed-extreme envelope; "
                                "trace is corrupt");
                auto [s, l] = convex_shares(w, m_small, m_large);
                meta.share_small.push_back(s);
                meta.share_large.push_back(l);
                sum_small += s;
                sum_large += l;
            }
            for (NodeId j : trim.kept)
                if (j == i || !is_faulty(j)) row(j) = a;
            for (NodeId j : small_good)
                row(j) += a * sum_small / static_cast<double>(small_good.size());
            for (NodeId j : large_good)
                row(j) += a * sum_large / static_cast<double>(large_good.size());
            meta.removed = sum_small >= sum_large ? large_good : small_good;
        } else if (!small_good.empty() && !large_good.empty()) {
            meta.tag = RowCase::self_split;
            const double m_small = mean_state_of(small_good, prev);
            const double m_large = mean_state_of(large_good, prev);
            const double own = prev[static_cast<std::size_t>(i)];
            if (own < m_small - kShareTol || own > m_large + kShareTol)
                throw Error("own value escapes the trimmed-extreme envelope; trace is corrupt");
            auto [s, l] = convex_shares(own, m_small, m_large);
            meta.share_small.push_back(s);
            meta.share_large.push_back(l);
            row(i) = a / 2.0;
            for (NodeId j : trim.kept)
                if (j != i) row(j) = a;
            for (NodeId j : small_good)
                row(j) += a / 2.0 * s / static_cast<double>(small_good.size());
            for (NodeId j : large_good)
                row(j) += a / 2.0 * l / static_cast<double>(large_good.size());
            meta.removed = s >= l ? large_good : small_good;
        } else {
            meta.tag = RowCase::uniform;
            for (NodeId j : trim.kept) row(j) = a;
            // The surviving extreme side is the designated removed set; with
            // f = 0 both sides are empty.
            meta.removed = small_good.empty() ? large_good : small_good;
        }

        const double row_sum = row.sum();
        if (std::fabs(row_sum - 1.0) > 1e-12)
            throw Error("reconstructed row does not sum to 1");
    }
    return out;
}

bool verify_row_bound(const TransitionMatrix& tm, const DiGraph& g, double slack) {
    const double beta = 1.0 / static_cast<double>(beta_denominator(g));
    for (NodeId i = 0; i < g.node_count(); ++i) {
        const RowMeta& meta = tm.rows[static_cast<std::size_t>(i)];
        if (tm.m(i, i) < beta - slack) return false;
        for (NodeId j : g.in_neighbors(i)) {
            if (std::binary_search(meta.faulty.begin(), meta.faulty.end(), j)) continue;
            if (std::find(meta.removed.begin(), meta.removed.end(), j) != meta.removed.end())
                continue;
            if (tm.m(i, j) < beta - slack) return false;
        }
    }
    return true;
}

ErgodicityReport ergodicity(const Matrix& a, double stochastic_tol) {
    if (a.rows() != a.cols() || a.rows() < 1) throw Error("ergodicity needs a square matrix");
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        if (a.row(i).minCoeff() < -stochastic_tol)
            throw Error("matrix has negative entries; not row stochastic");
        if (std::fabs(a.row(i).sum() - 1.0) > stochastic_tol)
            throw Error("matrix rows do not sum to 1; not row stochastic");
    }

    ErgodicityReport rep;
    double min_overlap = 1.0;
    for (Eigen::Index i1 = 0; i1 < a.rows(); ++i1)
        for (Eigen::Index i2 = i1 + 1; i2 < a.rows(); ++i2) {
            double overlap = 0.0;
            for (Eigen::Index j = 0; j < a.cols(); ++j) {
                rep.delta = std::max(rep.delta, std::fabs(a(i1, j) - a(i2, j)));
                overlap += std::min(a(i1, j), a(i2, j));
            }
            min_overlap = std::min(min_overlap, overlap);
        }
    rep.lambda = a.rows() > 1 ? 1.0 - min_overlap : 0.0;
    return rep;
}

Matrix backward_product(std::span<const Matrix> ms) {
    if (ms.empty()) throw Error("empty matrix product");
    for (const Matrix& m : ms)
        if (m.rows() != ms.front().rows() || m.cols() != ms.front().cols() ||
            m.rows() != m.cols())
            throw Error("matrix product dimension mismatch");
    Matrix acc = ms.front();
    for (std::size_t k = 1; k < ms.size(); ++k) acc = ms[k] * acc;
    return acc;
}

std::vector<Matrix> q_blocks(std::span<const Matrix> ms, const BigInt& r, int n) {
    if (r < 1 || n < 1) throw Error("block length must be positive");
    const BigInt rn_big = r * n;
    if (rn_big > BigInt(ms.size())) throw Error("fewer matrices than one block");
    const std::size_t rn = rn_big.convert_to<std::size_t>();
    if (ms.size() % rn != 0) throw Error("matrix count is not a multiple of r*n");

    std::vector<Matrix> blocks;
    blocks.reserve(ms.size() / rn);
    for (std::size_t at = 0; at < ms.size(); at += rn)
        blocks.push_back(backward_product(ms.subspan(at, rn)));
    return blocks;
}

SpreadBoundReport check_spread_bound(const ExecutionTrace& trace, std::uint64_t up_to,
                                     double tol) {
    const NodeId n = trace.config.graph.node_count();
    const double max_um = std::max(std::fabs(trace.config.U), std::fabs(trace.config.mu));
    Eigen::VectorXd v0(n);
    for (NodeId i = 0; i < n; ++i) v0(i) = trace.config.inputs[static_cast<std::size_t>(i)];

    SpreadBoundReport rep;
    Matrix product = Matrix::Identity(n, n);
    const std::uint64_t last = std::min<std::uint64_t>(up_to, trace.iterations.size());
    for (std::uint64_t t = 1; t <= last; ++t) {
        product = build_transition_matrix(trace, t).m * product;

        SpreadBoundRow row;
        row.t = t;
        const auto& states = trace.iterations[static_cast<std::size_t>(t - 1)].states;
        const auto [lo, hi] = std::minmax_element(states.begin(), states.end());
        row.spread = *hi - *lo;
        row.bound = static_cast<double>(n) * ergodicity(product).delta * max_um;

        Eigen::VectorXd predicted = product * v0;
        double residual = 0.0;
        for (NodeId i = 0; i < n; ++i)
            residual = std::max(residual,
                                std::fabs(predicted(i) - states[static_cast<std::size_t>(i)]));
        row.product_residual = residual;
        row.ok = row.spread <= row.bound + tol && residual <= tol;
        rep.all_ok = rep.all_ok && row.ok;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace byzlink
