#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "byzlink/bigint.hpp"
#include "byzlink/protocol.hpp"

namespace byzlink {

using Matrix = Eigen::MatrixXd;

/// How a row of the transition matrix was assembled from the trace:
///  - replacement: kept faulty values rewritten as convex combinations of the
///    fault-free trimmed extremes;
///  - self_split: no kept faulty values, half of the self weight rewritten
///    through the trimmed extremes so they keep non-zero entries;
///  - uniform: plain update weight on every kept sender (at least one trimmed
///    side has no fault-free member, or f = 0).
enum class RowCase { replacement, self_split, uniform };

const char* to_string(RowCase c);

struct RowMeta {
    RowCase tag = RowCase::uniform;
    std::vector<NodeId> faulty;              // senders over faulty links
    std::vector<NodeId> kept;                // surviving senders, incl. self
    std::vector<NodeId> trimmed_small_good;  // fault-free senders among the f smallest
    std::vector<NodeId> trimmed_large_good;  // fault-free senders among the f largest
    std::vector<NodeId> removed;             // designated removed set (<= f links)
    // Convex shares used by replacement/self_split rows; paired entries sum
    // to 1 and the larger of the two is always >= 1/2.
    std::vector<double> share_small;
    std::vector<double> share_large;
};

/// Row-stochastic matrix M with v[t] = M v[t-1], rebuilt from a recorded
/// iteration, plus the per-row assembly metadata.
struct TransitionMatrix {
    Matrix m;
    std::vector<RowMeta> rows;
};

/// Reconstruct the transition matrix of iteration t (1-based). Throws when
/// the trace is internally inconsistent (kept sets that do not match a
/// re-run of the trim, or kept faulty values outside the trimmed-extreme
/// envelope).
TransitionMatrix build_transition_matrix(const ExecutionTrace& trace, std::uint64_t t);

/// Entry lower bound: every row must carry at least beta = 1/beta_denominator
/// on the self column and on every fault-free, non-removed in-neighbor.
bool verify_row_bound(const TransitionMatrix& tm, const DiGraph& g, double slack = 1e-12);

long alpha_denominator(const DiGraph& g);  // alpha = 1 / (max in-degree + 1)
long beta_denominator(const DiGraph& g);   // beta  = alpha / (4n)

struct ErgodicityReport {
    double delta = 0.0;
    double lambda = 0.0;
};

/// delta(A) = max_j max_{i1,i2} |A(i1,j) - A(i2,j)|,
/// lambda(A) = 1 - min_{i1,i2} sum_j min(A(i1,j), A(i2,j)).
/// Rejects matrices that are not row-stochastic within `stochastic_tol`.
ErgodicityReport ergodicity(const Matrix& a, double stochastic_tol = 1e-9);

/// Product in reverse order: the first matrix is applied first, so
/// backward_product({A, B}) = B * A.
Matrix backward_product(std::span<const Matrix> ms);

/// Consecutive backward products of r*n matrices each; the list length must
/// be a multiple of r*n.
std::vector<Matrix> q_blocks(std::span<const Matrix> ms, const BigInt& r, int n);

struct SpreadBoundRow {
    std::uint64_t t = 0;
    double spread = 0.0;        // max pairwise state difference at t
    double bound = 0.0;         // n * delta(product) * max(|U|, |mu|)
    double product_residual = 0.0;  // || v[t] - (prod M) v[0] ||_inf
    bool ok = true;
};

struct SpreadBoundReport {
    std::vector<SpreadBoundRow> rows;
    bool all_ok = true;
};

/// Checks, for every iteration up to `up_to`, that the recorded spread stays
/// below the ergodicity bound and that the accumulated product reproduces the
/// states.
SpreadBoundReport check_spread_bound(const ExecutionTrace& trace, std::uint64_t up_to,
                                     double tol = 1e-9);

}  // namespace byzlink
