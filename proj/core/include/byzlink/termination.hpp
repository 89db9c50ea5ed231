#pragma once

#include "byzlink/bigint.hpp"
#include "byzlink/conditions.hpp"
#include "byzlink/graph.hpp"

namespace byzlink {

/// Worst-case iteration bound for the trim-and-average protocol on a graph
/// that satisfies the source-component condition. The contraction argument
/// shrinks the state spread by a factor (1 - beta^(r*n)) per block of r*n
/// iterations, so t_end = k_blocks * r * n where k_blocks is the first block
/// count that pushes the factor chain below epsilon / (n * max(|U|, |mu|)).
/// beta^(r*n) underflows any fixed-width float for realistic graphs; the
/// whole chain is therefore evaluated in log space at a precision scaled to
/// the magnitude of the answer.
struct TerminationBound {
    BigInt k_blocks;
    BigInt t_end;            // k_blocks * r * n
    double log10_t_end;     // -inf when t_end == 0
    BigInt r;               // number of link-reduced graphs
    BigInt rn;              // r * n, the block length
    long alpha_den = 0;     // alpha = 1 / (max in-degree + 1)
    long beta_den = 0;      // beta = alpha / (4n)
};

TerminationBound compute_t_end(const DiGraph& g, int f, double epsilon, double U, double mu,
                               bool skip_condition_check = false,
                               const CheckOptions& opts = {});

/// Smallest non-negative k with (1-x)^k strictly below target, evaluated as
/// ceil(ln(target) / ln(1-x)) per the bound's closed form; exact-ratio
/// boundaries therefore land on the ceiling, e.g. x = target = 1/2 gives 1.
/// Exposed for synthetic decay factors that no graph produces.
BigInt required_blocks_from_decay(const BigFloat& x, const BigFloat& target);

/// Same with the decay factor kept in log form: x = exp(rn * ln_beta).
BigInt required_blocks_from_log(const BigFloat& ln_beta, const BigInt& rn,
                                const BigFloat& ln_target);

}  // namespace byzlink
