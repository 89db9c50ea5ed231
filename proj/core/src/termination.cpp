#include "byzlink/termination.hpp"

#include <cmath>
#include <limits>

#include <mpfr.h>

#include "byzlink/common.hpp"
#include "byzlink/reduction.hpp"

namespace byzlink {

namespace {

constexpr double kMaxPrecisionBits = 4.8e7;  // ~14.5M decimal digits

struct PrecisionGuard {
    unsigned saved;
    explicit PrecisionGuard(unsigned digits10) : saved(BigFloat::default_precision()) {
        BigFloat::default_precision(digits10);
    }
    ~PrecisionGuard() { BigFloat::default_precision(saved); }
};

BigInt ceil_to_int(const BigFloat& x) {
    BigFloat c = boost::multiprecision::ceil(x);
    BigInt out;
    mpfr_get_z(out.backend().data(), c.backend().data(), MPFR_RNDN);
    return out;
}

BigFloat to_bigfloat(const BigInt& z) {
    BigFloat out;
    mpfr_set_z(out.backend().data(), z.backend().data(), MPFR_RNDN);
    return out;
}

}  // namespace

BigInt required_blocks_from_decay(const BigFloat& x, const BigFloat& target) {
    if (!(x > 0 && x < 1)) throw Error("decay factor must lie in (0, 1)");
    if (!(target > 0)) throw Error("target must be positive");
    if (target > 1) return 0;
    BigFloat ratio = log(target) / log(BigFloat(1) - x);
    BigInt k = ceil_to_int(ratio);
    return k < 0 ? BigInt(0) : k;
}

BigInt required_blocks_from_log(const BigFloat& ln_beta, const BigInt& rn,
                                const BigFloat& ln_target) {
    if (!(ln_beta < 0)) throw Error("ln(beta) must be negative");
    if (ln_target > 0) return 0;
    BigFloat exponent = ln_beta * to_bigfloat(rn);
    BigFloat x = exp(exponent);  // beta^(rn); representable thanks to mpfr's huge exponent range
    BigFloat ratio = ln_target / log(BigFloat(1) - x);
    BigInt k = ceil_to_int(ratio);
    return k < 0 ? BigInt(0) : k;
}

TerminationBound compute_t_end(const DiGraph& g, int f, double epsilon, double U, double mu,
                               bool skip_condition_check, const CheckOptions& opts) {
    if (!(epsilon > 0)) throw Error("epsilon must be positive");
    const double max_um = std::max(std::fabs(U), std::fabs(mu));
    if (!(max_um > 0)) throw Error("max(|U|, |mu|) must be positive");
    if (!skip_condition_check) {
        auto s = check_condition_s(g, f, opts);
        if (!s.satisfied())
            throw Error("graph violates the source-component condition; the bound does not apply");
    }

    TerminationBound out;
    const long n = g.node_count();
    out.alpha_den = g.max_in_degree() + 1;
    out.beta_den = out.alpha_den * 4 * n;
    out.r = count_reduced_graphs(g, f);
    out.rn = out.r * n;

    const double target_d = epsilon / (static_cast<double>(n) * max_um);
    if (target_d > 1.0) {
        out.k_blocks = 0;
        out.t_end = 0;
        out.log10_t_end = -std::numeric_limits<double>::infinity();
        return out;
    }

    // The ratio ln(target)/ln(1 - beta^rn) has about rn*log2(beta_den) bits;
    // pick enough precision that its absolute error stays below 1, so the
    // ceiling is exact.
    const double rn_d = out.rn.convert_to<double>();
    double est_bits = rn_d * std::log2(static_cast<double>(out.beta_den));
    const double neg_ln_target = -std::log(target_d);
    if (neg_ln_target > 0) est_bits += std::max(0.0, std::log2(neg_ln_target));
    if (!(est_bits < kMaxPrecisionBits))
        throw Error("termination bound too large to materialize exactly (needs ~" +
                    std::to_string(est_bits) + " bits)");
    const unsigned digits10 = static_cast<unsigned>(std::max(64.0, est_bits / 3.32) + 96);

    PrecisionGuard guard(digits10);
    BigFloat ln_beta = -log(BigFloat(out.beta_den));
    BigFloat ln_target = log(BigFloat(epsilon)) - log(BigFloat(n) * BigFloat(max_um));
    out.k_blocks = required_blocks_from_log(ln_beta, out.rn, ln_target);
    out.t_end = out.k_blocks * out.rn;

    if (out.t_end == 0) {
        out.log10_t_end = -std::numeric_limits<double>::infinity();
    } else {
        PrecisionGuard small(40);
        out.log10_t_end = log10(to_bigfloat(out.t_end)).convert_to<double>();
    }
    return out;
}

}  // namespace byzlink
