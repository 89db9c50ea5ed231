#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/mpfr.hpp>

namespace byzlink {

/// Arbitrary-precision integer. Reduced-graph counts enter exponents in the
/// termination bound, so overflow is unacceptable anywhere along that chain.
using BigInt = boost::multiprecision::mpz_int;

/// Arbitrary-precision float with runtime-selectable precision.
using BigFloat = boost::multiprecision::mpfr_float;

}  // namespace byzlink
