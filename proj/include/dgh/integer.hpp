#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <cstdint>
#include <limits>

#include "dgh/error.hpp"

namespace dgh {

/// Arbitrary-precision signed integer. Trajectories of positive-drift maps
/// grow without bound, so nothing in the library assumes a machine word.
using Int = boost::multiprecision::cpp_int;

/// Exact rational built on Int; always stored normalized.
using Rational = boost::multiprecision::cpp_rational;

/// base^exp for nonnegative exp.
inline Int pow_int(const Int& base, std::uint64_t exp) {
    DGH_CHECK(exp <= std::numeric_limits<unsigned>::max(), "exponent out of supported range");
    return boost::multiprecision::pow(base, static_cast<unsigned>(exp));
}

/// Least nonnegative representative of a mod m (m > 0). cpp_int's % truncates
/// toward zero like built-in integers, so negative a needs the correction.
inline Int mod_floor(const Int& a, const Int& m) {
    Int r = a % m;
    if (r < 0) r += m;
    return r;
}

inline std::int64_t mod_floor64(std::int64_t a, std::int64_t m) {
    std::int64_t r = a % m;
    if (r < 0) r += m;
    return r;
}

/// Natural log of a positive big integer: top 64 bits give the mantissa, the
/// remaining bit count enters as a multiple of ln 2. Relative error ~1e-15.
inline double big_ln(const Int& x) {
    DGH_CHECK(x > 0, "big_ln requires a positive argument");
    unsigned bits = boost::multiprecision::msb(x); // index of highest set bit
    if (bits < 63) return std::log(static_cast<double>(x.convert_to<std::uint64_t>()));
    std::uint64_t top = Int(x >> (bits - 63)).convert_to<std::uint64_t>();
    return std::log(static_cast<double>(top)) + static_cast<double>(bits - 63) * std::log(2.0);
}

} // namespace dgh
