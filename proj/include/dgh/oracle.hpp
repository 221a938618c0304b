#pragma once

#include <cstdint>
#include <vector>

#include "dgh/error.hpp"
#include "dgh/integer.hpp"
#include "dgh/map.hpp"

namespace dgh {

/// Brute-force reference implementations. These share nothing with the
/// congruence solver except map iteration itself, so agreement between the
/// two is meaningful evidence. Performance is a non-goal: everything here
/// scans.

/// True when the first path.length() division exponents of x equal the path.
/// Stops at the first mismatch.
inline bool has_path(const map_params& params, const Int& x, const path_spec& want) {
    require_domain(params, x);
    Int current = x;
    for (int k : want.ks) {
        if (detail::step_in_place(params, current) != k) return false;
    }
    return true;
}

/// Every x <= bound with x in the domain, x ≡ epsilon (mod dg), and the
/// given path — found by scanning, not solving. Ascending order.
inline std::vector<Int> brute_force_members(const map_params& params, const path_spec& path,
                                            std::int64_t epsilon, const Int& bound) {
    if (!residue_set_E(params).contains(epsilon))
        fail(errc::residue_not_in_e, "epsilon " + std::to_string(epsilon) +
                                         " is divisible by d or g, or outside [1, " +
                                         std::to_string(params.dg()) + "]");
    if (bound < 1) fail(errc::domain_error, "bound must be positive");
    std::vector<Int> out;
    for (Int x = epsilon; x <= bound; x += params.dg()) {
        if (has_path(params, x, path)) out.push_back(x);
    }
    return out;
}

/// Probability of a path as an exact rational, by counting over one full
/// period [1, dg·d^k_total]: every integer in the window is tested, members
/// of the domain with the path are counted against all members of the
/// domain. One period suffices because path membership depends only on
/// x mod dg·d^k_total.
inline Rational brute_force_path_probability(const map_params& params, const path_spec& path) {
    const Int window_end =
        Int(params.dg()) * pow_int(params.d(), static_cast<std::uint64_t>(path.k_total()));
    Int with_path = 0;
    Int domain_total = 0;
    for (Int x = 1; x <= window_end; ++x) {
        if (!in_domain(params, x)) continue;
        ++domain_total;
        if (has_path(params, x, path)) ++with_path;
    }
    DGH_CHECK(domain_total > 0, "empty scan window");
    return Rational(with_path, domain_total);
}

} // namespace dgh
