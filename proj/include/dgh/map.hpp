#pragma once

#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "dgh/error.hpp"
#include "dgh/integer.hpp"

namespace dgh {

/// Parameters of one map T(x) = (g·x + h(g·x)) / d^k, where k is chosen so
/// that d does not divide the result. Constructed through validate_params,
/// which enforces:
///   - d >= 2, g > d, gcd(d, g) = 1
///   - h given on exactly the residues 1..d-1
///   - c + h(c) ≡ 0 (mod d) for every residue c (so k >= 1 at every step)
///   - 0 < |h(c)| < g
/// h is periodic with period d; arguments are reduced mod d on lookup. h is
/// undefined on multiples of d, and asking for it there is a logic error:
/// g·x with x in the domain is never divisible by d.
class map_params {
public:
    std::int64_t d() const noexcept { return d_; }
    std::int64_t g() const noexcept { return g_; }
    std::int64_t dg() const noexcept { return d_ * g_; }

    /// h at a residue already reduced to 1..d-1 (reduced again defensively).
    std::int64_t shift_at(std::int64_t c) const {
        c = mod_floor64(c, d_);
        DGH_CHECK(c != 0, "h queried on a multiple of d");
        return table_[static_cast<std::size_t>(c)];
    }

    /// h(value), reducing the argument mod d first.
    std::int64_t shift(const Int& value) const {
        return shift_at(Int(value % d_).convert_to<std::int64_t>());
    }

    /// The table on residues 1..d-1, for serialization and printing.
    std::map<std::int64_t, std::int64_t> h_table() const {
        std::map<std::int64_t, std::int64_t> out;
        for (std::int64_t c = 1; c < d_; ++c) out[c] = table_[static_cast<std::size_t>(c)];
        return out;
    }

    friend map_params validate_params(std::int64_t d, std::int64_t g,
                                      const std::map<std::int64_t, std::int64_t>& h_table);

private:
    map_params(std::int64_t d, std::int64_t g, std::vector<std::int64_t> table)
        : d_(d), g_(g), table_(std::move(table)) {}

    std::int64_t d_;
    std::int64_t g_;
    std::vector<std::int64_t> table_; // index c in 1..d-1; slot 0 unused
};

inline map_params validate_params(std::int64_t d, std::int64_t g,
                                  const std::map<std::int64_t, std::int64_t>& h_table) {
    if (d < 2) fail(errc::order_violation, "d must be at least 2, got " + std::to_string(d));
    if (g <= d) fail(errc::order_violation, "g must exceed d, got g=" + std::to_string(g) +
                                                " with d=" + std::to_string(d));
    if (std::gcd(d, g) != 1)
        fail(errc::not_coprime, "gcd(d, g) = " + std::to_string(std::gcd(d, g)));
    for (const auto& [c, h] : h_table) {
        if (c < 1 || c >= d)
            fail(errc::incomplete_table,
                 "residue " + std::to_string(c) + " outside 1.." + std::to_string(d - 1));
        (void)h;
    }
    std::vector<std::int64_t> table(static_cast<std::size_t>(d), 0);
    for (std::int64_t c = 1; c < d; ++c) {
        auto it = h_table.find(c);
        if (it == h_table.end())
            fail(errc::incomplete_table, "missing residue " + std::to_string(c));
        std::int64_t h = it->second;
        if (mod_floor64(c + h, d) != 0)
            fail(errc::congruence_violation, std::to_string(c) + " + h(" + std::to_string(c) +
                                                 ") = " + std::to_string(c + h) +
                                                 " is not 0 mod " + std::to_string(d));
        if (h == 0 || h <= -g || h >= g)
            fail(errc::magnitude_violation, "|h(" + std::to_string(c) + ")| = |" +
                                                std::to_string(h) + "| must lie in (0, " +
                                                std::to_string(g) + ")");
        table[static_cast<std::size_t>(c)] = h;
    }
    return map_params(d, g, std::move(table));
}

/// The residues in [1, dg] divisible by neither d nor g. The domain of the
/// map is exactly dg·Z+ shifted by these; their count is (d-1)(g-1).
struct residue_set {
    std::vector<std::int64_t> values; // sorted

    bool contains(std::int64_t e) const {
        for (auto v : values)
            if (v == e) return true;
        return false;
    }
};

inline residue_set residue_set_E(const map_params& params) {
    residue_set out;
    for (std::int64_t e = 1; e <= params.dg(); ++e)
        if (e % params.d() != 0 && e % params.g() != 0) out.values.push_back(e);
    DGH_CHECK(static_cast<std::int64_t>(out.values.size()) ==
                  (params.d() - 1) * (params.g() - 1),
              "|E| != (d-1)(g-1)");
    return out;
}

/// Domain membership: positive, divisible by neither d nor g.
inline bool in_domain(const map_params& params, const Int& x) {
    return x > 0 && x % params.d() != 0 && x % params.g() != 0;
}

inline void require_domain(const map_params& params, const Int& x) {
    if (!in_domain(params, x))
        fail(errc::domain_error, x.str() + " is divisible by d or g (or not positive)");
}

/// An m-path: the ordered division exponents (k_1, ..., k_m) observed along
/// m applications of the map.
struct path_spec {
    std::vector<int> ks;

    path_spec() = default;
    explicit path_spec(std::vector<int> values) : ks(std::move(values)) {
        for (int k : ks)
            if (k < 1) fail(errc::parse_error, "path entries must be positive");
    }

    std::size_t length() const noexcept { return ks.size(); }
    std::int64_t k_total() const {
        std::int64_t sum = 0;
        for (int k : ks) sum += k;
        return sum;
    }

    path_spec prefix(std::size_t len) const {
        return path_spec(std::vector<int>(ks.begin(), ks.begin() + static_cast<std::ptrdiff_t>(len)));
    }

    bool operator==(const path_spec& other) const = default;
};

struct step_result {
    Int value;
    int k;
};

namespace detail {

/// Core of one map application: x := T(x) in place, returning the exponent k
/// it consumed. The caller must hand in a domain element; divisibility of the
/// numerator by d is still checked exactly. Working in place keeps
/// big-integer allocations off the hot path, so long trajectories run at the
/// cost of the arithmetic itself.
inline int step_in_place(const map_params& params, Int& x) {
    x *= params.g();
    if (params.d() == 2) {
        // g·x is odd (both factors are), so the shift table slot is 1 and k
        // is the number of trailing zero bits after the shift.
        x += params.shift_at(1);
        DGH_CHECK(x > 0 && !boost::multiprecision::bit_test(x, 0),
                  "step numerator not divisible by d");
        const int k = static_cast<int>(boost::multiprecision::lsb(x));
        x >>= k;
        return k;
    }
    x += params.shift(x);
    DGH_CHECK(x > 0, "step numerator not positive");
    int k = 0;
    while (x % params.d() == 0) {
        x /= params.d();
        ++k;
    }
    DGH_CHECK(k >= 1, "step numerator not divisible by d");
    return k;
}

} // namespace detail

/// One application of the map. Returns T(x) and the exponent k it consumed.
/// The result is always back in the domain: d by choice of k, g because
/// g·x + h ≡ h (mod g) with 0 < |h| < g.
inline step_result step(const map_params& params, const Int& x) {
    require_domain(params, x);
    step_result out{x, 0};
    out.k = detail::step_in_place(params, out.value);
    DGH_CHECK(in_domain(params, out.value), "step left the domain");
    return out;
}

/// The m-path of x.
inline path_spec path(const map_params& params, const Int& x, std::size_t m) {
    require_domain(params, x);
    path_spec out;
    out.ks.reserve(m);
    Int current = x;
    for (std::size_t i = 0; i < m; ++i) out.ks.push_back(detail::step_in_place(params, current));
    return out;
}

/// x, T(x), ..., T^m(x); length m + 1.
inline std::vector<Int> trajectory(const map_params& params, const Int& x, std::size_t m) {
    require_domain(params, x);
    std::vector<Int> out;
    out.reserve(m + 1);
    Int current = x;
    out.push_back(current);
    for (std::size_t i = 0; i < m; ++i) {
        detail::step_in_place(params, current);
        out.push_back(current);
    }
    return out;
}

/// Smallest n <= cap with T^n(x) < x, or nullopt when no such n shows up
/// within the cap. Whether one exists at all is undecidable in general, so
/// the caller always supplies a cap.
inline std::optional<std::uint64_t> stopping_time(const map_params& params, const Int& x,
                                                  std::uint64_t cap) {
    require_domain(params, x);
    Int current = x;
    for (std::uint64_t n = 1; n <= cap; ++n) {
        detail::step_in_place(params, current);
        if (current < x) return n;
    }
    return std::nullopt;
}

// --- text formats -----------------------------------------------------------

/// h-table text format: comma-separated residue=value pairs, decimal, values
/// signed. "1=1" is the 3x+1 table, "1=-1" the 3x-1 table, "1=2,2=1" a d=3
/// table.
inline std::map<std::int64_t, std::int64_t> parse_h_table(const std::string& text) {
    std::map<std::int64_t, std::int64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto eq = item.find('=');
        if (eq == std::string::npos) fail(errc::parse_error, "expected residue=value in '" + item + "'");
        try {
            std::size_t used = 0;
            std::int64_t residue = std::stoll(item.substr(0, eq), &used);
            if (used != eq) throw std::invalid_argument(item);
            std::string value_text = item.substr(eq + 1);
            std::int64_t value = std::stoll(value_text, &used);
            if (used != value_text.size()) throw std::invalid_argument(item);
            if (out.count(residue)) fail(errc::parse_error, "duplicate residue " + std::to_string(residue));
            out[residue] = value;
        } catch (const error&) {
            throw;
        } catch (const std::exception&) {
            fail(errc::parse_error, "bad h-table entry '" + item + "'");
        }
    }
    if (out.empty()) fail(errc::parse_error, "empty h-table");
    return out;
}

inline std::string format_h_table(const std::map<std::int64_t, std::int64_t>& table) {
    std::string out;
    for (const auto& [c, h] : table) {
        if (!out.empty()) out += ',';
        out += std::to_string(c) + "=" + std::to_string(h);
    }
    return out;
}

/// Path text format: comma-separated positive integers, e.g. "2,3".
inline path_spec parse_path(const std::string& text) {
    std::vector<int> ks;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            int k = std::stoi(item, &used);
            if (used != item.size()) throw std::invalid_argument(item);
            ks.push_back(k);
        } catch (const std::exception&) {
            fail(errc::parse_error, "bad path entry '" + item + "'");
        }
    }
    if (ks.empty()) fail(errc::parse_error, "empty path");
    return path_spec(std::move(ks));
}

inline std::string format_path(const path_spec& p) {
    std::string out;
    for (int k : p.ks) {
        if (!out.empty()) out += ',';
        out += std::to_string(k);
    }
    return out;
}

} // namespace dgh
