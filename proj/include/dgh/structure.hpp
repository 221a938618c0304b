#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include "dgh/error.hpp"
#include "dgh/integer.hpp"
#include "dgh/map.hpp"

namespace dgh {

/// Solves the congruence-system characterization of path classes: the set of
/// x ≡ epsilon (mod dg) whose first m division exponents equal a prescribed
/// path is a disjoint union of exactly (d-1)^m arithmetic progressions
///
///     x_p = dg·(d^K·p + q) + epsilon,        p = 0, 1, 2, ...
///
/// one per triple (q, r, delta), where K is the sum of the path entries, and
/// the m-th iterate of the map carries each progression onto
///
///     T^m(x_p) = dg·(g^m·p + r) + delta.
///
/// Triples are produced level by level: each triple for the first m-1
/// exponents spawns d-1 triples when one more exponent is appended.

/// Coefficients (a, b) with A·a - B·b = 1 and 0 <= a < B, for coprime
/// positive A, B. a is the modular inverse of A mod B.
struct bezout_pair_t {
    Int a;
    Int b;
};

inline bezout_pair_t bezout_pair(const Int& A, const Int& B) {
    DGH_CHECK(A > 0 && B > 0, "bezout_pair needs positive arguments");
    // Extended Euclid on (A, B): maintain old_s·A ≡ old_r (mod B).
    Int old_r = A, r = B;
    Int old_s = 1, s = 0;
    while (r != 0) {
        Int quotient = old_r / r;
        Int tmp = old_r - quotient * r;
        old_r = r;
        r = tmp;
        tmp = old_s - quotient * s;
        old_s = s;
        s = tmp;
    }
    DGH_CHECK(old_r == 1, "bezout_pair arguments not coprime");
    Int a = mod_floor(old_s, B);
    Int b = (A * a - 1) / B;
    DGH_CHECK(A * a - B * b == 1, "bezout identity violated");
    return {std::move(a), std::move(b)};
}

/// One progression and its image: members dg·(d^K·p + q) + epsilon map in m
/// steps to dg·(g^m·p + r) + delta.
struct residue_triple {
    Int q;
    Int r;
    std::int64_t delta;

    bool operator==(const residue_triple& other) const = default;
};

namespace detail {

/// Least non-negative t with a·t ≡ c (mod n), for small coprime a, n.
inline std::int64_t solve_linear_mod64(std::int64_t a, std::int64_t c, std::int64_t n) {
    a = mod_floor64(a, n);
    c = mod_floor64(c, n);
    // Extended Euclid for the inverse of a mod n.
    std::int64_t old_r = a, r = n, old_s = 1, s = 0;
    while (r != 0) {
        std::int64_t quotient = old_r / r;
        std::int64_t tmp = old_r - quotient * r;
        old_r = r;
        r = tmp;
        tmp = old_s - quotient * s;
        old_s = s;
        s = tmp;
    }
    DGH_CHECK(old_r == 1, "no modular inverse: arguments not coprime");
    return mod_floor64(old_s * c % n, n);
}

/// Appends one exponent k to a triple valid for the first m-1 exponents.
/// d_pow_kprefix = d^(K - k) is the modulus the prior q lives under, and
/// g_pow_mnew = g^m. Appends the d-1 successor triples to `out`.
inline void extend_triple(const map_params& params, const residue_triple& prior,
                          const Int& d_pow_kprefix, const Int& g_pow_mnew, int k,
                          std::vector<residue_triple>& out) {
    const std::int64_t d = params.d();
    const std::int64_t g = params.g();
    const Int d_pow_k = pow_int(d, static_cast<std::uint64_t>(k));

    // The shift consumed at this step depends only on delta of the prior
    // triple: g·x ≡ g·delta (mod d) for every member.
    const std::int64_t h = params.shift(Int(g) * prior.delta);

    // delta mod g is forced: d^k·delta ≡ h (mod g).
    const std::int64_t d_pow_k_mod_g = Int(d_pow_k % g).convert_to<std::int64_t>();
    const std::int64_t delta_mod_g = solve_linear_mod64(d_pow_k_mod_g, h, g);
    DGH_CHECK(delta_mod_g != 0, "image residue divisible by g");

    const bezout_pair_t bz = bezout_pair(g_pow_mnew, d_pow_k);
    const std::int64_t before = static_cast<std::int64_t>(out.size());

    // Of the d lifts of delta_mod_g below dg, exactly one is divisible by d;
    // the other d-1 each yield one successor triple.
    for (std::int64_t hi = 0; hi < d; ++hi) {
        const std::int64_t delta = hi * g + delta_mod_g;
        if (delta % d == 0) continue;
        Int numerator = d_pow_k * delta - Int(d) * g * g * prior.r - Int(g) * prior.delta - h;
        DGH_CHECK(numerator % (d * g) == 0, "level congruence has no integer solution");
        Int v = numerator / (d * g);
        Int p2 = mod_floor(bz.a * v, d_pow_k);
        Int r_new = mod_floor(bz.b * v, g_pow_mnew);
        Int q_new = d_pow_kprefix * p2 + prior.q;
        out.push_back({std::move(q_new), std::move(r_new), delta});
    }
    DGH_CHECK(static_cast<std::int64_t>(out.size()) - before == d - 1,
              "expected d-1 successors per triple");
}

inline void sort_triples(std::vector<residue_triple>& triples) {
    std::sort(triples.begin(), triples.end(), [](const residue_triple& x, const residue_triple& y) {
        if (x.delta != y.delta) return x.delta < y.delta;
        return x.q < y.q;
    });
}

} // namespace detail

/// The complete characterization of one path class: all (d-1)^m triples,
/// sorted by (delta, q).
class structure_solution {
public:
    structure_solution(map_params params, std::int64_t epsilon, path_spec path,
                       std::vector<residue_triple> triples)
        : params_(std::move(params)),
          epsilon_(epsilon),
          path_(std::move(path)),
          k_total_(path_.k_total()),
          triples_(std::move(triples)) {}

    const map_params& params() const noexcept { return params_; }
    std::int64_t epsilon() const noexcept { return epsilon_; }
    const path_spec& path() const noexcept { return path_; }
    std::size_t m() const noexcept { return path_.length(); }
    std::int64_t k_total() const noexcept { return k_total_; }
    const std::vector<residue_triple>& triples() const noexcept { return triples_; }

    /// Distance between consecutive members of one progression: dg·d^K.
    Int progression_step() const {
        return Int(params_.dg()) * pow_int(params_.d(), static_cast<std::uint64_t>(k_total_));
    }

    /// Distance between consecutive images: dg·g^m.
    Int image_step() const {
        return Int(params_.dg()) * pow_int(params_.g(), static_cast<std::uint64_t>(m()));
    }

    /// p-th member of the progression of triple i.
    Int member(std::size_t triple_index, const Int& p) const {
        const residue_triple& t = at(triple_index);
        Int d_pow_K = pow_int(params_.d(), static_cast<std::uint64_t>(k_total_));
        return params_.dg() * (d_pow_K * p + t.q) + epsilon_;
    }

    /// Image of the p-th member under m applications of the map.
    Int image(std::size_t triple_index, const Int& p) const {
        const residue_triple& t = at(triple_index);
        Int g_pow_m = pow_int(params_.g(), static_cast<std::uint64_t>(m()));
        return params_.dg() * (g_pow_m * p + t.r) + t.delta;
    }

    const residue_triple& at(std::size_t triple_index) const {
        if (triple_index >= triples_.size())
            fail(errc::index_out_of_range,
                 "triple index " + std::to_string(triple_index) + " out of range (have " +
                     std::to_string(triples_.size()) + ")");
        return triples_[triple_index];
    }

private:
    map_params params_;
    std::int64_t epsilon_;
    path_spec path_;
    std::int64_t k_total_;
    std::vector<residue_triple> triples_;
};

namespace detail {

inline structure_solution trivial_solution(const map_params& params, std::int64_t epsilon) {
    if (!residue_set_E(params).contains(epsilon))
        fail(errc::residue_not_in_e, "epsilon " + std::to_string(epsilon) +
                                         " is divisible by d or g, or outside [1, " +
                                         std::to_string(params.dg()) + "]");
    return structure_solution(params, epsilon, path_spec{},
                              {residue_triple{Int(0), Int(0), epsilon}});
}

} // namespace detail

/// Appends one exponent to an existing solution: each triple spawns d-1
/// successors, so the count multiplies by d-1.
inline structure_solution extend(const structure_solution& sol, int k) {
    if (k < 1) fail(errc::parse_error, "path entries must be positive");
    const map_params& params = sol.params();
    const Int d_pow_kprefix = pow_int(params.d(), static_cast<std::uint64_t>(sol.k_total()));
    const Int g_pow_mnew = pow_int(params.g(), static_cast<std::uint64_t>(sol.m() + 1));

    std::vector<residue_triple> next;
    next.reserve(sol.triples().size() * static_cast<std::size_t>(params.d() - 1));
    for (const residue_triple& t : sol.triples())
        detail::extend_triple(params, t, d_pow_kprefix, g_pow_mnew, k, next);
    detail::sort_triples(next);

    path_spec longer = sol.path();
    longer.ks.push_back(k);
    return structure_solution(params, sol.epsilon(), std::move(longer), std::move(next));
}

/// Solution for a single exponent: the d-1 progressions of x ≡ epsilon
/// (mod dg) whose first division exponent is exactly k.
inline structure_solution solve_base(const map_params& params, int k, std::int64_t epsilon) {
    return extend(detail::trivial_solution(params, epsilon), k);
}

/// Full solution for an m-path: (d-1)^m triples.
inline structure_solution solve_structure(const map_params& params, const path_spec& path,
                                          std::int64_t epsilon) {
    if (path.length() == 0) fail(errc::parse_error, "path must have at least one entry");
    structure_solution sol = detail::trivial_solution(params, epsilon);
    for (int k : path.ks) sol = extend(sol, k);
    return sol;
}

/// All members of all progressions up to `bound`, sorted ascending. The
/// progressions are pairwise disjoint, so no duplicates arise.
inline std::vector<Int> enumerate_members(const structure_solution& sol, const Int& bound) {
    std::vector<Int> out;
    const Int step = sol.progression_step();
    for (std::size_t i = 0; i < sol.triples().size(); ++i) {
        for (Int x = sol.member(i, Int(0)); x <= bound; x += step) out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// First `count` members of one progression, in order of p.
inline std::vector<Int> members_of_triple(const structure_solution& sol, std::size_t triple_index,
                                          std::size_t count) {
    std::vector<Int> out;
    out.reserve(count);
    for (std::size_t p = 0; p < count; ++p) out.push_back(sol.member(triple_index, Int(p)));
    return out;
}

/// Closed-form T^m of the p-th member of progression i.
inline Int image_of(const structure_solution& sol, std::size_t triple_index, const Int& p) {
    return sol.image(triple_index, p);
}

/// Which progression contains x, and at which index p.
struct membership {
    std::size_t triple_index;
    Int p;
};

inline std::optional<membership> find_member(const structure_solution& sol, const Int& x) {
    const Int dg = sol.params().dg();
    Int y = x - sol.epsilon();
    if (y < 0 || y % dg != 0) return std::nullopt;
    y /= dg;
    const Int d_pow_K = pow_int(sol.params().d(), static_cast<std::uint64_t>(sol.k_total()));
    const Int q_x = mod_floor(y, d_pow_K);
    for (std::size_t i = 0; i < sol.triples().size(); ++i) {
        if (sol.triples()[i].q == q_x) {
            Int p = (y - q_x) / d_pow_K;
            DGH_CHECK(p >= 0, "negative progression index");
            return membership{i, std::move(p)};
        }
    }
    return std::nullopt;
}

/// The same progression seen after i of its m steps, for i = 0..m: the i-th
/// iterates of the members x_p form the progression
///
///     T^i(x_p) = dg·(coefficient·p + q) + delta,
///
/// with coefficient = g^i·d^(k_{i+1}+...+k_m). i = 0 recovers (d^K, q,
/// epsilon); i = m recovers (g^m, r, delta).
struct prefix_representation {
    std::size_t prefix_index;
    Int coefficient;
    Int q;
    std::int64_t delta;
};

/// T^i of the p-th member, evaluated from a prefix representation.
inline Int prefix_value(const map_params& params, const prefix_representation& rep, const Int& p) {
    return params.dg() * (rep.coefficient * p + rep.q) + rep.delta;
}

inline std::vector<prefix_representation> prefix_representations(const map_params& params,
                                                                 const path_spec& path,
                                                                 const residue_triple& target,
                                                                 std::int64_t epsilon) {
    const std::size_t m = path.length();
    const std::int64_t K = path.k_total();

    std::vector<prefix_representation> reps;
    reps.reserve(m + 1);
    reps.push_back({0, pow_int(params.d(), static_cast<std::uint64_t>(K)), target.q, epsilon});

    // Walk the levels again, keeping at each one the unique ancestor of the
    // target triple: q accumulates base-d digits, so the ancestor after i
    // exponents is the triple whose q equals target.q mod d^(K_i).
    residue_triple prior{Int(0), Int(0), epsilon};
    Int d_pow_Ki = 1;
    Int g_pow_i = 1;
    std::int64_t K_i = 0;
    for (std::size_t i = 1; i <= m; ++i) {
        const int k = path.ks[i - 1];
        g_pow_i *= params.g();
        std::vector<residue_triple> candidates;
        detail::extend_triple(params, prior, d_pow_Ki, g_pow_i, k, candidates);
        d_pow_Ki *= pow_int(params.d(), static_cast<std::uint64_t>(k));
        K_i += k;

        const Int q_target = mod_floor(target.q, d_pow_Ki);
        const residue_triple* match = nullptr;
        for (const residue_triple& c : candidates) {
            if (c.q == q_target) {
                DGH_CHECK(match == nullptr, "ancestor triple not unique");
                match = &c;
            }
        }
        DGH_CHECK(match != nullptr, "ancestor triple not found");

        Int coefficient = g_pow_i * pow_int(params.d(), static_cast<std::uint64_t>(K - K_i));
        Int q_i = g_pow_i * (target.q / d_pow_Ki) + match->r;
        reps.push_back({i, std::move(coefficient), std::move(q_i), match->delta});
        prior = *match;
    }
    return reps;
}

inline std::vector<prefix_representation> prefix_representations(const structure_solution& sol,
                                                                 std::size_t triple_index) {
    return prefix_representations(sol.params(), sol.path(), sol.at(triple_index), sol.epsilon());
}

/// Exercises a solution against direct iteration: the first `per_triple`
/// members of every progression must reproduce the path exactly and land on
/// the predicted image after m steps. Also checks the triple count and that
/// the q values are pairwise distinct. Returns false on the first mismatch.
inline bool verify_solution(const structure_solution& sol, std::size_t per_triple = 3) {
    const map_params& params = sol.params();
    Int expected_count = pow_int(params.d() - 1, static_cast<std::uint64_t>(sol.m()));
    if (Int(sol.triples().size()) != expected_count) return false;
    for (std::size_t i = 0; i < sol.triples().size(); ++i) {
        for (std::size_t j = i + 1; j < sol.triples().size(); ++j)
            if (sol.triples()[i].q == sol.triples()[j].q) return false;
    }
    for (std::size_t i = 0; i < sol.triples().size(); ++i) {
        for (std::size_t p = 0; p < per_triple; ++p) {
            const Int x = sol.member(i, Int(p));
            if (!in_domain(params, x)) return false;
            Int current = x;
            for (std::size_t level = 0; level < sol.m(); ++level) {
                step_result s = step(params, current);
                if (s.k != sol.path().ks[level]) return false;
                current = std::move(s.value);
            }
            if (current != sol.image(i, Int(p))) return false;
        }
    }
    return true;
}

} // namespace dgh
