#pragma once

#include <stdexcept>
#include <string>

namespace dgh {

/// Failure categories surfaced to callers. Internal algorithm invariants
/// (exact divisibility, candidate counts) throw std::logic_error instead:
/// those indicate a bug, not bad input.
enum class errc {
    not_coprime,
    order_violation,
    congruence_violation,
    magnitude_violation,
    incomplete_table,
    parse_error,
    domain_error,
    residue_not_in_e,
    index_out_of_range,
    window_too_small,
    empty_sample,
    degenerate_drift,
};

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::not_coprime: return "not_coprime";
        case errc::order_violation: return "order_violation";
        case errc::congruence_violation: return "congruence_violation";
        case errc::magnitude_violation: return "magnitude_violation";
        case errc::incomplete_table: return "incomplete_table";
        case errc::parse_error: return "parse_error";
        case errc::domain_error: return "domain_error";
        case errc::residue_not_in_e: return "residue_not_in_e";
        case errc::index_out_of_range: return "index_out_of_range";
        case errc::window_too_small: return "window_too_small";
        case errc::empty_sample: return "empty_sample";
        case errc::degenerate_drift: return "degenerate_drift";
    }
    return "unknown";
}

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

} // namespace dgh

// Always-on internal consistency check. Used for invariants of the solver
// construction itself; a trip means a logic bug, never bad user input.
#define DGH_CHECK(cond, msg)                                                             \
    do {                                                                                 \
        if (!(cond)) throw std::logic_error(std::string("internal check failed: ") + msg); \
    } while (0)
