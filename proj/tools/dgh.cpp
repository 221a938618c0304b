// Command-line front end: exact iteration of maps T(x) = (g·x + h(g·x))/d^k,
// the solver characterizing all integers sharing an m-path as arithmetic
// progressions, brute-force cross-checks, and Monte Carlo statistics of
// log-increments (drift, diffusion, normality).
//
// Exit codes: 0 success; 2 invalid parameters or unparsable input; 3 value
// outside the map's domain; 4 residue outside E; 5 verification mismatch;
// 6 missing --seed on a stochastic subcommand.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <dgh/dgh.hpp>
#include <dgh/solution_json.hpp>

namespace {

using dgh::Int;
using json = dgh::json;

constexpr int exit_ok = 0;
constexpr int exit_params = 2;
constexpr int exit_domain = 3;
constexpr int exit_residue = 4;
constexpr int exit_mismatch = 5;
constexpr int exit_missing_seed = 6;

int exit_code_for(dgh::errc code) {
    switch (code) {
        case dgh::errc::domain_error:
            return exit_domain;
        case dgh::errc::residue_not_in_e:
            return exit_residue;
        default:
            return exit_params;
    }
}

struct global_options {
    std::int64_t d = 2;
    std::int64_t g = 3;
    std::string h_spec = "1=1";
    std::string format = "json";
    std::string out_path;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;

    dgh::map_params params() const { return dgh::validate_params(d, g, dgh::parse_h_table(h_spec)); }
    bool json_format() const { return format == "json"; }
};

Int parse_big(const std::string& text, const char* what) {
    try {
        if (text.empty()) throw std::invalid_argument(text);
        for (std::size_t i = text[0] == '-' || text[0] == '+' ? 1 : 0; i < text.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(text[i]))) throw std::invalid_argument(text);
        return Int(text);
    } catch (const std::exception&) {
        dgh::fail(dgh::errc::parse_error, std::string("bad ") + what + " '" + text + "'");
    }
}

std::vector<double> parse_doubles(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            dgh::fail(dgh::errc::parse_error, std::string("bad ") + what + " entry '" + item + "'");
        }
    }
    if (out.empty()) dgh::fail(dgh::errc::parse_error, std::string("empty ") + what);
    return out;
}

dgh::density_spec parse_window(const dgh::map_params& params, const std::string& text,
                               std::uint64_t m) {
    if (text.empty()) return dgh::auto_window(params, m);
    const auto colon = text.find(':');
    if (colon == std::string::npos)
        dgh::fail(dgh::errc::parse_error, "window must be LOW:HIGH, got '" + text + "'");
    dgh::density_spec spec{parse_big(text.substr(0, colon), "window low"),
                           parse_big(text.substr(colon + 1), "window high")};
    dgh::validate_window(params, spec);
    return spec;
}

std::uint64_t require_seed(const global_options& opts) {
    if (!opts.seed) {
        std::cerr << "error: this subcommand samples randomly and needs an explicit --seed\n";
        std::exit(exit_missing_seed);
    }
    return *opts.seed;
}

void emit(const global_options& opts, const std::string& output) {
    if (opts.out_path.empty()) {
        std::cout << output;
        return;
    }
    std::ofstream file(opts.out_path, std::ios::binary);
    if (!file) dgh::fail(dgh::errc::parse_error, "cannot open output file " + opts.out_path);
    file << output;
}

// --- iterate -----------------------------------------------------------------

std::string run_iterate(const global_options& opts, const std::string& x_text, std::uint64_t m) {
    const dgh::map_params params = opts.params();
    const Int x = parse_big(x_text, "--x");
    const std::vector<Int> traj = dgh::trajectory(params, x, m);
    const dgh::path_spec path = dgh::path(params, x, m);

    if (opts.json_format()) {
        json out;
        out["d"] = params.d();
        out["g"] = params.g();
        out["h"] = dgh::format_h_table(params.h_table());
        out["x"] = x.str();
        out["m"] = m;
        json values = json::array();
        for (const Int& v : traj) values.push_back(v.str());
        out["trajectory"] = std::move(values);
        out["path"] = path.ks;
        return out.dump(2) + "\n";
    }
    std::string out = "step,value,k\n0," + traj[0].str() + ",\n";
    for (std::size_t i = 1; i < traj.size(); ++i)
        out += std::to_string(i) + "," + traj[i].str() + "," + std::to_string(path.ks[i - 1]) + "\n";
    return out;
}

// --- solve -------------------------------------------------------------------

std::string run_solve(const global_options& opts, const std::string& path_text, std::int64_t eps,
                      const std::string& verify_ps, int* exit_code) {
    const dgh::map_params params = opts.params();
    const dgh::structure_solution sol =
        dgh::solve_structure(params, dgh::parse_path(path_text), eps);

    bool verified_all = true;
    json checks = json::array();
    if (!verify_ps.empty()) {
        std::stringstream ss(verify_ps);
        std::string item;
        while (std::getline(ss, item, ',')) {
            const Int p = parse_big(item, "--verify");
            for (std::size_t i = 0; i < sol.triples().size(); ++i) {
                const Int x = sol.member(i, p);
                const bool path_ok = dgh::path(params, x, sol.m()) == sol.path();
                const bool image_ok =
                    dgh::trajectory(params, x, sol.m()).back() == dgh::image_of(sol, i, p);
                verified_all = verified_all && path_ok && image_ok;
                json row;
                row["triple"] = i;
                row["p"] = p.str();
                row["member"] = x.str();
                row["path_ok"] = path_ok;
                row["image_ok"] = image_ok;
                checks.push_back(std::move(row));
            }
        }
        if (!verified_all) *exit_code = exit_mismatch;
    }

    if (opts.json_format()) {
        json out = dgh::to_json(sol);
        if (!verify_ps.empty()) {
            out["verification"] = std::move(checks);
            out["verified"] = verified_all;
        }
        return out.dump(2) + "\n";
    }
    std::string out = "q,r,delta\n";
    for (const dgh::residue_triple& t : sol.triples())
        out += t.q.str() + "," + t.r.str() + "," + std::to_string(t.delta) + "\n";
    if (!verify_ps.empty()) out += std::string("# verified=") + (verified_all ? "1" : "0") + "\n";
    return out;
}

// --- enumerate ---------------------------------------------------------------

std::string run_enumerate(const global_options& opts, const std::string& path_text,
                          std::int64_t eps, const std::string& bound_text, bool oracle,
                          int* exit_code) {
    const dgh::map_params params = opts.params();
    const dgh::path_spec path = dgh::parse_path(path_text);
    const Int bound = parse_big(bound_text, "--bound");
    const dgh::structure_solution sol = dgh::solve_structure(params, path, eps);
    const std::vector<Int> members = dgh::enumerate_members(sol, bound);

    bool match = true;
    if (oracle) {
        match = members == dgh::brute_force_members(params, path, eps, bound);
        if (!match) *exit_code = exit_mismatch;
    }

    if (opts.json_format()) {
        json out;
        out["path"] = path.ks;
        out["epsilon"] = eps;
        out["bound"] = bound.str();
        json values = json::array();
        for (const Int& x : members) values.push_back(x.str());
        out["members"] = std::move(values);
        if (oracle) out["oracle_match"] = match;
        return out.dump(2) + "\n";
    }
    std::string out;
    for (const Int& x : members) out += x.str() + "\n";
    if (oracle) out += std::string("# oracle_match=") + (match ? "1" : "0") + "\n";
    return out;
}

// --- verify ------------------------------------------------------------------

std::string run_verify(const global_options& opts, const std::string& path_text, std::int64_t eps,
                       const std::string& bound_text, int* exit_code) {
    const dgh::map_params params = opts.params();
    const dgh::path_spec path = dgh::parse_path(path_text);
    const dgh::structure_solution sol = dgh::solve_structure(params, path, eps);
    const Int bound = bound_text.empty()
                          ? Int(3) * params.dg() *
                                dgh::pow_int(params.d(), static_cast<std::uint64_t>(path.k_total()))
                          : parse_big(bound_text, "--bound");

    const std::vector<Int> solver_members = dgh::enumerate_members(sol, bound);
    const std::vector<Int> oracle_members = dgh::brute_force_members(params, path, eps, bound);
    const bool members_ok = solver_members == oracle_members;
    const bool forward_ok = dgh::verify_solution(sol);
    const dgh::Rational prob = dgh::path_probability(params, path);
    const dgh::Rational oracle_prob = dgh::brute_force_path_probability(params, path);
    const bool probability_ok = prob == oracle_prob;
    const Int expected_count =
        dgh::pow_int(params.d() - 1, static_cast<std::uint64_t>(path.length()));
    const bool count_ok = Int(sol.triples().size()) == expected_count;
    const bool pass = members_ok && forward_ok && probability_ok && count_ok;
    if (!pass) *exit_code = exit_mismatch;

    if (opts.json_format()) {
        json out;
        out["path"] = path.ks;
        out["epsilon"] = eps;
        out["bound"] = bound.str();
        out["triple_count"] = sol.triples().size();
        out["count_ok"] = count_ok;
        out["members_ok"] = members_ok;
        out["forward_ok"] = forward_ok;
        out["probability"] = prob.str();
        out["oracle_probability"] = oracle_prob.str();
        out["probability_ok"] = probability_ok;
        out["pass"] = pass;
        return out.dump(2) + "\n";
    }
    std::string out = "check,pass\n";
    out += std::string("count,") + (count_ok ? "1" : "0") + "\n";
    out += std::string("members,") + (members_ok ? "1" : "0") + "\n";
    out += std::string("forward,") + (forward_ok ? "1" : "0") + "\n";
    out += std::string("probability,") + (probability_ok ? "1" : "0") + "\n";
    out += std::string("all,") + (pass ? "1" : "0") + "\n";
    return out;
}

// --- stats -------------------------------------------------------------------

std::string run_path_prob(const global_options& opts, const std::string& path_text) {
    const dgh::map_params params = opts.params();
    const dgh::path_spec path = dgh::parse_path(path_text);
    const dgh::Rational prob = dgh::path_probability(params, path);
    if (opts.json_format()) {
        json out;
        out["path"] = path.ks;
        out["probability"] = prob.str();
        return out.dump(2) + "\n";
    }
    return "numerator,denominator\n" + boost::multiprecision::numerator(prob).str() + "," +
           boost::multiprecision::denominator(prob).str() + "\n";
}

std::string run_moments(const global_options& opts, std::uint64_t m, bool empirical,
                        std::uint64_t n, const std::string& window_text) {
    const dgh::map_params params = opts.params();
    const dgh::rational_moments exact = dgh::k_sum_moments(params, m);

    std::optional<dgh::empirical_moments> measured;
    if (empirical) {
        const std::uint64_t seed = require_seed(opts);
        const dgh::density_spec window = parse_window(params, window_text, m);
        measured = dgh::empirical_k_sum_moments(params, m, window, n, seed, opts.threads);
    }

    if (opts.json_format()) {
        json out;
        out["m"] = m;
        out["mean"] = exact.mean.str();
        out["variance"] = exact.variance.str();
        if (measured) {
            out["n"] = n;
            out["empirical_mean"] = measured->mean;
            out["empirical_variance"] = measured->variance;
        }
        return out.dump(2) + "\n";
    }
    if (measured) {
        return "m,n,mean,variance,empirical_mean,empirical_variance\n" + std::to_string(m) + "," +
               std::to_string(n) + "," + exact.mean.str() + "," + exact.variance.str() + "," +
               dgh::format_double(measured->mean) + "," + dgh::format_double(measured->variance) +
               "\n";
    }
    return "m,mean,variance\n" + std::to_string(m) + "," + exact.mean.str() + "," +
           exact.variance.str() + "\n";
}

std::string run_drift(const global_options& opts, bool empirical, std::uint64_t m, std::uint64_t n,
                      const std::string& window_text) {
    const dgh::map_params params = opts.params();
    const dgh::drift_stats_t stats = dgh::drift_stats(params);
    const char* sign = stats.drift < 0 ? "negative" : "positive";

    std::optional<double> measured;
    if (empirical) {
        const std::uint64_t seed = require_seed(opts);
        const dgh::density_spec window = parse_window(params, window_text, m);
        measured = dgh::empirical_drift(params, m, window, n, seed, opts.threads);
    }

    if (opts.json_format()) {
        json out;
        out["d"] = params.d();
        out["g"] = params.g();
        out["drift"] = stats.drift;
        out["sign"] = sign;
        out["per_step_variance"] = stats.per_step_variance;
        out["k_mean"] = stats.k_mean;
        out["k_variance"] = stats.k_variance;
        if (measured) {
            out["m"] = m;
            out["n"] = n;
            out["empirical"] = *measured;
            out["abs_err"] = std::abs(*measured - stats.drift);
        }
        return out.dump(2) + "\n";
    }
    if (measured) return dgh::drift_run_csv(m, n, *measured, stats.drift);
    return "drift,sign,per_step_variance,k_mean,k_variance\n" + dgh::format_double(stats.drift) +
           "," + sign + "," + dgh::format_double(stats.per_step_variance) + "," +
           dgh::format_double(stats.k_mean) + "," + dgh::format_double(stats.k_variance) + "\n";
}

std::string run_increments(const global_options& opts, std::uint64_t m, std::uint64_t n,
                           const std::string& t_text, const std::string& window_text) {
    const dgh::map_params params = opts.params();
    const std::uint64_t seed = require_seed(opts);
    const dgh::partition_spec partition = dgh::make_partition(parse_doubles(t_text, "--t"), m);
    const dgh::density_spec window = parse_window(params, window_text, m);
    const dgh::increment_sample sample =
        dgh::sample_increments(params, partition, window, n, seed, opts.threads);

    const std::size_t r = sample.u.size();
    std::vector<double> d_stats(r);
    const double critical = dgh::ks_critical_alpha01(n);
    for (std::size_t i = 0; i < r; ++i) d_stats[i] = dgh::ks_statistic(sample.u[i]);

    if (opts.json_format()) {
        json out;
        out["m"] = m;
        out["n"] = n;
        out["seed"] = seed;
        out["t"] = partition.t_values;
        out["m_values"] = partition.m_values;
        json u = json::array();
        for (const auto& coord : sample.u) u.push_back(coord);
        out["u"] = std::move(u);
        json ks = json::array();
        for (std::size_t i = 0; i < r; ++i) {
            json row;
            row["i"] = i;
            row["D"] = d_stats[i];
            row["critical"] = critical;
            row["pass"] = d_stats[i] < critical;
            ks.push_back(std::move(row));
        }
        out["ks"] = std::move(ks);
        out["max_form_difference"] = sample.max_form_difference;
        return out.dump(2) + "\n";
    }
    std::string out = dgh::increments_csv(sample);
    for (std::size_t i = 0; i < r; ++i)
        out += "# ks i=" + std::to_string(i) + " D=" + dgh::format_double(d_stats[i]) +
               " critical=" + dgh::format_double(critical) +
               " pass=" + (d_stats[i] < critical ? "1" : "0") + "\n";
    out += "# max_form_difference=" + dgh::format_double(sample.max_form_difference) + "\n";
    return out;
}

std::string run_kdist(const global_options& opts, std::uint64_t m, std::uint64_t n,
                      const std::string& window_text) {
    const dgh::map_params params = opts.params();
    const std::uint64_t seed = require_seed(opts);
    const dgh::density_spec window = parse_window(params, window_text, m);
    const std::vector<Int> sample = dgh::sample_domain(params, window, n, seed);
    const dgh::k_histogram hist = dgh::empirical_k_distribution(params, m, sample, opts.threads);

    if (opts.json_format()) {
        json out;
        out["m"] = m;
        out["n"] = n;
        out["seed"] = seed;
        out["total"] = hist.total;
        json bins = json::array();
        const double d = static_cast<double>(params.d());
        for (const auto& [k, count] : hist.counts) {
            json row;
            row["k"] = k;
            row["count"] = count;
            row["expected"] =
                static_cast<double>(hist.total) * (d - 1.0) / std::pow(d, static_cast<double>(k));
            bins.push_back(std::move(row));
        }
        out["bins"] = std::move(bins);
        return out.dump(2) + "\n";
    }
    return dgh::k_histogram_csv(params, hist);
}

std::string run_stopping(const global_options& opts, std::uint64_t bound, std::uint64_t cap) {
    const dgh::map_params params = opts.params();
    const dgh::stopping_result result = dgh::stopping_density(params, bound, cap, opts.threads);
    if (opts.json_format()) {
        json out;
        out["bound"] = bound;
        out["cap"] = cap;
        out["total"] = result.total;
        out["stopped"] = result.stopped;
        out["fraction"] = result.fraction;
        return out.dump(2) + "\n";
    }
    return dgh::stopping_csv(bound, cap, result);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact iteration, path-class solving, and trajectory statistics of maps "
                 "T(x) = (g*x + h(g*x))/d^k"};
    // free the short name so --h can be the shift-table option
    app.set_help_flag("--help", "Print this help message and exit");
    app.require_subcommand(1);

    global_options opts;
    app.add_option("--d", opts.d, "Divisor base d >= 2");
    app.add_option("--g", opts.g, "Multiplier g > d, coprime to d");
    app.add_option("--h", opts.h_spec, "Shift table, e.g. '1=1' or '1=2,2=1'");
    app.add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--out", opts.out_path, "Write output to this file instead of stdout");
    app.add_option("--seed", opts.seed, "RNG seed (required by sampling subcommands)");
    app.add_option("--threads", opts.threads, "Worker threads (never affects output bytes)")
        ->envname("DGH_THREADS");

    // iterate
    std::string x_text;
    std::uint64_t iterate_m = 1;
    CLI::App* iterate = app.add_subcommand("iterate", "Print x, T(x), ..., T^m(x) and the path");
    iterate->add_option("--x", x_text, "Start value (arbitrary precision)")->required();
    iterate->add_option("--m", iterate_m, "Number of steps");

    // solve
    std::string solve_path, solve_verify;
    std::int64_t solve_eps = 0;
    CLI::App* solve = app.add_subcommand(
        "solve", "Solve for all progressions of x ≡ eps (mod dg) with the given path");
    solve->add_option("--path", solve_path, "Comma-separated exponents, e.g. 2,3")->required();
    solve->add_option("--eps", solve_eps, "Residue class in E")->required();
    solve->add_option("--verify", solve_verify,
                      "Comma-separated p values to check by direct iteration");

    // enumerate
    std::string enum_path, enum_bound;
    std::int64_t enum_eps = 0;
    bool enum_oracle = false;
    CLI::App* enumerate =
        app.add_subcommand("enumerate", "List all members up to a bound, smallest first");
    enumerate->add_option("--path", enum_path, "Comma-separated exponents")->required();
    enumerate->add_option("--eps", enum_eps, "Residue class in E")->required();
    enumerate->add_option("--bound", enum_bound, "Upper bound (inclusive)")->required();
    enumerate->add_flag("--oracle", enum_oracle, "Cross-check against brute-force scan");

    // verify
    std::string verify_path, verify_bound;
    std::int64_t verify_eps = 0;
    CLI::App* verify = app.add_subcommand(
        "verify", "Solve, then check members, images, and probability against brute force");
    verify->add_option("--path", verify_path, "Comma-separated exponents")->required();
    verify->add_option("--eps", verify_eps, "Residue class in E")->required();
    verify->add_option("--bound", verify_bound, "Scan bound (default 3·dg·d^k_total)");

    // stats
    CLI::App* stats = app.add_subcommand("stats", "Exact and Monte Carlo statistics");
    stats->require_subcommand(1);

    std::string pp_path;
    CLI::App* path_prob = stats->add_subcommand("path-prob", "Exact probability of a path");
    path_prob->add_option("--path", pp_path, "Comma-separated exponents")->required();

    std::uint64_t mom_m = 100, mom_n = 100000;
    bool mom_empirical = false;
    std::string mom_window;
    CLI::App* moments = stats->add_subcommand("moments", "Mean and variance of k_1+...+k_m");
    moments->add_option("--m", mom_m, "Steps per trajectory");
    moments->add_flag("--empirical", mom_empirical, "Also measure over sampled trajectories");
    moments->add_option("--n", mom_n, "Trajectories (with --empirical)");
    moments->add_option("--window", mom_window, "Sampling window LOW:HIGH (default automatic)");

    std::uint64_t drift_m = 1000, drift_n = 1000;
    bool drift_empirical = false;
    std::string drift_window;
    CLI::App* drift = stats->add_subcommand("drift", "Mean per-step change of ln x");
    drift->add_flag("--empirical", drift_empirical, "Also measure over sampled trajectories");
    drift->add_option("--m", drift_m, "Steps per trajectory (with --empirical)");
    drift->add_option("--n", drift_n, "Trajectories (with --empirical)");
    drift->add_option("--window", drift_window, "Sampling window LOW:HIGH (default automatic)");

    std::uint64_t inc_m = 10000, inc_n = 2000;
    std::string inc_t = "0,0.25,0.5,0.75,1", inc_window;
    CLI::App* increments =
        stats->add_subcommand("increments", "Normalized log-increments over a partition");
    increments->add_option("--m", inc_m, "Total steps per trajectory");
    increments->add_option("--n", inc_n, "Trajectories");
    increments->add_option("--t", inc_t, "Partition points 0=t_0<...<t_r=1");
    increments->add_option("--window", inc_window, "Sampling window LOW:HIGH (default automatic)");

    std::uint64_t kd_m = 100, kd_n = 1000;
    std::string kd_window;
    CLI::App* kdist = stats->add_subcommand("kdist", "Pooled histogram of division exponents");
    kdist->add_option("--m", kd_m, "Steps per trajectory");
    kdist->add_option("--n", kd_n, "Trajectories");
    kdist->add_option("--window", kd_window, "Sampling window LOW:HIGH (default automatic)");

    std::uint64_t stop_bound = 1000000, stop_cap = 1000;
    CLI::App* stopping =
        stats->add_subcommand("stopping", "Fraction of [1,bound] stopping within cap steps");
    stopping->add_option("--bound", stop_bound, "Scan every domain element up to this bound");
    stopping->add_option("--cap", stop_cap, "Iteration cap per element");

    // let --d/--seed/--threads/... appear before or after the subcommand
    for (CLI::App* sub : app.get_subcommands(nullptr)) {
        sub->fallthrough();
        for (CLI::App* nested : sub->get_subcommands(nullptr)) nested->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_params;
    }

    try {
        int exit_code = exit_ok;
        std::string output;
        if (*iterate) {
            output = run_iterate(opts, x_text, iterate_m);
        } else if (*solve) {
            output = run_solve(opts, solve_path, solve_eps, solve_verify, &exit_code);
        } else if (*enumerate) {
            output = run_enumerate(opts, enum_path, enum_eps, enum_bound, enum_oracle, &exit_code);
        } else if (*verify) {
            output = run_verify(opts, verify_path, verify_eps, verify_bound, &exit_code);
        } else if (*path_prob) {
            output = run_path_prob(opts, pp_path);
        } else if (*moments) {
            output = run_moments(opts, mom_m, mom_empirical, mom_n, mom_window);
        } else if (*drift) {
            output = run_drift(opts, drift_empirical, drift_m, drift_n, drift_window);
        } else if (*increments) {
            output = run_increments(opts, inc_m, inc_n, inc_t, inc_window);
        } else if (*kdist) {
            output = run_kdist(opts, kd_m, kd_n, kd_window);
        } else if (*stopping) {
            output = run_stopping(opts, stop_bound, stop_cap);
        }
        emit(opts, output);
        return exit_code;
    } catch (const dgh::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
}
