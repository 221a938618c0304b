// End-to-end acceptance checks. Each numbered check prints one PASS/FAIL
// line; the process exit code is the number of failures. argv[1] must be
// the path of the command-line binary (used by the determinism check).
#include <dgh/dgh.hpp>

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

int failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail) {
    std::printf("[%s] %d: %s%s%s%s\n", pass ? "PASS" : "FAIL", index, name.c_str(),
                detail.empty() ? "" : " (", detail.c_str(), detail.empty() ? "" : ")");
    std::fflush(stdout);
    if (!pass) ++failures;
}

unsigned worker_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : std::min(hw, 8u);
}

std::string fmt(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

std::vector<dgh::path_spec> all_paths(std::size_t m, int k_max) {
    std::vector<dgh::path_spec> out;
    std::vector<int> ks(m, 1);
    for (;;) {
        out.emplace_back(ks);
        std::size_t pos = 0;
        while (pos < m && ks[pos] == k_max) ks[pos++] = 1;
        if (pos == m) break;
        ++ks[pos];
    }
    return out;
}

// --- 1: worked example ---------------------------------------------------------

void check_worked_example() {
    bool ok = true;
    std::string detail;
    try {
        const auto params = dgh::validate_params(2, 3, {{1, 1}});
        const auto sol = dgh::solve_structure(params, dgh::path_spec({2, 3}), 5);
        ok = ok && sol.triples().size() == 1;
        ok = ok && sol.triples()[0].q == 2 && sol.triples()[0].r == 0 &&
             sol.triples()[0].delta == 5;
        ok = ok && sol.member(0, 0) == 17 && sol.member(0, 1) == 209;
        ok = ok && dgh::image_of(sol, 0, dgh::Int(0)) == 5 &&
             dgh::image_of(sol, 0, dgh::Int(1)) == 59;
        ok = ok && dgh::trajectory(params, 17, 2) == std::vector<dgh::Int>{17, 13, 5};
        ok = ok && dgh::trajectory(params, 209, 2) == std::vector<dgh::Int>{209, 157, 59};
        ok = ok && dgh::path(params, 17, 2) == dgh::path_spec({2, 3});
        ok = ok && dgh::path(params, 209, 2) == dgh::path_spec({2, 3});
        detail = ok ? "triple (2,0,5); members 17,209; images 5,59; trajectories 17,13,5 / 209,157,59"
                    : "a value differs from the published example";
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(1, "two-step worked example reproduced exactly", ok, detail);
}

// --- 2 and 3: solver vs exhaustive scan, exact path probability -----------------

struct sweep_outcome {
    bool ok_members = true;
    bool ok_probability = true;
    std::string err_members;
    std::string err_probability;
    std::uint64_t classes = 0;
    std::uint64_t paths = 0;
};

sweep_outcome run_config_sweep(const dgh::map_params& params) {
    sweep_outcome out;
    const auto E = dgh::residue_set_E(params);
    for (std::size_t m = 1; m <= 3; ++m) {
        const dgh::Int expected_count =
            dgh::pow_int(params.d() - 1, static_cast<std::uint64_t>(m));
        for (const auto& path : all_paths(m, 4)) {
            const dgh::Int bound =
                3 * params.dg() *
                dgh::pow_int(params.d(), static_cast<std::uint64_t>(path.k_total()));

            if (out.ok_probability) {
                if (dgh::brute_force_path_probability(params, path) !=
                    dgh::path_probability(params, path)) {
                    out.ok_probability = false;
                    out.err_probability = "census != closed form at d=" +
                                          std::to_string(params.d()) +
                                          " g=" + std::to_string(params.g()) + " path " +
                                          dgh::format_path(path);
                }
            }
            ++out.paths;

            for (std::int64_t eps : E.values) {
                if (!out.ok_members) break;
                const auto sol = dgh::solve_structure(params, path, eps);
                const auto solved = dgh::enumerate_members(sol, bound);
                const auto scanned = dgh::brute_force_members(params, path, eps, bound);
                if (dgh::Int(sol.triples().size()) != expected_count || solved != scanned) {
                    out.ok_members = false;
                    out.err_members = "mismatch at d=" + std::to_string(params.d()) +
                                      " g=" + std::to_string(params.g()) + " path " +
                                      dgh::format_path(path) + " eps=" + std::to_string(eps);
                }
                ++out.classes;
            }
        }
    }
    return out;
}

void check_sweeps() {
    const std::vector<dgh::map_params> configs{
        dgh::validate_params(2, 3, {{1, 1}}),
        dgh::validate_params(2, 5, {{1, 1}}),
        dgh::validate_params(3, 4, {{1, 2}, {2, 1}}),
        dgh::validate_params(3, 5, {{1, 2}, {2, 1}}),
    };
    std::vector<sweep_outcome> outcomes(configs.size());
    std::vector<std::thread> workers;
    workers.reserve(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
        workers.emplace_back([&configs, &outcomes, i] {
            try {
                outcomes[i] = run_config_sweep(configs[i]);
            } catch (const std::exception& e) {
                outcomes[i].ok_members = false;
                outcomes[i].ok_probability = false;
                outcomes[i].err_members = outcomes[i].err_probability = e.what();
            }
        });
    }
    for (auto& w : workers) w.join();

    bool ok2 = true, ok3 = true;
    std::string err2, err3;
    std::uint64_t classes = 0, paths = 0;
    for (const auto& o : outcomes) {
        if (!o.ok_members && err2.empty()) err2 = o.err_members;
        if (!o.ok_probability && err3.empty()) err3 = o.err_probability;
        ok2 = ok2 && o.ok_members;
        ok3 = ok3 && o.ok_probability;
        classes += o.classes;
        paths += o.paths;
    }
    report(2, "solver equals exhaustive scan on every class", ok2,
           ok2 ? std::to_string(classes) + " (path, residue) classes over 4 maps, m <= 3, k <= 4"
               : err2);
    report(3, "exact path probability equals full census", ok3,
           ok3 ? std::to_string(paths) + " paths over 4 maps as exact rationals" : err3);
}

// --- 4: moments of the exponent sum ---------------------------------------------

void check_moments() {
    bool ok = true;
    std::string detail;
    try {
        const auto params = dgh::validate_params(2, 3, {{1, 1}});
        const std::uint64_t m = 100, n = 100000;
        const auto window = dgh::auto_window(params, m);
        const auto mom =
            dgh::empirical_k_sum_moments(params, m, window, n, 20260818, worker_threads());
        const double se = std::sqrt(200.0 / static_cast<double>(n));
        const bool mean_ok = std::abs(mom.mean - 200.0) <= 3.0 * se;
        const bool var_ok = std::abs(mom.variance - 200.0) <= 10.0;
        ok = mean_ok && var_ok;
        detail = "mean=" + fmt(mom.mean) + " target 200 +- " + fmt(3.0 * se) +
                 "; variance=" + fmt(mom.variance) + " target 200 +- 10";
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(4, "exponent-sum mean and variance over 100000 trajectories", ok, detail);
}

// --- 5: normality of increments --------------------------------------------------

void check_increments() {
    bool ok = true;
    std::string detail;
    try {
        const auto params = dgh::validate_params(2, 3, {{1, 1}});
        const std::uint64_t m = 10000, n = 2000;
        const auto partition = dgh::make_partition({0.0, 0.25, 0.5, 0.75, 1.0}, m);
        const auto window = dgh::auto_window(params, m);
        const auto inc = dgh::sample_increments(params, partition, window, n, 42, worker_threads());
        const double d_crit = dgh::ks_critical_alpha01(n);
        const double c_crit = 3.0 / std::sqrt(static_cast<double>(n));

        std::string ds, cs;
        for (std::size_t i = 0; i < inc.u.size(); ++i) {
            const double d_stat = dgh::ks_statistic(inc.u[i]);
            ok = ok && d_stat < d_crit;
            ds += (i ? "," : "") + fmt(d_stat);
        }
        double max_corr = 0.0;
        for (std::size_t i = 0; i < inc.u.size(); ++i)
            for (std::size_t j = i + 1; j < inc.u.size(); ++j)
                max_corr = std::max(max_corr,
                                    std::abs(dgh::sample_correlation(inc.u[i], inc.u[j])));
        ok = ok && max_corr < c_crit;
        detail = "KS D=" + ds + " < " + fmt(d_crit) + "; max |corr|=" + fmt(max_corr) + " < " +
                 fmt(c_crit);
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(5, "four normalized increments pass KS normality, uncorrelated", ok, detail);
}

// --- 6: drift ----------------------------------------------------------------------

void check_drift() {
    bool ok = true;
    std::string detail;
    try {
        const std::uint64_t m = 1000, n = 1000;
        const auto p3 = dgh::validate_params(2, 3, {{1, 1}});
        const auto p5 = dgh::validate_params(2, 5, {{1, 1}});
        const double e3 =
            dgh::empirical_drift(p3, m, dgh::auto_window(p3, m), n, 2026, worker_threads());
        const double e5 =
            dgh::empirical_drift(p5, m, dgh::auto_window(p5, m), n, 2027, worker_threads());
        const double t3 = -0.2876821, t5 = 0.2231436;
        ok = std::abs(e3 - t3) <= 0.1 * std::abs(t3) && std::abs(e5 - t5) <= 0.1 * std::abs(t5);
        ok = ok && (e3 < 0) == (dgh::drift_stats(p3).drift < 0) &&
             (e5 > 0) == (dgh::drift_stats(p5).drift > 0);
        detail = "measured " + fmt(e3, 6) + " vs " + fmt(t3, 6) + " and " + fmt(e5, 6) + " vs " +
                 fmt(t5, 6) + ", both within 10%, signs match";
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(6, "empirical drift matches ln g - d/(d-1) ln d for both signs", ok, detail);
}

// --- 7: stopping-time density -------------------------------------------------------

void check_stopping() {
    bool ok = true;
    std::string detail;
    try {
        const auto p3 = dgh::validate_params(2, 3, {{1, 1}});
        const auto p5 = dgh::validate_params(2, 5, {{1, 1}});
        const auto r3 = dgh::stopping_density(p3, 1000000, 1000, worker_threads());
        const auto r5 = dgh::stopping_density(p5, 1000000, 1000, worker_threads());
        ok = r3.fraction >= 0.99 && r5.fraction < r3.fraction;
        detail = "contracting map " + fmt(r3.fraction, 6) + " >= 0.99; expanding map " +
                 fmt(r5.fraction, 6) + " strictly smaller";
    } catch (const std::exception& e) {
        ok = false;
        detail = e.what();
    }
    report(7, "stopping within 1000 steps is near-universal only under negative drift", ok,
           detail);
}

// --- 8: byte determinism of the CLI ---------------------------------------------------

std::optional<std::string> run_command(const std::string& cmd) {
    FILE* pipe = popen(cmd.c_str(), "r");
    if (pipe == nullptr) return std::nullopt;
    std::string out;
    char buf[4096];
    std::size_t got = 0;
    while ((got = std::fread(buf, 1, sizeof(buf), pipe)) > 0) out.append(buf, got);
    if (pclose(pipe) != 0) return std::nullopt;
    return out;
}

void check_cli_determinism(const char* cli_path) {
    bool ok = true;
    std::string detail;
    if (cli_path == nullptr) {
        report(8, "CLI output is byte-identical across thread counts and reruns", false,
               "command-line binary path not passed as argv[1]");
        return;
    }
    const std::string cli = std::string("\"") + cli_path + "\"";
    const std::vector<std::string> runs{
        " --seed 7 stats increments --m 2000 --n 200 --t 0,0.5,1",
        " --seed 11 stats kdist --m 200 --n 500",
        " --seed 3 stats drift --empirical --m 300 --n 200",
        " --seed 5 stats moments --empirical --m 50 --n 400",
        " --seed 9 --format csv stats increments --m 500 --n 100 --t 0,0.5,1",
    };
    std::size_t checked = 0;
    for (const auto& args : runs) {
        const auto one = run_command(cli + " --threads 1" + args);
        const auto four = run_command(cli + " --threads 4" + args);
        const auto again = run_command(cli + " --threads 4" + args);
        if (!one || !four || !again || one->empty()) {
            ok = false;
            detail = "command failed:" + args;
            break;
        }
        if (*one != *four || *four != *again) {
            ok = false;
            detail = "output differs for:" + args;
            break;
        }
        ++checked;
    }
    if (ok) detail = std::to_string(checked) + " seeded subcommands, threads 1 vs 4 plus rerun";
    report(8, "CLI output is byte-identical across thread counts and reruns", ok, detail);
}

} // namespace

int main(int argc, char** argv) {
    check_worked_example();
    check_sweeps();
    check_moments();
    check_increments();
    check_drift();
    check_stopping();
    check_cli_determinism(argc > 1 ? argv[1] : nullptr);
    if (failures == 0)
        std::printf("all 8 checks passed\n");
    else
        std::printf("%d check(s) failed\n", failures);
    return failures;
}
