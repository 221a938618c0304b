// Drift and diffusion of ln x under T(x) = (gx + h(gx))/d^k, exact constants
// next to Monte Carlo measurements. Negative drift (3x+1) pulls trajectories
// down; positive drift (5x+1) pushes them to infinity — visible directly in
// the measured stopping fractions.
#include <dgh/dgh.hpp>

#include <cstdio>
#include <map>

int main() {
    struct row {
        std::int64_t d, g;
        std::map<std::int64_t, std::int64_t> h;
    };
    const row rows[] = {
        {2, 3, {{1, 1}}},
        {2, 5, {{1, 1}}},
        {2, 7, {{1, 1}}},
        {3, 4, {{1, 2}, {2, 1}}},
        {3, 5, {{1, 2}, {2, 1}}},
    };

    std::printf("%4s %4s  %12s %12s  %14s\n", "d", "g", "drift", "diffusion", "measured drift");
    for (const row& r : rows) {
        const auto params = dgh::validate_params(r.d, r.g, r.h);
        const auto stats = dgh::drift_stats(params);
        const std::uint64_t m = 400, n = 200;
        const double measured =
            dgh::empirical_drift(params, m, dgh::auto_window(params, m), n, 1, 4);
        std::printf("%4lld %4lld  %12.7f %12.7f  %14.7f\n", static_cast<long long>(r.d),
                    static_cast<long long>(r.g), stats.drift, stats.per_step_variance, measured);
    }

    std::printf("\nFraction of starts in [1, 100000] dropping below their start within 500 steps:\n");
    const auto p3 = dgh::validate_params(2, 3, {{1, 1}});
    const auto p5 = dgh::validate_params(2, 5, {{1, 1}});
    const auto s3 = dgh::stopping_density(p3, 100000, 500, 4);
    const auto s5 = dgh::stopping_density(p5, 100000, 500, 4);
    std::printf("  3x+1 (drift < 0): %.4f of %llu\n", s3.fraction,
                static_cast<unsigned long long>(s3.total));
    std::printf("  5x+1 (drift > 0): %.4f of %llu\n", s5.fraction,
                static_cast<unsigned long long>(s5.total));
    return 0;
}
