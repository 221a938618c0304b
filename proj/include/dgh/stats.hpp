#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include "dgh/error.hpp"
#include "dgh/integer.hpp"
#include "dgh/map.hpp"
#include "dgh/rng.hpp"

namespace dgh {

// --- exact distribution ------------------------------------------------------

/// Probability that a uniformly chosen domain element has the given path:
/// exactly (d-1)^m / d^k_total. Each step contributes an independent factor
/// (d-1)/d^{k_j}.
inline Rational path_probability(const map_params& params, const path_spec& path) {
    Int numerator = pow_int(params.d() - 1, path.length());
    Int denominator = pow_int(params.d(), static_cast<std::uint64_t>(path.k_total()));
    return Rational(std::move(numerator), std::move(denominator));
}

struct rational_moments {
    Rational mean;
    Rational variance;
};

/// Exact mean and variance of k_1 + ... + k_m: the k_j are independent with
/// P(k = j) = (d-1)/d^j, so the sum has mean d·m/(d-1) and variance
/// d·m/(d-1)^2.
inline rational_moments k_sum_moments(const map_params& params, std::uint64_t m) {
    if (m < 1) fail(errc::domain_error, "m must be at least 1");
    const Int d = params.d();
    return {Rational(d * m, d - 1), Rational(d * m, (d - 1) * (d - 1))};
}

// --- drift and diffusion -----------------------------------------------------

struct drift_stats_t {
    double drift;             // ln g - d/(d-1)·ln d: mean per-step change of ln x
    double per_step_variance; // d/(d-1)^2 · (ln d)^2
    double k_mean;            // d/(d-1)
    double k_variance;        // d/(d-1)^2
};

inline drift_stats_t drift_stats(const map_params& params) {
    const double d = static_cast<double>(params.d());
    const double g = static_cast<double>(params.g());
    const double ln_d = std::log(d);
    drift_stats_t out;
    out.k_mean = d / (d - 1.0);
    out.k_variance = d / ((d - 1.0) * (d - 1.0));
    out.drift = std::log(g) - out.k_mean * ln_d;
    out.per_step_variance = out.k_variance * ln_d * ln_d;
    if (std::abs(out.drift) <= 1e-12)
        fail(errc::degenerate_drift, "ln g - d/(d-1)·ln d vanished numerically");
    return out;
}

// --- sampling windows --------------------------------------------------------

/// Inclusive window [low, high] to sample domain elements from. Its length
/// high - low + 1 must be a multiple of dg so that every residue class is
/// represented equally often.
struct density_spec {
    Int low;
    Int high;
};

inline void validate_window(const map_params& params, const density_spec& spec) {
    if (spec.low < 1) fail(errc::domain_error, "window must start at 1 or later");
    if (spec.high <= spec.low) fail(errc::domain_error, "window must satisfy low < high");
    if ((spec.high - spec.low + 1) % params.dg() != 0)
        fail(errc::domain_error,
             "window length must be a multiple of dg = " + std::to_string(params.dg()));
}

/// Number of domain elements in the window: |E| per block of dg integers.
inline Int window_member_count(const map_params& params, const density_spec& spec) {
    validate_window(params, spec);
    return (spec.high - spec.low + 1) / params.dg() * ((params.d() - 1) * (params.g() - 1));
}

/// Default window for trajectory statistics over m steps. The path of x is
/// a function of x mod dg·d^K where K is the total division exponent, so
/// samples must vary in at least K base-d digits or their paths correlate.
/// K over m steps concentrates at m·d/(d-1) with standard deviation
/// sqrt(m·d)/(d-1); the window length dg·d^B with B ten standard deviations
/// past the mean randomizes every digit that matters. The large start keeps
/// additive O(1) terms of ln x negligible against m·drift.
inline density_spec auto_window(const map_params& params, std::uint64_t m) {
    const double d = static_cast<double>(params.d());
    double bits = m * d / (d - 1.0) + 10.0 * std::sqrt(d * static_cast<double>(m)) / (d - 1.0);
    double floor_bits = std::log(1e6) / std::log(d); // never below a million blocks
    std::uint64_t B = static_cast<std::uint64_t>(std::ceil(std::max(bits, floor_bits)));
    density_spec spec;
    spec.low = 1000000000;
    spec.high = spec.low + Int(params.dg()) * pow_int(params.d(), B) - 1;
    return spec;
}

// --- parallel helper ---------------------------------------------------------

namespace detail {

/// Runs fn(thread_index, lo, hi) over a partition of [0, count) into at most
/// `threads` contiguous chunks. Results must be written to per-slot or
/// per-thread storage; chunk boundaries never affect what is computed for a
/// given slot, so output is identical for every thread count.
template <typename Fn>
void parallel_chunks(std::uint64_t count, unsigned threads, Fn&& fn) {
    if (threads < 1) threads = 1;
    if (threads > count) threads = static_cast<unsigned>(count == 0 ? 1 : count);
    if (threads == 1) {
        fn(0u, std::uint64_t(0), count);
        return;
    }
    const std::uint64_t chunk = (count + threads - 1) / threads;
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned t = 0; t < threads; ++t) {
        const std::uint64_t lo = t * chunk;
        const std::uint64_t hi = std::min(count, lo + chunk);
        if (lo >= hi) break;
        workers.emplace_back([&fn, &errors, t, lo, hi] {
            try {
                fn(t, lo, hi);
            } catch (...) {
                errors[t] = std::current_exception();
            }
        });
    }
    for (std::thread& w : workers) w.join();
    for (std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
}

} // namespace detail

// --- domain sampling ---------------------------------------------------------

/// n domain elements drawn uniformly without replacement from the window,
/// fully determined by the seed. Element j of a window block is recovered
/// from a flat index by splitting it into (block, residue-slot): the slot
/// picks a residue of E, the block places it. Selection is sequential by
/// sample slot (each slot draws from its own substream, retrying on
/// collision), so later parallel trajectory work cannot affect which
/// elements are chosen.
inline std::vector<Int> sample_domain(const map_params& params, const density_spec& spec,
                                      std::uint64_t n, std::uint64_t seed) {
    const Int count = window_member_count(params, spec);
    if (Int(n) > count)
        fail(errc::window_too_small, "window holds " + count.str() + " domain elements, need " +
                                         std::to_string(n));
    const residue_set E = residue_set_E(params);
    const std::int64_t e_size = static_cast<std::int64_t>(E.values.size());

    std::vector<Int> out;
    out.reserve(n);
    std::set<Int> chosen;
    for (std::uint64_t slot = 0; slot < n; ++slot) {
        split_mix64 rng = substream(seed, slot);
        Int index;
        do {
            index = uniform_int_below(rng, count);
        } while (!chosen.insert(index).second);
        const Int block = index / e_size;
        const auto residue_slot = static_cast<std::size_t>(Int(index % e_size).convert_to<std::int64_t>());
        Int x = spec.low + block * params.dg() +
                mod_floor(Int(E.values[residue_slot]) - spec.low, Int(params.dg()));
        DGH_CHECK(in_domain(params, x) && x >= spec.low && x <= spec.high,
                  "sampled element outside window or domain");
        out.push_back(std::move(x));
    }
    return out;
}

// --- pooled exponent histogram -------------------------------------------------

struct k_histogram {
    std::map<int, std::uint64_t> counts;
    std::uint64_t total = 0;
};

/// Pooled histogram of all m·|sample| division exponents observed along m
/// steps from every sample element. The marginal law is P(k) = (d-1)/d^k.
inline k_histogram empirical_k_distribution(const map_params& params, std::uint64_t m,
                                            const std::vector<Int>& sample, unsigned threads = 1) {
    const std::uint64_t n = sample.size();
    std::vector<std::map<int, std::uint64_t>> partial(std::max(1u, threads));
    detail::parallel_chunks(n, threads, [&](unsigned t, std::uint64_t lo, std::uint64_t hi) {
        std::map<int, std::uint64_t>& local = partial[t];
        for (std::uint64_t s = lo; s < hi; ++s) {
            Int current = sample[s];
            for (std::uint64_t i = 0; i < m; ++i) ++local[detail::step_in_place(params, current)];
        }
    });
    k_histogram out;
    for (const auto& local : partial) {
        for (const auto& [k, c] : local) {
            out.counts[k] += c;
            out.total += c;
        }
    }
    DGH_CHECK(out.total == m * n, "histogram mass mismatch");
    return out;
}

// --- normalized increments ---------------------------------------------------

/// Partition 0 = t_0 < t_1 < ... < t_r = 1 of m steps into r segments with
/// boundaries m_i = floor(t_i·m).
struct partition_spec {
    std::vector<double> t_values;
    std::uint64_t m = 0;
    std::vector<std::uint64_t> m_values;

    std::size_t segments() const { return t_values.empty() ? 0 : t_values.size() - 1; }
};

inline partition_spec make_partition(std::vector<double> t_values, std::uint64_t m) {
    if (m < 1) fail(errc::domain_error, "m must be at least 1");
    if (t_values.size() < 2) fail(errc::domain_error, "partition needs at least two t values");
    if (t_values.front() != 0.0 || t_values.back() != 1.0)
        fail(errc::domain_error, "partition must start at 0 and end at 1");
    partition_spec out;
    out.t_values = std::move(t_values);
    out.m = m;
    out.m_values.reserve(out.t_values.size());
    for (double t : out.t_values) {
        double v = t * static_cast<double>(m);
        // nudge up by a few ulps so that exact products are not floored down
        auto mi = static_cast<std::uint64_t>(
            std::floor(v * (1.0 + 4 * std::numeric_limits<double>::epsilon())));
        out.m_values.push_back(std::min<std::uint64_t>(mi, m));
    }
    for (std::size_t i = 1; i < out.m_values.size(); ++i) {
        if (out.t_values[i] <= out.t_values[i - 1])
            fail(errc::domain_error, "partition t values must be strictly increasing");
        if (out.m_values[i] <= out.m_values[i - 1])
            fail(errc::domain_error, "partition too fine: a segment received zero steps");
    }
    DGH_CHECK(out.m_values.front() == 0 && out.m_values.back() == m, "partition endpoints");
    return out;
}

/// Normalized log-increments over a partitioned trajectory. For segment i
/// spanning dm_i = m_{i+1} - m_i steps:
///
///   u[i]   = (ln x_{i+1} - ln x_i - dm_i·drift) / sqrt(per_step_variance·dm_i)
///   u_k[i] = (dm_i·k_mean - S_i) / sqrt(k_variance·dm_i),  S_i = sum of k in segment
///
/// Both forms estimate the same increment (they differ by the additive
/// remainders of ln x; the maximum observed difference is reported). Each
/// coordinate converges to a standard normal as m grows, independently
/// across segments. Indexing is u[segment][sample].
struct increment_sample {
    std::uint64_t n = 0;
    std::uint64_t seed = 0;
    std::vector<std::uint64_t> m_values;
    std::vector<std::vector<double>> u;
    std::vector<std::vector<double>> u_k;
    double max_form_difference = 0.0;
};

inline increment_sample sample_increments(const map_params& params, const partition_spec& partition,
                                          const density_spec& spec, std::uint64_t n,
                                          std::uint64_t seed, unsigned threads = 1) {
    if (partition.segments() == 0) fail(errc::domain_error, "empty partition");
    const std::vector<Int> samples = sample_domain(params, spec, n, seed);
    const drift_stats_t stats = drift_stats(params);
    const std::size_t r = partition.segments();

    increment_sample out;
    out.n = n;
    out.seed = seed;
    out.m_values = partition.m_values;
    out.u.assign(r, std::vector<double>(n, 0.0));
    out.u_k.assign(r, std::vector<double>(n, 0.0));

    std::vector<double> max_diff(std::max(1u, threads), 0.0);
    detail::parallel_chunks(n, threads, [&](unsigned t, std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t s = lo; s < hi; ++s) {
            Int current = samples[s];
            double ln_prev = big_ln(current);
            for (std::size_t i = 0; i < r; ++i) {
                const std::uint64_t dm = partition.m_values[i + 1] - partition.m_values[i];
                std::uint64_t k_sum = 0;
                for (std::uint64_t j = 0; j < dm; ++j)
                    k_sum += static_cast<std::uint64_t>(detail::step_in_place(params, current));
                const double ln_cur = big_ln(current);
                const double dmd = static_cast<double>(dm);
                const double u = (ln_cur - ln_prev - dmd * stats.drift) /
                                 std::sqrt(stats.per_step_variance * dmd);
                const double u_k = (dmd * stats.k_mean - static_cast<double>(k_sum)) /
                                   std::sqrt(stats.k_variance * dmd);
                out.u[i][s] = u;
                out.u_k[i][s] = u_k;
                max_diff[t] = std::max(max_diff[t], std::abs(u - u_k));
                ln_prev = ln_cur;
            }
        }
    });
    out.max_form_difference = *std::max_element(max_diff.begin(), max_diff.end());
    return out;
}

// --- empirical drift and k-sum moments ----------------------------------------

/// Mean over n sampled trajectories of (ln T^m(x) - ln x)/m. Converges to
/// the drift.
inline double empirical_drift(const map_params& params, std::uint64_t m, const density_spec& spec,
                              std::uint64_t n, std::uint64_t seed, unsigned threads = 1) {
    if (n < 1) fail(errc::empty_sample, "need at least one trajectory");
    const std::vector<Int> samples = sample_domain(params, spec, n, seed);
    std::vector<double> per_slot(n, 0.0);
    detail::parallel_chunks(n, threads, [&](unsigned, std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t s = lo; s < hi; ++s) {
            Int current = samples[s];
            const double ln_start = big_ln(current);
            for (std::uint64_t i = 0; i < m; ++i) detail::step_in_place(params, current);
            per_slot[s] = (big_ln(current) - ln_start) / static_cast<double>(m);
        }
    });
    // summed in slot order, never in thread-completion order
    double total = 0.0;
    for (double v : per_slot) total += v;
    return total / static_cast<double>(n);
}

struct empirical_moments {
    double mean;
    double variance; // unbiased (n-1 divisor)
};

/// Sample mean and variance of k_1 + ... + k_m over n trajectories.
inline empirical_moments empirical_k_sum_moments(const map_params& params, std::uint64_t m,
                                                 const density_spec& spec, std::uint64_t n,
                                                 std::uint64_t seed, unsigned threads = 1) {
    if (n < 2) fail(errc::empty_sample, "need at least two trajectories for a variance");
    const std::vector<Int> samples = sample_domain(params, spec, n, seed);
    std::vector<std::uint64_t> sums(n, 0);
    detail::parallel_chunks(n, threads, [&](unsigned, std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t s = lo; s < hi; ++s) {
            Int current = samples[s];
            std::uint64_t k_sum = 0;
            for (std::uint64_t i = 0; i < m; ++i)
                k_sum += static_cast<std::uint64_t>(detail::step_in_place(params, current));
            sums[s] = k_sum;
        }
    });
    double mean = 0.0;
    for (std::uint64_t s_val : sums) mean += static_cast<double>(s_val);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::uint64_t s_val : sums) {
        const double dev = static_cast<double>(s_val) - mean;
        ss += dev * dev;
    }
    return {mean, ss / static_cast<double>(n - 1)};
}

// --- Kolmogorov-Smirnov ------------------------------------------------------

/// Standard normal CDF. Computed as erfc(-x/sqrt(2))/2 with the C library's
/// erfc, whose absolute error is a few ulps — far inside the 1e-7 budget
/// this module requires of the approximation.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Sup-distance between the empirical CDF of the samples and the standard
/// normal CDF.
inline double ks_statistic(std::vector<double> samples) {
    if (samples.empty()) fail(errc::empty_sample, "KS statistic of an empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d_stat = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double cdf = normal_cdf(samples[i]);
        const double lo = static_cast<double>(i) / n;
        const double hi = static_cast<double>(i + 1) / n;
        d_stat = std::max(d_stat, std::max(cdf - lo, hi - cdf));
    }
    return d_stat;
}

/// Asymptotic critical value of the one-sample KS test at level alpha=0.01.
inline double ks_critical_alpha01(std::uint64_t n) {
    return 1.63 / std::sqrt(static_cast<double>(n));
}

/// Pearson correlation between two equally long sample vectors.
inline double sample_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.size() < 2)
        fail(errc::empty_sample, "correlation needs two equally sized samples");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0, saa = 0.0, sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (a[i] - ma) * (b[i] - mb);
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

// --- stopping times ----------------------------------------------------------

struct stopping_result {
    std::uint64_t total = 0;   // domain elements examined
    std::uint64_t stopped = 0; // of those, how many dropped below their start within cap steps
    double fraction = 0.0;
};

/// Fraction of domain elements in [1, bound] whose trajectory falls below
/// its starting point within cap steps.
inline stopping_result stopping_density(const map_params& params, std::uint64_t bound,
                                        std::uint64_t cap, unsigned threads = 1) {
    if (bound < static_cast<std::uint64_t>(params.dg()))
        fail(errc::domain_error, "bound must be at least dg");
    const std::uint64_t blocks =
        (bound + static_cast<std::uint64_t>(params.dg()) - 1) / params.dg();
    const residue_set E = residue_set_E(params);

    std::vector<std::uint64_t> totals(std::max(1u, threads), 0);
    std::vector<std::uint64_t> stopped(std::max(1u, threads), 0);
    detail::parallel_chunks(blocks, threads, [&](unsigned t, std::uint64_t lo, std::uint64_t hi) {
        for (std::uint64_t block = lo; block < hi; ++block) {
            for (std::int64_t e : E.values) {
                const std::uint64_t x64 =
                    block * static_cast<std::uint64_t>(params.dg()) + static_cast<std::uint64_t>(e);
                if (x64 > bound) continue;
                ++totals[t];
                if (stopping_time(params, Int(x64), cap)) ++stopped[t];
            }
        }
    });
    stopping_result out;
    for (std::uint64_t v : totals) out.total += v;
    for (std::uint64_t v : stopped) out.stopped += v;
    out.fraction = out.total == 0 ? 0.0 : static_cast<double>(out.stopped) / static_cast<double>(out.total);
    return out;
}

// --- text output -------------------------------------------------------------

/// 17 significant digits: enough to round-trip any double exactly.
inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// CSV "sample_id,i,u_i" rows for every sample and segment of an increment
/// run, in sample-major order.
inline std::string increments_csv(const increment_sample& sample) {
    std::string out = "sample_id,i,u_i\n";
    for (std::uint64_t s = 0; s < sample.n; ++s)
        for (std::size_t i = 0; i < sample.u.size(); ++i)
            out += std::to_string(s) + "," + std::to_string(i) + "," +
                   format_double(sample.u[i][s]) + "\n";
    return out;
}

/// CSV "k,count,expected" with the expected count n·m·(d-1)/d^k.
inline std::string k_histogram_csv(const map_params& params, const k_histogram& hist) {
    std::string out = "k,count,expected\n";
    const double d = static_cast<double>(params.d());
    for (const auto& [k, count] : hist.counts) {
        const double expected =
            static_cast<double>(hist.total) * (d - 1.0) / std::pow(d, static_cast<double>(k));
        out += std::to_string(k) + "," + std::to_string(count) + "," + format_double(expected) +
               "\n";
    }
    return out;
}

/// CSV "m,n,empirical,theoretical,abs_err" one-row summary of a drift run.
inline std::string drift_run_csv(std::uint64_t m, std::uint64_t n, double empirical,
                                 double theoretical) {
    return "m,n,empirical,theoretical,abs_err\n" + std::to_string(m) + "," + std::to_string(n) +
           "," + format_double(empirical) + "," + format_double(theoretical) + "," +
           format_double(std::abs(empirical - theoretical)) + "\n";
}

/// CSV "bound,cap,fraction" one-row summary of a stopping-time run.
inline std::string stopping_csv(std::uint64_t bound, std::uint64_t cap,
                                const stopping_result& result) {
    return "bound,cap,fraction\n" + std::to_string(bound) + "," + std::to_string(cap) + "," +
           format_double(result.fraction) + "\n";
}

} // namespace dgh
