#include "offsetsim/stats/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "offsetsim/errors.hpp"
#include "offsetsim/rng.hpp"

namespace offsetsim::stats {

double mean_of(std::span<const double> values) {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

namespace {

// linear-interpolated empirical quantile over a sorted vector
double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double h = q * static_cast<double>(sorted.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

BootstrapInterval bootstrap_ci(std::span<const double> values, std::uint64_t seed, int n_boot,
                               double level,
                               const std::function<double(std::span<const double>)>& statistic) {
    if (values.empty()) throw DataError("bootstrap_ci: empty input");
    if (n_boot < 1) throw ConfigError("bootstrap_ci: n_boot must be >= 1");
    if (!(level > 0.0 && level < 1.0)) throw ConfigError("bootstrap_ci: level must be in (0,1)");

    const std::size_t n = values.size();
    std::vector<double> stats(static_cast<std::size_t>(n_boot));
    std::vector<double> resample(n);
    for (int b = 0; b < n_boot; ++b) {
        SplitMix rng(seed_mix(seed, static_cast<std::uint64_t>(b) + 0xB007ULL));
        for (std::size_t i = 0; i < n; ++i)
            resample[i] = values[static_cast<std::size_t>(rng.next_below(n))];
        stats[static_cast<std::size_t>(b)] = statistic(resample);
    }
    std::sort(stats.begin(), stats.end());
    const double alpha = 1.0 - level;
    return {quantile_sorted(stats, alpha / 2.0), quantile_sorted(stats, 1.0 - alpha / 2.0)};
}

}  // namespace offsetsim::stats
