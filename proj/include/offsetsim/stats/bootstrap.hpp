#pragma once

#include <cstdint>
#include <functional>
#include <span>

namespace offsetsim::stats {

struct BootstrapInterval {
    double lower = 0.0;
    double upper = 0.0;
};

double mean_of(std::span<const double> values);

// Percentile interval over n_boot seeded resamples with replacement. Pure
// function of (values, statistic, n_boot, level, seed); resample streams are
// keyed per iteration so the result is independent of evaluation order.
BootstrapInterval bootstrap_ci(std::span<const double> values, std::uint64_t seed,
                               int n_boot = 5000, double level = 0.95,
                               const std::function<double(std::span<const double>)>& statistic =
                                   [](std::span<const double> v) { return mean_of(v); });

}  // namespace offsetsim::stats
