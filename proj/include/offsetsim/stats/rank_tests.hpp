#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace offsetsim::stats {

// One hypothesis-test invocation. `effect_size` carries rank-biserial
// r = |z|/sqrt(n) for the rank tests and Kendall's W for Friedman.
struct TestResult {
    double statistic = 0.0;  // U, W, or chi-square
    double z = 0.0;
    double p_two_sided = 1.0;
    double effect_size = 0.0;
    std::vector<std::size_t> n_values;  // {n1, n2}, {n pairs}, or {n, k}
    double mean_diff = 0.0;             // mean(x) - mean(y); sign carrier for directional reads
};

// Average ranks (1-based); ties share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

// Sum of t*(t^2-1) over tie groups; the tie term used by the variance
// corrections below.
long long tie_term(std::span<const double> values);

// Two-sided Mann-Whitney U with the large-sample normal approximation and no
// continuity correction. The statistic is U for `x` under average-rank
// assignment. sigma_U omits the tie correction by default; pass
// tie_corrected=true for the sensitivity variant.
TestResult mann_whitney(std::span<const double> x, std::span<const double> y,
                        bool tie_corrected = false);

// Two-sided Wilcoxon signed-rank, normal approximation, zero differences
// rank-split between the positive and negative sums. The statistic is
// min(W+, W-); z is signed accordingly (<= 0).
TestResult wilcoxon_signed_rank(std::span<const double> x, std::span<const double> y);

// Friedman chi-square over an n-subjects x k-conditions matrix with the
// tie-corrected statistic; p from the chi-square law with k-1 df;
// effect_size is Kendall's W = chi2 / (n*(k-1)).
TestResult friedman(const std::vector<std::vector<double>>& matrix);

// The published-effect-size identities.
double rank_biserial_r(double z, std::size_t n);
double kendall_w(double chi2, std::size_t n, std::size_t k);

}  // namespace offsetsim::stats
