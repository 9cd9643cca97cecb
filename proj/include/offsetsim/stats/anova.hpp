#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace offsetsim::stats {

struct AnovaRow {
    std::string term;
    double sum_sq = 0.0;
    double df = 0.0;
    double f = 0.0;
    double p_parametric = 1.0;
    double p_permutation = -1.0;  // filled by permutation_p, -1 when not run
    double eta_sq = 0.0;
    double partial_eta_sq = 0.0;
};

// Two-way fixed-effects table with interaction, Type-II sums of squares.
// ss_total is the table total (effects + residual); eta_sq shares are taken
// against it, so they sum to 1 whenever ss_total > 0. For balanced designs it
// equals the corrected total sum of squares.
struct AnovaTable {
    std::vector<AnovaRow> effects;  // factor_a, factor_b, interaction
    AnovaRow residual;
    double ss_total = 0.0;
};

// value ~ C(a) + C(b) + C(a):C(b), least squares with treatment coding.
// Throws DataError on a rank-deficient design, naming the aliased term.
AnovaTable two_way_anova_type2(std::span<const double> values,
                               std::span<const std::string> factor_a,
                               std::span<const std::string> factor_b,
                               const std::string& name_a = "factor_a",
                               const std::string& name_b = "factor_b");

struct PermutationPValues {
    double factor_a = 1.0;
    double factor_b = 1.0;
    double interaction = 1.0;
};

// Shuffles the value column n_perm times with a seeded generator, refits the
// same model, and reports per effect the fraction of permuted F >= observed F
// (optionally with add-one smoothing). Pure function of (data, seed).
PermutationPValues permutation_p(std::span<const double> values,
                                 std::span<const std::string> factor_a,
                                 std::span<const std::string> factor_b, int n_perm,
                                 std::uint64_t seed, bool add_one_smoothing = false);

// Convenience: table with p_permutation columns filled in.
AnovaTable two_way_anova_with_permutation(std::span<const double> values,
                                          std::span<const std::string> factor_a,
                                          std::span<const std::string> factor_b, int n_perm,
                                          std::uint64_t seed,
                                          const std::string& name_a = "factor_a",
                                          const std::string& name_b = "factor_b");

}  // namespace offsetsim::stats
