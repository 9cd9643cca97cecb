// Brute-force reference implementations for the rank tests. These compute the
// statistics from their combinatorial definitions and p-values by full
// enumeration of the null, independently of the library's rank-based code.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

namespace oracles {

struct ExactTest {
    double statistic = 0.0;
    double p_two_sided = 1.0;
};

// U for x counted directly over pairs: wins + half-ties.
inline double mw_u_direct(const std::vector<double>& x, const std::vector<double>& y) {
    double u = 0.0;
    for (double xi : x)
        for (double yj : y) {
            if (xi > yj)
                u += 1.0;
            else if (xi == yj)
                u += 0.5;
        }
    return u;
}

// Exact two-sided p over all C(n1+n2, n1) group assignments of the pooled
// sample: 2 * min(P(U' <= U), P(U' >= U)), capped at 1.
inline ExactTest mw_exact(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n1 = x.size(), n = x.size() + y.size();
    std::vector<double> pooled(x);
    pooled.insert(pooled.end(), y.begin(), y.end());

    const double u_obs = mw_u_direct(x, y);
    long long total = 0, le = 0, ge = 0;
    std::vector<bool> pick(n, false);
    std::fill(pick.begin(), pick.begin() + static_cast<long>(n1), true);
    std::sort(pick.begin(), pick.end());  // start at the lexicographically first mask
    do {
        std::vector<double> gx, gy;
        for (std::size_t i = 0; i < n; ++i) (pick[i] ? gx : gy).push_back(pooled[i]);
        const double u = mw_u_direct(gx, gy);
        ++total;
        if (u <= u_obs + 1e-12) ++le;
        if (u >= u_obs - 1e-12) ++ge;
    } while (std::next_permutation(pick.begin(), pick.end()));

    ExactTest r;
    r.statistic = u_obs;
    r.p_two_sided = std::min(1.0, 2.0 * std::min(le, ge) / static_cast<double>(total));
    return r;
}

// Average ranks of |d| computed by counting, not sorting-based library code.
inline std::vector<double> abs_ranks_direct(const std::vector<double>& d) {
    const std::size_t n = d.size();
    std::vector<double> r(n);
    for (std::size_t i = 0; i < n; ++i) {
        double below = 0.0, tied = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::fabs(d[j]) < std::fabs(d[i])) below += 1.0;
            if (std::fabs(d[j]) == std::fabs(d[i])) tied += 1.0;
        }
        r[i] = below + 0.5 * (tied + 1.0);
    }
    return r;
}

// min(W+, W-) from signed ranks; zero differences are assumed absent.
inline double wilcoxon_w_direct(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = x[i] - y[i];
    const std::vector<double> r = abs_ranks_direct(d);
    double wp = 0.0, wm = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) (d[i] > 0.0 ? wp : wm) += r[i];
    return std::min(wp, wm);
}

// Exact two-sided p by enumerating all 2^n sign assignments of the observed
// absolute differences.
inline ExactTest wilcoxon_exact(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = x[i] - y[i];
    const std::vector<double> ranks = abs_ranks_direct(d);

    double wp_obs = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (d[i] > 0.0) wp_obs += ranks[i];

    double rank_total = 0.0;
    for (double r : ranks) rank_total += r;

    long long le = 0, ge = 0;
    const std::uint64_t combos = 1ULL << n;
    for (std::uint64_t mask = 0; mask < combos; ++mask) {
        double wp = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1ULL << i)) wp += ranks[i];
        if (wp <= wp_obs + 1e-12) ++le;
        if (wp >= wp_obs - 1e-12) ++ge;
    }

    ExactTest r;
    r.statistic = std::min(wp_obs, rank_total - wp_obs);
    r.p_two_sided = std::min(1.0, 2.0 * std::min(le, ge) / static_cast<double>(combos));
    return r;
}

// Tie-corrected Friedman chi-square as one exact integer ratio.
inline double friedman_chi2_direct(const std::vector<std::vector<double>>& m) {
    const long long n = static_cast<long long>(m.size());
    const long long k = static_cast<long long>(m.front().size());
    std::vector<long long> col2(static_cast<std::size_t>(k), 0);
    long long ties = 0;
    for (const auto& row : m) {
        for (std::size_t j = 0; j < row.size(); ++j) {
            long long below2 = 0, tied = 0;
            for (double v : row) {
                if (v < row[j]) below2 += 2;
                if (v == row[j]) ++tied;
            }
            col2[j] += below2 + tied + 1;  // twice the average rank
        }
        std::vector<double> sorted(row);
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < sorted.size()) {
            std::size_t j2 = i;
            while (j2 + 1 < sorted.size() && sorted[j2 + 1] == sorted[i]) ++j2;
            const long long t = static_cast<long long>(j2 - i + 1);
            ties += t * (t * t - 1);
            i = j2 + 1;
        }
    }
    long long s4 = 0;
    for (long long c : col2) s4 += c * c;
    const long long denom = n * k * (k * k - 1) - ties;
    if (denom == 0) return 0.0;
    const long long num = 3 * (s4 - n * n * k * (k + 1) * (k + 1)) * (k - 1);
    return static_cast<double>(num) / static_cast<double>(denom);
}

// Exact p over all (k!)^n within-row permutations of the observed values.
inline ExactTest friedman_exact(const std::vector<std::vector<double>>& m) {
    const std::size_t n = m.size(), k = m.front().size();
    const double chi2_obs = friedman_chi2_direct(m);

    std::vector<std::vector<std::vector<double>>> row_perms(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row = m[i];
        std::sort(row.begin(), row.end());
        do {
            row_perms[i].push_back(row);
        } while (std::next_permutation(row.begin(), row.end()));
    }

    long long total = 0, ge = 0;
    std::vector<std::size_t> pick(n, 0);
    std::vector<std::vector<double>> work(n, std::vector<double>(k));
    while (true) {
        for (std::size_t i = 0; i < n; ++i) work[i] = row_perms[i][pick[i]];
        ++total;
        if (friedman_chi2_direct(work) >= chi2_obs - 1e-12) ++ge;
        std::size_t pos = 0;
        while (pos < n) {
            if (++pick[pos] < row_perms[pos].size()) break;
            pick[pos] = 0;
            ++pos;
        }
        if (pos == n) break;
    }

    ExactTest r;
    r.statistic = chi2_obs;
    r.p_two_sided = static_cast<double>(ge) / static_cast<double>(total);
    return r;
}

}  // namespace oracles
