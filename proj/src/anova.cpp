#include "offsetsim/stats/anova.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "offsetsim/errors.hpp"
#include "offsetsim/rng.hpp"
#include "offsetsim/stats/distributions.hpp"
#include "offsetsim/stats/linalg.hpp"

namespace offsetsim::stats {

namespace {

std::vector<std::string> sorted_levels(std::span<const std::string> labels) {
    std::vector<std::string> lv(labels.begin(), labels.end());
    std::sort(lv.begin(), lv.end());
    lv.erase(std::unique(lv.begin(), lv.end()), lv.end());
    return lv;
}

// Full design in a fixed column order: intercept, A dummies, B dummies,
// interaction dummies (treatment coding, first level dropped). Submodels are
// column subsets of this layout.
struct Design {
    Matrix x;                        // n x p full design
    std::vector<std::string> names;  // column labels for diagnostics
    std::size_t n_a = 0, n_b = 0;    // level counts
    std::vector<std::size_t> cols_a, cols_b, cols_ab;  // column indices per term

    std::vector<std::size_t> model_columns(bool with_a, bool with_b, bool with_ab) const {
        std::vector<std::size_t> cols{0};
        if (with_a) cols.insert(cols.end(), cols_a.begin(), cols_a.end());
        if (with_b) cols.insert(cols.end(), cols_b.begin(), cols_b.end());
        if (with_ab) cols.insert(cols.end(), cols_ab.begin(), cols_ab.end());
        return cols;
    }
};

Design build_design(std::span<const std::string> fa, std::span<const std::string> fb,
                    const std::string& name_a, const std::string& name_b) {
    const std::size_t n = fa.size();
    if (n == 0 || fb.size() != n) throw DataError("anova: factor lengths must match values");
    const std::vector<std::string> la = sorted_levels(fa);
    const std::vector<std::string> lb = sorted_levels(fb);
    if (la.size() < 2) throw DataError("anova: factor '" + name_a + "' has fewer than 2 levels");
    if (lb.size() < 2) throw DataError("anova: factor '" + name_b + "' has fewer than 2 levels");

    std::map<std::string, std::size_t> ia, ib;
    for (std::size_t i = 0; i < la.size(); ++i) ia[la[i]] = i;
    for (std::size_t i = 0; i < lb.size(); ++i) ib[lb[i]] = i;

    Design d;
    d.n_a = la.size();
    d.n_b = lb.size();
    const std::size_t da = la.size() - 1, db = lb.size() - 1;
    const std::size_t p = 1 + da + db + da * db;
    d.x = Matrix(n, p);
    d.names.resize(p);
    d.names[0] = "intercept";
    for (std::size_t j = 0; j < da; ++j) {
        d.cols_a.push_back(1 + j);
        d.names[1 + j] = name_a + "[" + la[j + 1] + "]";
    }
    for (std::size_t j = 0; j < db; ++j) {
        d.cols_b.push_back(1 + da + j);
        d.names[1 + da + j] = name_b + "[" + lb[j + 1] + "]";
    }
    for (std::size_t ja = 0; ja < da; ++ja)
        for (std::size_t jb = 0; jb < db; ++jb) {
            const std::size_t c = 1 + da + db + ja * db + jb;
            d.cols_ab.push_back(c);
            d.names[c] = name_a + "[" + la[ja + 1] + "]:" + name_b + "[" + lb[jb + 1] + "]";
        }

    for (std::size_t i = 0; i < n; ++i) {
        d.x.at(i, 0) = 1.0;
        const std::size_t a = ia[std::string(fa[i])];
        const std::size_t b = ib[std::string(fb[i])];
        if (a > 0) d.x.at(i, d.cols_a[a - 1]) = 1.0;
        if (b > 0) d.x.at(i, d.cols_b[b - 1]) = 1.0;
        if (a > 0 && b > 0) d.x.at(i, d.cols_ab[(a - 1) * db + (b - 1)]) = 1.0;
    }
    return d;
}

Matrix submatrix(const Matrix& g, const std::vector<std::size_t>& cols) {
    Matrix s(cols.size(), cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) s.at(i, j) = g.at(cols[i], cols[j]);
    return s;
}

std::vector<double> subvector(const std::vector<double>& v, const std::vector<std::size_t>& cols) {
    std::vector<double> s(cols.size());
    for (std::size_t i = 0; i < cols.size(); ++i) s[i] = v[cols[i]];
    return s;
}

// Everything fixed across permutations: factorized submodel gram matrices.
struct FittedModels {
    Design design;
    std::vector<std::vector<std::size_t>> model_cols;  // A, B, A+B, full
    std::vector<Cholesky> factors;
    double df_a = 0.0, df_b = 0.0, df_ab = 0.0, df_res = 0.0;

    // residual sums of squares for (A), (B), (A+B), (full) given X'y over the
    // full column layout
    std::array<double, 4> rss(const std::vector<double>& xty_full, double yty) const {
        std::array<double, 4> out{};
        for (std::size_t m = 0; m < 4; ++m) {
            const std::vector<double> g = subvector(xty_full, model_cols[m]);
            const std::vector<double> beta = chol_solve(factors[m], g);
            double explained = 0.0;
            for (std::size_t i = 0; i < g.size(); ++i) explained += g[i] * beta[i];
            out[m] = yty - explained;
        }
        return out;
    }
};

FittedModels prepare_models(std::span<const double> values, std::span<const std::string> fa,
                            std::span<const std::string> fb, const std::string& name_a,
                            const std::string& name_b) {
    if (values.size() != fa.size()) throw DataError("anova: factor lengths must match values");
    FittedModels fm;
    fm.design = build_design(fa, fb, name_a, name_b);
    const Matrix g = gram(fm.design.x);

    fm.model_cols = {fm.design.model_columns(true, false, false),
                     fm.design.model_columns(false, true, false),
                     fm.design.model_columns(true, true, false),
                     fm.design.model_columns(true, true, true)};
    for (const auto& cols : fm.model_cols) {
        Cholesky f = cholesky(submatrix(g, cols));
        if (!f.ok())
            throw DataError("anova: design is rank deficient; aliased term: " +
                            fm.design.names[cols[static_cast<std::size_t>(f.fail_index)]]);
        fm.factors.push_back(std::move(f));
    }

    const double da = static_cast<double>(fm.design.n_a - 1);
    const double db = static_cast<double>(fm.design.n_b - 1);
    fm.df_a = da;
    fm.df_b = db;
    fm.df_ab = da * db;
    fm.df_res = static_cast<double>(values.size()) -
                static_cast<double>(fm.design.n_a * fm.design.n_b);
    if (fm.df_res <= 0.0) throw DataError("anova: no residual degrees of freedom");
    return fm;
}

struct EffectStats {
    double ss_a, ss_b, ss_ab, ss_res;
    double f_a, f_b, f_ab;
};

EffectStats effect_stats(const FittedModels& fm, const std::vector<double>& y) {
    double yty = 0.0;
    for (double v : y) yty += v * v;
    const std::vector<double> g = xt_y(fm.design.x, y);
    const auto [rss_a, rss_b, rss_ab, rss_full] = fm.rss(g, yty);

    EffectStats e{};
    e.ss_a = std::max(0.0, rss_b - rss_ab);   // A adjusted for B
    e.ss_b = std::max(0.0, rss_a - rss_ab);   // B adjusted for A
    e.ss_ab = std::max(0.0, rss_ab - rss_full);
    e.ss_res = std::max(0.0, rss_full);
    const double ms_res = e.ss_res / fm.df_res;
    auto f_of = [&](double ss, double df) { return ms_res > 0.0 ? (ss / df) / ms_res : 0.0; };
    e.f_a = f_of(e.ss_a, fm.df_a);
    e.f_b = f_of(e.ss_b, fm.df_b);
    e.f_ab = f_of(e.ss_ab, fm.df_ab);
    return e;
}

}  // namespace

AnovaTable two_way_anova_type2(std::span<const double> values,
                               std::span<const std::string> factor_a,
                               std::span<const std::string> factor_b, const std::string& name_a,
                               const std::string& name_b) {
    const FittedModels fm = prepare_models(values, factor_a, factor_b, name_a, name_b);
    const std::vector<double> y(values.begin(), values.end());
    const EffectStats e = effect_stats(fm, y);

    AnovaTable t;
    t.ss_total = e.ss_a + e.ss_b + e.ss_ab + e.ss_res;
    auto make_row = [&](const std::string& term, double ss, double df, double f) {
        AnovaRow r;
        r.term = term;
        r.sum_sq = ss;
        r.df = df;
        r.f = f;
        r.p_parametric = (t.ss_total > 0.0 && f > 0.0) ? f_sf(f, df, fm.df_res) : 1.0;
        r.eta_sq = t.ss_total > 0.0 ? ss / t.ss_total : 0.0;
        r.partial_eta_sq = (ss + e.ss_res) > 0.0 ? ss / (ss + e.ss_res) : 0.0;
        return r;
    };
    t.effects.push_back(make_row(name_a, e.ss_a, fm.df_a, e.f_a));
    t.effects.push_back(make_row(name_b, e.ss_b, fm.df_b, e.f_b));
    t.effects.push_back(make_row(name_a + ":" + name_b, e.ss_ab, fm.df_ab, e.f_ab));
    t.residual.term = "residual";
    t.residual.sum_sq = e.ss_res;
    t.residual.df = fm.df_res;
    t.residual.eta_sq = t.ss_total > 0.0 ? e.ss_res / t.ss_total : 0.0;
    return t;
}

PermutationPValues permutation_p(std::span<const double> values,
                                 std::span<const std::string> factor_a,
                                 std::span<const std::string> factor_b, int n_perm,
                                 std::uint64_t seed, bool add_one_smoothing) {
    if (n_perm < 1) throw ConfigError("permutation_p: n_perm must be >= 1");
    const FittedModels fm = prepare_models(values, factor_a, factor_b, "a", "b");
    std::vector<double> y(values.begin(), values.end());
    const EffectStats observed = effect_stats(fm, y);

    long long ge_a = 0, ge_b = 0, ge_ab = 0;
    std::vector<double> perm = y;
    for (int it = 0; it < n_perm; ++it) {
        SplitMix rng(seed_mix(seed, static_cast<std::uint64_t>(it) + 0xA20FULL));
        perm = y;
        rng.shuffle(perm);
        const EffectStats e = effect_stats(fm, perm);
        if (e.f_a >= observed.f_a) ++ge_a;
        if (e.f_b >= observed.f_b) ++ge_b;
        if (e.f_ab >= observed.f_ab) ++ge_ab;
    }
    const double denom = add_one_smoothing ? n_perm + 1.0 : static_cast<double>(n_perm);
    const double add = add_one_smoothing ? 1.0 : 0.0;
    return {(ge_a + add) / denom, (ge_b + add) / denom, (ge_ab + add) / denom};
}

AnovaTable two_way_anova_with_permutation(std::span<const double> values,
                                          std::span<const std::string> factor_a,
                                          std::span<const std::string> factor_b, int n_perm,
                                          std::uint64_t seed, const std::string& name_a,
                                          const std::string& name_b) {
    AnovaTable t = two_way_anova_type2(values, factor_a, factor_b, name_a, name_b);
    const PermutationPValues pp = permutation_p(values, factor_a, factor_b, n_perm, seed);
    t.effects[0].p_permutation = pp.factor_a;
    t.effects[1].p_permutation = pp.factor_b;
    t.effects[2].p_permutation = pp.interaction;
    return t;
}

}  // namespace offsetsim::stats
