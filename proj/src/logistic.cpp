#include "offsetsim/stats/logistic.hpp"

#include <cmath>

#include "offsetsim/errors.hpp"
#include "offsetsim/stats/distributions.hpp"

namespace offsetsim::stats {

double sigmoid(double eta) {
    if (eta >= 0.0) return 1.0 / (1.0 + std::exp(-eta));
    const double e = std::exp(eta);
    return e / (1.0 + e);
}

namespace {

constexpr int kMaxIterations = 100;
constexpr double kRelTol = 1e-10;
// every fitted probability numerically 0/1 while matching the outcome means
// the likelihood is running away along a separating direction
constexpr double kSeparationMargin = 1e-8;

double log_likelihood(const Matrix& x, std::span<const double> y,
                      const std::vector<double>& beta) {
    double ll = 0.0;
    for (std::size_t i = 0; i < x.rows; ++i) {
        double eta = 0.0;
        for (std::size_t j = 0; j < x.cols; ++j) eta += x.at(i, j) * beta[j];
        // log p(y|eta) = y*eta - log(1+exp(eta)), stable form
        ll += y[i] * eta - (eta > 0.0 ? eta + std::log1p(std::exp(-eta))
                                      : std::log1p(std::exp(eta)));
    }
    return ll;
}

}  // namespace

LogisticFit logistic_fit(const Matrix& design, std::span<const double> outcome,
                         std::vector<std::string> names) {
    const std::size_t n = design.rows, p = design.cols;
    if (n == 0 || p == 0) throw DataError("logistic_fit: empty design");
    if (outcome.size() != n) throw DataError("logistic_fit: outcome length mismatch");
    for (double v : outcome)
        if (v != 0.0 && v != 1.0) throw DataError("logistic_fit: outcome must be 0/1");
    if (names.empty()) {
        names.resize(p);
        for (std::size_t j = 0; j < p; ++j) names[j] = "x" + std::to_string(j);
    }

    LogisticFit fit;
    fit.names = names;
    fit.n_obs = n;
    fit.coefficients.assign(p, 0.0);

    double ll = log_likelihood(design, outcome, fit.coefficients);
    std::vector<double> eta(n, 0.0), prob(n, 0.5), w(n, 0.25);
    Cholesky last_factor;

    for (int iter = 1; iter <= kMaxIterations; ++iter) {
        fit.iterations = iter;
        // weighted normal equations: (X'WX) beta_new = X'W z, z = eta + (y-p)/w
        Matrix xtwx(p, p);
        std::vector<double> xtwz(p, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double wi = std::max(w[i], 1e-10);
            const double zi = eta[i] + (outcome[i] - prob[i]) / wi;
            for (std::size_t a = 0; a < p; ++a) {
                const double xa = design.at(i, a);
                if (xa == 0.0) continue;
                xtwz[a] += wi * xa * zi;
                for (std::size_t b = a; b < p; ++b) xtwx.at(a, b) += wi * xa * design.at(i, b);
            }
        }
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < a; ++b) xtwx.at(a, b) = xtwx.at(b, a);

        Cholesky f = cholesky(xtwx, 1e-12);
        if (!f.ok())
            throw DataError("logistic_fit: design is rank deficient at column '" +
                            names[static_cast<std::size_t>(f.fail_index)] + "'");
        last_factor = f;
        fit.coefficients = chol_solve(f, xtwz);

        double worst_margin = 0.0;
        bool all_correct = true;
        for (std::size_t i = 0; i < n; ++i) {
            double e = 0.0;
            for (std::size_t j = 0; j < p; ++j) e += design.at(i, j) * fit.coefficients[j];
            eta[i] = e;
            prob[i] = sigmoid(e);
            w[i] = prob[i] * (1.0 - prob[i]);
            worst_margin = std::max(worst_margin, std::min(prob[i], 1.0 - prob[i]));
            if ((outcome[i] > 0.5) != (prob[i] > 0.5)) all_correct = false;
        }
        const double ll_new = log_likelihood(design, outcome, fit.coefficients);
        const double rel = std::fabs(ll_new - ll) / (std::fabs(ll_new) + 0.1);
        ll = ll_new;
        if (all_correct && worst_margin < kSeparationMargin) {
            fit.separation_detected = true;
            break;
        }
        if (rel < kRelTol) {
            fit.converged = true;
            break;
        }
    }

    fit.log_likelihood = ll;
    fit.covariance = last_factor.ok() ? chol_inverse(last_factor) : Matrix(p, p);
    fit.std_errors.resize(p);
    for (std::size_t j = 0; j < p; ++j) fit.std_errors[j] = std::sqrt(fit.covariance.at(j, j));

    // intercept-only reference fit for McFadden R^2 and the LR test
    double y_sum = 0.0;
    for (double v : outcome) y_sum += v;
    const double pbar = y_sum / static_cast<double>(n);
    fit.null_log_likelihood =
        (pbar <= 0.0 || pbar >= 1.0)
            ? 0.0
            : y_sum * std::log(pbar) + (static_cast<double>(n) - y_sum) * std::log(1.0 - pbar);

    const double k = static_cast<double>(p);
    fit.aic = 2.0 * k - 2.0 * fit.log_likelihood;
    fit.bic = k * std::log(static_cast<double>(n)) - 2.0 * fit.log_likelihood;
    if (fit.null_log_likelihood < 0.0)
        fit.pseudo_r2 = 1.0 - fit.log_likelihood / fit.null_log_likelihood;
    if (p > 1) {
        const double lr = 2.0 * (fit.log_likelihood - fit.null_log_likelihood);
        fit.lr_p_value = chi2_sf(std::max(lr, 0.0), k - 1.0);
    }
    return fit;
}

std::vector<AmeResult> average_marginal_effects(const LogisticFit& fit, const Matrix& design) {
    if (!fit.converged) throw DataError("average_marginal_effects: fit did not converge");
    const std::size_t n = design.rows, p = design.cols;
    if (p != fit.coefficients.size()) throw DataError("average_marginal_effects: shape mismatch");

    std::vector<double> eta(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) eta[i] += design.at(i, j) * fit.coefficients[j];

    std::vector<AmeResult> out;
    for (std::size_t j = 0; j < p; ++j) {
        bool constant = true, binary = true;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = design.at(i, j);
            if (v != design.at(0, j)) constant = false;
            if (v != 0.0 && v != 1.0) binary = false;
        }
        if (constant) continue;  // intercept (or degenerate) column

        AmeResult r;
        r.name = fit.names[j];
        r.is_binary = binary;
        std::vector<double> grad(p, 0.0);
        const double bj = fit.coefficients[j];

        if (binary) {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double xij = design.at(i, j);
                const double eta1 = eta[i] + bj * (1.0 - xij);
                const double eta0 = eta[i] - bj * xij;
                const double p1 = sigmoid(eta1), p0 = sigmoid(eta0);
                sum += p1 - p0;
                const double d1 = p1 * (1.0 - p1), d0 = p0 * (1.0 - p0);
                for (std::size_t m = 0; m < p; ++m) {
                    const double x1m = (m == j) ? 1.0 : design.at(i, m);
                    const double x0m = (m == j) ? 0.0 : design.at(i, m);
                    grad[m] += d1 * x1m - d0 * x0m;
                }
            }
            r.ame = sum / static_cast<double>(n);
        } else {
            double sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double pi = sigmoid(eta[i]);
                const double di = pi * (1.0 - pi);
                sum += bj * di;
                for (std::size_t m = 0; m < p; ++m) {
                    double g = bj * di * (1.0 - 2.0 * pi) * design.at(i, m);
                    if (m == j) g += di;
                    grad[m] += g;
                }
            }
            r.ame = sum / static_cast<double>(n);
        }
        for (double& g : grad) g /= static_cast<double>(n);

        double var = 0.0;
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b) var += grad[a] * fit.covariance.at(a, b) * grad[b];
        r.std_error = std::sqrt(std::max(var, 0.0));
        r.z = r.std_error > 0.0 ? r.ame / r.std_error : 0.0;
        r.p = normal_two_sided_p(r.z);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace offsetsim::stats
