#pragma once

#include <span>
#include <string>
#include <vector>

#include "offsetsim/stats/linalg.hpp"

namespace offsetsim::stats {

struct LogisticFit {
    std::vector<std::string> names;
    std::vector<double> coefficients;
    std::vector<double> std_errors;
    Matrix covariance;  // (X'WX)^-1 at the optimum
    double log_likelihood = 0.0;
    double null_log_likelihood = 0.0;
    double aic = 0.0;
    double bic = 0.0;
    double pseudo_r2 = 0.0;  // McFadden
    double lr_p_value = 1.0;
    bool converged = false;
    bool separation_detected = false;
    int iterations = 0;
    std::size_t n_obs = 0;
};

// Maximum-likelihood binomial logit via iteratively reweighted least squares.
// The design must carry its intercept column explicitly. Outcomes must be
// 0/1. Throws DataError on rank deficiency (naming the column); separation
// and non-convergence are flagged on the result, not thrown.
LogisticFit logistic_fit(const Matrix& design, std::span<const double> outcome,
                         std::vector<std::string> names = {});

double sigmoid(double eta);

struct AmeResult {
    std::string name;
    double ame = 0.0;
    double std_error = 0.0;
    double z = 0.0;
    double p = 1.0;
    bool is_binary = false;
};

// Average marginal effects over the observed covariate rows. Columns holding
// only {0,1} get the discrete 0->1 contrast, continuous columns the averaged
// analytic derivative; standard errors by the delta method. The intercept
// column (all ones) is skipped.
std::vector<AmeResult> average_marginal_effects(const LogisticFit& fit, const Matrix& design);

}  // namespace offsetsim::stats
