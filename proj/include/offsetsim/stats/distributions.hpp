#pragma once

namespace offsetsim::stats {

double normal_cdf(double x);
double normal_sf(double x);
// two-sided tail probability for a standard-normal z
double normal_two_sided_p(double z);

// regularized incomplete gamma functions
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// chi-square survival function with df degrees of freedom
double chi2_sf(double x, double df);

// regularized incomplete beta I_x(a, b)
double incomplete_beta(double a, double b, double x);

// F-distribution survival function
double f_sf(double x, double df1, double df2);

// Student-t two-sided tail (used by delta-method p-values on small fits)
double t_two_sided_p(double t, double df);

}  // namespace offsetsim::stats
