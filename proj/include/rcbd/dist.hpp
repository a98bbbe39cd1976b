#pragma once

#include <functional>

namespace rcbd::dist {

// Tolerances for series truncation and quantile inversion.
struct Accuracy {
    double abs_tol = 1e-12;        // noncentral series: residual Poisson mass cutoff
    int max_series_terms = 100000; // hard cap on mixture terms
    double quantile_tol = 1e-10;   // quantile bracket width tolerance
};

// ---------------------------------------------------------------------------
// Standard normal
// ---------------------------------------------------------------------------
double std_normal_cdf(double x);
double std_normal_quantile(double p);  // Wichura AS241, |error| < 1e-15 region-wise

// ---------------------------------------------------------------------------
// Chi-square, central F (fractional degrees of freedom supported throughout)
// ---------------------------------------------------------------------------
double chi2_sf(double x, double df, const Accuracy& acc = {});
double chi2_quantile(double p, double df, const Accuracy& acc = {});

double f_sf(double x, double d1, double d2, const Accuracy& acc = {});
double f_quantile(double p, double d1, double d2, const Accuracy& acc = {});

// ---------------------------------------------------------------------------
// Noncentral variants, Poisson-weighted mixtures truncated by residual mass
// ---------------------------------------------------------------------------
double nc_chi2_sf(double x, double df, double lambda, const Accuracy& acc = {});
double nc_f_sf(double x, double d1, double d2, double lambda, const Accuracy& acc = {});

// ---------------------------------------------------------------------------
// Gauss-Hermite expectation E[f(Z)], Z ~ N(0,1)
// ---------------------------------------------------------------------------
// Fixed node count (n >= 8). Node/weight tables are cached and immutable.
double normal_expectation(const std::function<double(double)>& f, int nodes);

// Doubles the node count (96, 192, ...) until successive estimates agree.
double normal_expectation_adaptive(const std::function<double(double)>& f,
                                   double tol = 1e-9);

// Regularized incomplete functions, exposed for reuse and testing.
double regularized_gamma_q(double a, double x);  // upper: Q(a, x)
double regularized_beta(double a, double b, double x);  // I_x(a, b)

}  // namespace rcbd::dist
