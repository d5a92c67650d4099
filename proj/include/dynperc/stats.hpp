#pragma once

#include <cstdint>
#include <vector>

namespace dynperc {

// Monte Carlo point estimate. `censored_fraction` counts replicas that hit a
// time cap before the observable resolved; means are meaningless past ~1%
// censoring, callers must check before reporting.
struct Estimate {
    double value = 0.0;
    double std_error = 0.0;
    long replicas = 0;
    std::uint64_t master_seed = 0;
    double censored_fraction = 0.0;
};

Estimate mean_estimate(const std::vector<double>& xs, std::uint64_t seed);
Estimate proportion_estimate(long hits, long total, std::uint64_t seed);

// Regularized incomplete gamma functions P(a,x), Q(a,x) = 1 - P(a,x).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper tail of chi-square with k dof at statistic x.
double chi_square_sf(double x, int dof);

// Pearson chi-square p-value of observed counts against expected probabilities
// (cells with expected probability 0 must have 0 observations).
double chi_square_pvalue(const std::vector<long>& observed, const std::vector<double>& expected_probs);

double log_factorial(long k);
double log_binomial_pmf(long k, long n, double p);
double log_poisson_pmf(long k, double lambda);

}  // namespace dynperc
