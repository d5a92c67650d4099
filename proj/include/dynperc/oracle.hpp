#pragma once

#include <vector>

#include "dynperc/environment.hpp"

namespace dynperc {

// Exact generator of the joint chain (X_t, eta_t) on K_n for n <= 5.
// State index s = mask * n + x, mask a bitmask over the N = n(n-1)/2 edges in
// edge_index order.
struct GeneratorSpec {
    Params params;
    int N = 1;
    long states = 0;

    long index(int x, unsigned mask) const { return static_cast<long>(mask) * params.n + x; }
    int walker_of(long s) const { return static_cast<int>(s % params.n); }
    unsigned mask_of(long s) const { return static_cast<unsigned>(s / params.n); }
};

// n <= 5 (5 * 2^10 = 5120 states); larger n rejected.
GeneratorSpec make_generator(const Params& params);

// Point mass on (walker x, environment mask).
std::vector<double> point_distribution(const GeneratorSpec& spec, int x, unsigned mask);

// Uniformization with Lambda = mu*N + 1, Poisson tail < 1e-12; result sums to
// 1 within 1e-9.
std::vector<double> transient_distribution(const GeneratorSpec& spec,
                                           const std::vector<double>& initial, double t);

// pi_U x pi_ER: uniform walker, product Bernoulli(p) environment.
std::vector<double> stationary_distribution(const GeneratorSpec& spec);

double tv_distance(const std::vector<double>& a, const std::vector<double>& b);

struct ResidualReport {
    double max_residual = 0.0;          // max_s |(pi Q)_s|
    double max_detailed_balance = 0.0;  // max over transitions |pi_i q_ij - pi_j q_ji|
};

ResidualReport stationarity_residual(const GeneratorSpec& spec);

// Residual of an arbitrary distribution against the generator (negative controls).
double stationarity_residual_of(const GeneratorSpec& spec, const std::vector<double>& pi);

// TV between Binomial(N,a) and Binomial(N,p) counts == TV between the N-fold
// product environments (open count is a sufficient statistic; the likelihood
// ratio is monotone in the count). Log-space, N up to 1e6.
double exact_env_tv(long long N, double p, double a);

// The optimal distinguishing event for a > p is an upper tail {k >= k_star}.
struct EnvTvEvent {
    double tv = 0.0;
    long long k_star = 0;
};

EnvTvEvent env_tv_event_set(long long N, double p, double a);

}  // namespace dynperc
