#include "dynperc/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace dynperc {

double env_tv_upper_bound(long long num_edges, double mu, double t) {
    if (num_edges < 1) throw std::invalid_argument("env_tv_upper_bound: need at least one edge");
    if (mu < 0.0 || t < 0.0) throw std::invalid_argument("env_tv_upper_bound: mu and t must be nonnegative");
    const double g = mu * t - 0.5 * std::log(static_cast<double>(num_edges));
    // exp(-2g) overflows the outer exp for very negative g; the cap at 1
    // makes the result exact anyway, so short-circuit well before that.
    if (g < 0.0) return 1.0;
    const double raw = std::sqrt(std::expm1(std::exp(-2.0 * g)));
    return std::min(1.0, raw);
}

double env_tv_lower_bound(long long num_edges, double mu, double t, double epsilon_slack) {
    if (num_edges < 1) throw std::invalid_argument("env_tv_lower_bound: need at least one edge");
    if (mu < 0.0 || t < 0.0) throw std::invalid_argument("env_tv_lower_bound: mu and t must be nonnegative");
    if (epsilon_slack <= 0.0) throw std::invalid_argument("env_tv_lower_bound: slack must be positive");
    const double q = std::exp(-mu * t);
    const double raw = 1.0 - 2.0 * std::exp(-q * q * static_cast<double>(num_edges) / epsilon_slack);
    return std::max(0.0, raw);
}

std::pair<double, double> poisson_tail_bounds(double lambda, double epsilon) {
    if (!(lambda > 0.0)) throw std::invalid_argument("poisson_tail_bounds: lambda must be positive");
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("poisson_tail_bounds: epsilon must lie in (0,1), got " +
                                    std::to_string(epsilon));
    const double base = 0.5 * lambda * epsilon * epsilon;
    return {std::exp(-base * (1.0 - epsilon / 3.0)), std::exp(-base)};
}

double gillman_bound(double pi_min, double gamma, double pi_A, long long m, double epsilon) {
    if (!(pi_min > 0.0 && pi_min <= 1.0))
        throw std::invalid_argument("gillman_bound: pi_min must lie in (0,1]");
    if (!(pi_A >= 0.0 && pi_A <= 1.0))
        throw std::invalid_argument("gillman_bound: pi_A must lie in [0,1]");
    if (gamma < 0.0) throw std::invalid_argument("gillman_bound: gamma must be nonnegative");
    if (m < 1) throw std::invalid_argument("gillman_bound: m must be positive");
    if (epsilon < 0.0 || epsilon > static_cast<double>(m))
        throw std::invalid_argument("gillman_bound: epsilon must lie in [0, m]");
    const double raw = 3.0 / std::sqrt(pi_min) *
                       std::exp(-gamma * epsilon * epsilon / (20.0 * static_cast<double>(m)));
    return std::min(1.0, raw);
}

MixingTimeBounds walker_mixing_time_bounds(double lambda, double mu, double epsilon,
                                           long long n, double upper_constant) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw std::invalid_argument("walker_mixing_time_bounds: epsilon must lie in (0,1)");
    if (!(lambda > 0.0 && mu > 0.0))
        throw std::invalid_argument("walker_mixing_time_bounds: lambda and mu must be positive");
    if (upper_constant <= 0.0)
        throw std::invalid_argument("walker_mixing_time_bounds: upper constant must be positive");
    MixingTimeBounds out;
    const double log_inv_eps = std::log(1.0 / epsilon);
    out.lower = log_inv_eps / (2.0 * lambda * mu);
    out.upper = upper_constant * log_inv_eps / mu;
    out.lower_valid = epsilon < std::exp(-3.0 * lambda);
    out.upper_valid = epsilon < 0.25;
    if (n > 0) {
        out.upper_valid = out.upper_valid &&
                          mu <= (2.0 / 3.0) / ((1.0 + lambda) * static_cast<double>(n));
    }
    return out;
}

double poisson_even_probability(double zeta) {
    if (zeta < 0.0) throw std::invalid_argument("poisson_even_probability: zeta must be nonnegative");
    return 0.5 * (1.0 + std::exp(-2.0 * zeta));
}

}  // namespace dynperc
