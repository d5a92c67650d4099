#pragma once

// Closed-form probability bounds used throughout the experiments: environment
// mixing envelopes, Poisson deviation bounds, the Gillman visit-count bound
// for reversible chains, and the two-sided mixing-time box for a walker on a
// slowly refreshing environment.  All evaluators are pure functions of their
// arguments; Monte Carlo counterparts live in estimators.hpp.

#include <stdexcept>
#include <utility>

namespace dynperc {

// Upper envelope for the total-variation distance of the edge environment
// from stationarity, evaluated at physical time t with per-edge refresh rate
// mu over N edges.  Writing mu*t = (1/2)*log N + g, the L2 contraction of a
// product chain gives TV <= sqrt(exp(e^(-2g)) - 1), capped at the trivial
// bound 1 (the cap binds whenever g <= log(e - 1) / ... i.e. for g around 0
// or below, where the raw expression exceeds 1).
//
// The centering (1/2)*log N is exact for the balanced case p = 1/2; for
// strongly biased densities the true crossing shifts right, so treat this as
// the balanced-case envelope rather than a certified bound at small p.
double env_tv_upper_bound(long long num_edges, double mu, double t);

// Lower envelope for the same distance: with q = exp(-mu*t), at least a
// constant fraction of edges still carry their initial state, and a Chernoff
// argument on the open-edge count yields TV >= 1 - 2*exp(-q^2 N / slack).
// The default slack 18 absorbs both Chernoff exponents; the result is capped
// below at 0 (the cap binds once q^2 N < slack * log 2).
double env_tv_lower_bound(long long num_edges, double mu, double t,
                          double epsilon_slack = 18.0);

// Two-sided Poisson deviation bounds at relative deviation eps in (0,1):
//   P(X >= lambda(1+eps)) <= exp(-lambda eps^2 (1 - eps/3) / 2)   (.first)
//   P(X <= lambda(1-eps)) <= exp(-lambda eps^2 / 2)               (.second)
// Throws std::invalid_argument for lambda <= 0 or eps outside (0,1).
std::pair<double, double> poisson_tail_bounds(double lambda, double epsilon);

// Gillman-type bound for a reversible chain with spectral gap `gamma` and
// stationary minimum `pi_min`: the probability that the number of visits to
// a set A in m steps deviates from m*pi_A by at least eps is at most
//   min(1, 3 * pi_min^(-1/2) * exp(-gamma eps^2 / (20 m))).
// pi_A enters only through the caller's choice of eps (deviations are
// measured around m*pi_A); it is validated but not part of the formula.
// Throws std::invalid_argument outside eps in [0, m] or on degenerate
// pi_min / pi_A / m.
double gillman_bound(double pi_min, double gamma, double pi_A, long long m,
                     double epsilon);

// Mixing-time box for the walker component when the environment refreshes
// slowly: both bounds scale as (1/mu) * log(1/eps).
struct MixingTimeBounds {
    double lower = 0.0;        // (1/mu) * log(1/eps) / (2 lambda)
    double upper = 0.0;        // (1/mu) * C * log(1/eps)
    bool lower_valid = false;  // proof needs eps < exp(-3 lambda)
    bool upper_valid = false;  // proof needs eps < 1/4 and mu <= (2/3)/((1+lambda) n)
};

// Default constant for the upper bound, calibrated once against simulation
// at n=500, lambda=2 (see tests) and frozen.
inline constexpr double kMixingUpperConstant = 8.0;

// Evaluates the box at (lambda, mu, eps).  Validity flags report whether the
// parameters sit inside the proven regime; out-of-regime values are still
// returned, flagged false.  The upper-bound regime depends on n; pass n = 0
// when unknown, in which case upper_valid reflects only the eps condition.
// Throws std::invalid_argument for eps outside (0,1) or nonpositive rates.
MixingTimeBounds walker_mixing_time_bounds(double lambda, double mu,
                                           double epsilon, long long n = 0,
                                           double upper_constant = kMixingUpperConstant);

// P(Poisson(zeta) is even) = (1 + exp(-2 zeta)) / 2.
double poisson_even_probability(double zeta);

}  // namespace dynperc
