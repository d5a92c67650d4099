#include "dynperc/bounds.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "dynperc/graph.hpp"
#include "dynperc/oracle.hpp"
#include "dynperc/rng.hpp"
#include "dynperc/structure.hpp"

using namespace dynperc;

TEST_CASE("environment TV upper envelope: frozen value, cap, monotonicity") {
    const long long N = 1770;
    const double half_log_n = 0.5 * std::log(static_cast<double>(N));

    // g = 3 evaluates to sqrt(exp(e^-6) - 1).
    CHECK(env_tv_upper_bound(N, 1.0, half_log_n + 3.0) ==
          doctest::Approx(0.04981793675722363).epsilon(1e-12));

    // At g = 0 the raw expression is sqrt(e - 1) ~ 1.31, so the cap binds;
    // below the centering it binds a fortiori.
    CHECK(env_tv_upper_bound(N, 1.0, half_log_n) == 1.0);
    CHECK(env_tv_upper_bound(N, 1.0, 0.0) == 1.0);
    CHECK(env_tv_upper_bound(N, 0.5, half_log_n) == 1.0);

    // Far past the window the envelope decays like exp(-g).
    CHECK(env_tv_upper_bound(N, 1.0, half_log_n + 20.0) ==
          doctest::Approx(std::exp(-20.0)).epsilon(1e-6));

    double prev = 2.0;
    for (int i = 0; i <= 80; ++i) {
        const double t = 0.25 * i;
        const double v = env_tv_upper_bound(N, 1.0, t);
        CHECK(v <= prev + 1e-15);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }

    CHECK_THROWS_AS(env_tv_upper_bound(0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(env_tv_upper_bound(N, 1.0, -1.0), std::invalid_argument);
}

TEST_CASE("environment TV upper envelope dominates the exact distance at density 1/2") {
    // The centering (1/2) log N is tight for p = 1/2; check domination against
    // the exact count-statistic TV from the all-open start, where each edge is
    // independently open with a(t) = p + (1-p) e^{-mu t}.
    const long long N = 300;
    const double p = 0.5;
    const double half_log_n = 0.5 * std::log(static_cast<double>(N));
    for (double g : {0.25, 0.5, 1.0, 2.0, 3.0, 5.0}) {
        const double t = half_log_n + g;
        const double a = p + (1.0 - p) * std::exp(-t);
        const double exact = exact_env_tv(N, p, a);
        CHECK(env_tv_upper_bound(N, 1.0, t) >= exact - 1e-12);
    }
}

TEST_CASE("environment TV lower envelope: frozen value, floor, domination by exact") {
    const long long N = 1770;
    const double half_log_n = 0.5 * std::log(static_cast<double>(N));

    // At t = 0 the envelope is 1 - 2 exp(-N/18), indistinguishable from 1.
    CHECK(env_tv_lower_bound(N, 1.0, 0.0) == doctest::Approx(1.0).epsilon(1e-15));

    // Two units before the centering, q^2 N = e^4 exactly.
    CHECK(env_tv_lower_bound(N, 1.0, half_log_n - 2.0) ==
          doctest::Approx(0.9036803929284831).epsilon(1e-12));

    // Once q^2 N is order one the raw expression goes negative: floor at 0.
    CHECK(env_tv_lower_bound(N, 1.0, half_log_n + 10.0) == 0.0);

    double prev = 2.0;
    for (int i = 0; i <= 80; ++i) {
        const double v = env_tv_lower_bound(N, 1.0, 0.25 * i);
        CHECK(v <= prev + 1e-15);
        prev = v;
    }

    // The envelope must sit below the exact all-open-start distance for the
    // sparse density p = lambda/n used by the process (here n=60, lambda=2).
    const double p = 2.0 / 60.0;
    for (double t : {0.2, 0.5, 1.0, 1.5, 2.0, 3.0, half_log_n, 4.5}) {
        const double a = p + (1.0 - p) * std::exp(-t);
        const double exact = exact_env_tv(N, p, a);
        // Margin sits above the oracle's 1e-9 summation fuzz: near t=0 both
        // sides are 1 - O(1e-13) and bare ulp comparisons are meaningless.
        CHECK(exact >= env_tv_lower_bound(N, 1.0, t) - 1e-8);
    }

    CHECK_THROWS_AS(env_tv_lower_bound(N, 1.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("poisson deviation bounds: frozen pair, domain, Monte Carlo one-sided") {
    const auto [up, down] = poisson_tail_bounds(100.0, 0.5);
    CHECK(up == doctest::Approx(2.992947830767636e-05).epsilon(1e-12));
    CHECK(down == doctest::Approx(3.726653172078671e-06).epsilon(1e-12));
    CHECK(up >= down);  // the (1 - eps/3) factor only weakens the exponent

    CHECK_THROWS_AS(poisson_tail_bounds(100.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(poisson_tail_bounds(100.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(poisson_tail_bounds(100.0, 1.5), std::invalid_argument);
    CHECK_THROWS_AS(poisson_tail_bounds(0.0, 0.5), std::invalid_argument);

    // Both bounds decay as lambda grows at fixed eps.
    double prev_up = 2.0, prev_down = 2.0;
    for (double lambda : {1.0, 5.0, 20.0, 100.0, 400.0}) {
        const auto [u, d] = poisson_tail_bounds(lambda, 0.3);
        CHECK(u < prev_up);
        CHECK(d < prev_down);
        prev_up = u;
        prev_down = d;
    }

    // Empirical tails of Po(100) over 10^7 draws stay below the bounds.
    auto rng = make_rng(0xb0541dULL, 1);
    std::poisson_distribution<long> po(100.0);
    const long reps = 10'000'000;
    long below = 0, above = 0;
    for (long r = 0; r < reps; ++r) {
        const long k = po(rng);
        if (k <= 50) ++below;
        if (k >= 150) ++above;
    }
    CHECK(static_cast<double>(below) / reps <= down);
    CHECK(static_cast<double>(above) / reps <= up);
}

TEST_CASE("gillman visit bound: frozen complete-graph value, caps, domain") {
    // Nearest-neighbour walk on K_4: gamma = 4/3, pi_min = 1/4.  Take A to be
    // one vertex, m = 10^4 steps, and deviation eps = pi(A) m / 2.
    const double m = 1e4;
    const double eps = 0.5 * 0.25 * m;
    CHECK(gillman_bound(0.25, 4.0 / 3.0, 0.25, static_cast<long long>(m), eps) ==
          doctest::Approx(0.00017957686984605847).epsilon(1e-12));

    // Same number with the gap computed from the graph rather than quoted.
    Graph k4(4);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j) k4.add_edge(i, j);
    const double gamma = spectral_gap(k4, {0, 1, 2, 3}).gamma;
    CHECK(gillman_bound(0.25, gamma, 0.25, static_cast<long long>(m), eps) ==
          doctest::Approx(0.00017957686984605847).epsilon(1e-6));

    CHECK(gillman_bound(0.25, 0.0, 0.25, 100, 10.0) == 1.0);  // no gap: vacuous
    CHECK(gillman_bound(0.25, 1.0, 0.25, 100, 0.0) == 1.0);   // eps = 0: cap binds

    CHECK_THROWS_AS(gillman_bound(0.25, 1.0, 0.25, 100, 101.0), std::invalid_argument);
    CHECK_THROWS_AS(gillman_bound(0.25, 1.0, 0.25, 100, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(gillman_bound(0.0, 1.0, 0.25, 100, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(gillman_bound(0.25, 1.0, 1.5, 100, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(gillman_bound(0.25, -0.5, 0.25, 100, 10.0), std::invalid_argument);
}

TEST_CASE("walker mixing-time box: arithmetic, validity flags, domain") {
    // lambda = 1, eps = e^-4: log(1/eps) = 4, so lower = 4 / (2 mu).
    const auto box = walker_mixing_time_bounds(1.0, 0.5, std::exp(-4.0));
    CHECK(box.lower == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(box.upper == doctest::Approx(kMixingUpperConstant * 8.0).epsilon(1e-12));
    CHECK(box.lower_valid);  // e^-4 < e^-3
    CHECK(box.upper_valid);  // eps < 1/4 and n unknown

    // eps above e^{-3 lambda}: lower bound still returned, flagged invalid.
    const auto loose = walker_mixing_time_bounds(1.0, 0.5, 0.1);
    CHECK(loose.lower > 0.0);
    CHECK_FALSE(loose.lower_valid);
    CHECK(loose.upper_valid);

    // The n-dependent refresh-rate condition for the upper bound.
    const double lambda = 2.0;
    const long long n = 500;
    const double mu_edge = (2.0 / 3.0) / ((1.0 + lambda) * n);
    CHECK(walker_mixing_time_bounds(lambda, mu_edge, 0.1, n).upper_valid);
    CHECK_FALSE(walker_mixing_time_bounds(lambda, 2.0 * mu_edge, 0.1, n).upper_valid);
    CHECK_FALSE(walker_mixing_time_bounds(lambda, mu_edge, 0.3, n).upper_valid);

    // eps -> 1 sends both bounds to 0.
    CHECK(walker_mixing_time_bounds(1.0, 0.5, 0.999).lower ==
          doctest::Approx(std::log(1.0 / 0.999)).epsilon(1e-9));

    CHECK_THROWS_AS(walker_mixing_time_bounds(1.0, 0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(walker_mixing_time_bounds(1.0, 0.0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(walker_mixing_time_bounds(0.0, 0.5, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(walker_mixing_time_bounds(1.0, 0.5, 0.1, 0, -1.0), std::invalid_argument);
}

TEST_CASE("poisson parity probability") {
    CHECK(poisson_even_probability(0.0) == 1.0);
    CHECK(poisson_even_probability(1.0) == doctest::Approx(0.5676676416183064).epsilon(1e-12));
    // Decreases monotonically to 1/2.
    double prev = 2.0;
    for (double z : {0.0, 0.5, 1.0, 2.0, 4.0, 8.0}) {
        const double v = poisson_even_probability(z);
        CHECK(v < prev);
        CHECK(v >= 0.5);
        prev = v;
    }
    CHECK(poisson_even_probability(20.0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_THROWS_AS(poisson_even_probability(-0.1), std::invalid_argument);
}
