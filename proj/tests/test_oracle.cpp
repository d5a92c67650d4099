#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "dynperc/oracle.hpp"
#include "dynperc/rng.hpp"
#include "dynperc/simulation.hpp"

using namespace dynperc;

TEST_CASE("generator construction and caps") {
    Params pr{4, 2.0, 0.2};
    auto spec = make_generator(pr);
    CHECK(spec.N == 6);
    CHECK(spec.states == 4 * 64);
    CHECK_THROWS_AS(make_generator(Params{6, 2.0, 0.2}), std::invalid_argument);
}

TEST_CASE("transient distribution at t=0 is the initial distribution") {
    auto spec = make_generator(Params{3, 1.5, 0.5});
    auto init = point_distribution(spec, 1, 0b011u);
    auto out = transient_distribution(spec, init, 0.0);
    CHECK(tv_distance(init, out) < 1e-12);
}

TEST_CASE("transient distribution converges to the product stationary law") {
    Params pr{3, 1.5, 0.1};
    auto spec = make_generator(pr);
    auto init = point_distribution(spec, 0, 0u);
    auto out = transient_distribution(spec, init, 200.0 / pr.mu);
    auto pi = stationary_distribution(spec);
    CHECK(tv_distance(out, pi) < 1e-8);
    double total = 0.0;
    for (double v : out) total += v;
    CHECK(std::fabs(total - 1.0) < 1e-9);
}

TEST_CASE("single edge marginal matches the two-state closed form") {
    Params pr{2, 0.6, 0.7};  // p = 0.3
    auto spec = make_generator(pr);
    auto init = point_distribution(spec, 0, 1u);  // edge open
    for (double t : {0.3, 1.0, 4.0}) {
        auto out = transient_distribution(spec, init, t);
        double open_mass = 0.0;
        for (long s = 0; s < spec.states; ++s)
            if (spec.mask_of(s) & 1u) open_mass += out[s];
        double want = pr.p() + (1.0 - pr.p()) * std::exp(-pr.mu * t);
        CHECK(open_mass == doctest::Approx(want).epsilon(1e-10));
    }
}

TEST_CASE("stationarity residual and detailed balance") {
    {
        auto spec = make_generator(Params{2, 0.8, 0.37});
        auto rep = stationarity_residual(spec);
        CHECK(rep.max_residual < 1e-12);
        CHECK(rep.max_detailed_balance < 1e-15);
    }
    {
        auto spec = make_generator(Params{4, 2.0, 0.2});
        auto rep = stationarity_residual(spec);
        CHECK(rep.max_residual < 1e-10);
        CHECK(rep.max_detailed_balance < 1e-15);

        // Negative control: a 1e-3 bump must be detected.
        auto pi = stationary_distribution(spec);
        pi[5] += 1e-3;
        CHECK(stationarity_residual_of(spec, pi) > 1e-5);
    }
}

TEST_CASE("exact environment tv corners and cross-check") {
    CHECK(exact_env_tv(100, 0.3, 0.3) == doctest::Approx(0.0));
    CHECK(exact_env_tv(50, 0.0, 1.0) == doctest::Approx(1.0));

    const long long N = 1770;
    const double p = 2.0 / 60.0;
    double mu_t = 0.5 * std::log(static_cast<double>(N));
    double a = p + (1.0 - p) * std::exp(-mu_t);
    double tv = exact_env_tv(N, p, a);
    CHECK(tv > 0.0);
    CHECK(tv < 1.0);

    // Monte Carlo of the count statistic through the optimal event.
    auto ev = env_tv_event_set(N, p, a);
    CHECK(ev.tv == doctest::Approx(tv).epsilon(1e-9));
    auto rng = make_rng(2024, 0);
    std::binomial_distribution<long long> bin(N, a);
    const long reps = 1000000;
    long hits = 0;
    for (long r = 0; r < reps; ++r)
        if (bin(rng) >= ev.k_star) ++hits;
    double p_a_tail = static_cast<double>(hits) / reps;
    // exact Binomial(N,p) upper tail at k_star
    double p_p_tail = 0.0;
    for (long long k = ev.k_star; k <= N; ++k) {
        double lp = std::lgamma(N + 1.0) - std::lgamma(k + 1.0) - std::lgamma(N - k + 1.0) +
                    k * std::log(p) + (N - k) * std::log1p(-p);
        p_p_tail += std::exp(lp);
    }
    CHECK(std::fabs((p_a_tail - p_p_tail) - tv) < 0.005);
}

TEST_CASE("environment tv is nonincreasing along the interpolation path") {
    const long long N = 300;
    const double p = 0.05, mu = 0.7;
    double prev = 2.0;
    for (double t : {0.0, 0.2, 0.5, 1.0, 2.0, 4.0, 8.0}) {
        double a = p + (1.0 - p) * std::exp(-mu * t);
        double tv = exact_env_tv(N, p, a);
        CHECK(tv <= prev + 1e-12);
        prev = tv;
    }
}

TEST_CASE("oracle matches the simulator on a small instance") {
    // Lighter replica count here; the 1e5-replica version is acceptance #1.
    Params pr{4, 2.0, 0.2};
    auto spec = make_generator(pr);
    auto init = point_distribution(spec, 0, 0u);
    const double t = 5.0;
    auto exact = transient_distribution(spec, init, t);

    const long reps = 100000;
    std::vector<double> emp(spec.states, 0.0);
    for (long r = 0; r < reps; ++r) {
        auto rng = make_rng(31415, replica_stream(r));
        System sys(pr, InitMode::all_closed, rng);
        sys.add_walker(0);
        advance(sys, t);
        unsigned mask = 0;
        for (int e = 0; e < spec.N; ++e) {
            if (sys.env.is_open_index(e)) mask |= 1u << e;
        }
        emp[spec.index(sys.walkers[0].position, mask)] += 1.0 / static_cast<double>(reps);
    }
    CHECK(tv_distance(emp, exact) < 0.03);
}
