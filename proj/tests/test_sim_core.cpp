#include "doctest.h"

#include <cmath>
#include <sstream>

#include "dynperc/rng.hpp"
#include "dynperc/simulation.hpp"
#include "dynperc/stats.hpp"

using namespace dynperc;

namespace {

// Pools binomial cells so every cell keeps expected count >= min_expected.
void pooled_binomial_cells(long long N, double p, long reps, double min_expected,
                           std::vector<long long>& breaks, std::vector<double>& probs) {
    breaks.clear();
    probs.clear();
    double acc = 0.0;
    for (long long k = 0; k <= N; ++k) {
        acc += std::exp(log_binomial_pmf(k, N, p));
        if (acc * static_cast<double>(reps) >= min_expected || k == N) {
            breaks.push_back(k);  // cell = (prev break, k]
            probs.push_back(acc);
            acc = 0.0;
        }
    }
    // Fold any underweight tail cell into its neighbour.
    while (probs.size() >= 2 && probs.back() * static_cast<double>(reps) < min_expected) {
        probs[probs.size() - 2] += probs.back();
        breaks[breaks.size() - 2] = breaks.back();
        probs.pop_back();
        breaks.pop_back();
    }
}

int cell_of(long long k, const std::vector<long long>& breaks) {
    for (std::size_t i = 0; i < breaks.size(); ++i)
        if (k <= breaks[i]) return static_cast<int>(i);
    return static_cast<int>(breaks.size()) - 1;
}

}  // namespace

TEST_CASE("params validation and regime flag") {
    Params ok{100, 2.0, 0.01};
    ok.validate();
    CHECK(ok.p() == doctest::Approx(0.02));
    CHECK(ok.N() == 4950);
    CHECK_FALSE(ok.slow_mu());

    Params slow{1000, 2.0, 1e-30};
    CHECK(slow.slow_mu());

    CHECK_THROWS_AS((Params{1, 2.0, 1.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((Params{10, -1.0, 1.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS((Params{10, 20.0, 1.0}).validate(), std::invalid_argument);  // p > 1
    CHECK_THROWS_AS((Params{10, 2.0, -0.5}).validate(), std::invalid_argument);
}

TEST_CASE("environment init corners") {
    auto rng = make_rng(1, 0);
    Params closed{5, 0.0, 1.0};
    auto e0 = Environment::init(closed, InitMode::stationary, rng);
    CHECK(e0.open_count() == 0);
    CHECK(e0.isolated_count() == 5);

    Params full{5, 5.0, 1.0};
    auto e1 = Environment::init(full, InitMode::stationary, rng);
    CHECK(e1.open_count() == 10);
    CHECK(e1.isolated_count() == 0);

    auto e2 = Environment::init(full, InitMode::all_open, rng);
    CHECK(e2.open_count() == 10);
    auto e3 = Environment::init(full, InitMode::all_closed, rng);
    CHECK(e3.open_count() == 0);
    CHECK(e3.clock() == 0.0);

    std::vector<std::pair<int, int>> edges{{0, 1}, {3, 2}};
    auto e4 = Environment::init(full, InitMode::explicit_edges, rng, &edges);
    CHECK(e4.open_count() == 2);
    CHECK(e4.is_open(2, 3));
    CHECK(e4.isolated_count() == 1);

    std::vector<std::pair<int, int>> bad{{0, 0}};
    CHECK_THROWS_WITH_AS(Environment::init(full, InitMode::explicit_edges, rng, &bad),
                         "init_environment: invalid pair (0,0)", std::invalid_argument);
    std::vector<std::pair<int, int>> oob{{0, 7}};
    CHECK_THROWS_AS(Environment::init(full, InitMode::explicit_edges, rng, &oob),
                    std::invalid_argument);
    e4.check_invariants();
}

TEST_CASE("stationary open count matches the product law mean") {
    Params pr{1000, 2.0, 1.0};
    const int reps = 10000;
    std::vector<double> counts;
    counts.reserve(reps);
    for (int r = 0; r < reps; ++r) {
        auto rng = make_rng(42, replica_stream(r));
        auto env = Environment::init(pr, InitMode::stationary, rng);
        counts.push_back(static_cast<double>(env.open_count()));
    }
    auto est = mean_estimate(counts, 42);
    double want = static_cast<double>(pr.N()) * pr.p();
    CHECK(std::fabs(est.value - want) <= 3.0 * est.std_error);
}

TEST_CASE("advance corners: frozen environment, frozen walker") {
    Params pr{20, 2.0, 0.0};
    auto rng = make_rng(2, 0);
    System sys(pr, InitMode::stationary, rng);
    sys.add_walker(3);
    auto before = sys.env;
    EventLog log;
    advance(sys, 5.0, &log);
    CHECK(sys.env == before);
    CHECK(sys.env.clock() == 5.0);
    for (const auto& e : log.events) CHECK(e.kind == EventKind::walker_ring);

    System frozen(pr, InitMode::all_closed, make_rng(3, 0));
    frozen.add_walker(7);
    advance(frozen, 50.0);
    CHECK(frozen.walkers[0].position == 7);

    CHECK_THROWS_AS(advance(frozen, 1.0), std::invalid_argument);  // t_end < clock
}

TEST_CASE("refresh event count is Poisson(mu N t) on average") {
    Params pr{100, 2.0, 0.01};
    const int reps = 10000;
    const double t_end = 50.0;
    std::vector<double> counts;
    counts.reserve(reps);
    EventLog log;
    for (int r = 0; r < reps; ++r) {
        auto rng = make_rng(99, replica_stream(r));
        System sys(pr, InitMode::stationary, rng);
        log.events.clear();
        advance(sys, t_end, &log);
        counts.push_back(static_cast<double>(log.events.size()));
    }
    auto est = mean_estimate(counts, 99);
    double want = pr.mu * static_cast<double>(pr.N()) * t_end;  // 2475
    CHECK(std::fabs(est.value - want) <= 3.0 * est.std_error);
}

TEST_CASE("stationarity is preserved: open count stays Binomial(N,p)") {
    Params pr{30, 2.0, 0.5};
    const long reps = 10000;
    const double t_end = 3.0;
    std::vector<long long> breaks;
    std::vector<double> probs;
    pooled_binomial_cells(pr.N(), pr.p(), reps, 10.0, breaks, probs);
    std::vector<long> observed(probs.size(), 0);
    for (long r = 0; r < reps; ++r) {
        auto rng = make_rng(1234, replica_stream(r));
        System sys(pr, InitMode::stationary, rng);
        advance(sys, t_end);
        ++observed[cell_of(sys.env.open_count(), breaks)];
    }
    double pval = chi_square_pvalue(observed, probs);
    CHECK(pval > 1e-3);
}

TEST_CASE("single edge marginal from all open") {
    Params pr{20, 2.0, 0.3};
    const long reps = 10000;
    const double t = 2.0;
    long open_hits = 0;
    for (long r = 0; r < reps; ++r) {
        auto rng = make_rng(555, replica_stream(r));
        System sys(pr, InitMode::all_open, rng);
        advance(sys, t);
        if (sys.env.is_open(0, 1)) ++open_hits;
    }
    auto est = proportion_estimate(open_hits, reps, 555);
    double want = pr.p() + std::exp(-pr.mu * t) * (1.0 - pr.p());
    CHECK(std::fabs(est.value - want) <= 3.0 * est.std_error);
}

TEST_CASE("run_until trivial and misuse cases") {
    Params pr{10, 2.0, 0.1};
    std::vector<std::pair<int, int>> edges{{0, 1}};
    System sys(pr, InitMode::explicit_edges, make_rng(4, 0), &edges);
    sys.add_walker(5);  // isolated
    auto res = run_until(sys, Predicate::walker_isolated(0), 100.0);
    CHECK(res.stop_time == 0.0);
    CHECK_FALSE(res.censored);

    System one(pr, InitMode::stationary, make_rng(5, 0));
    one.add_walker(0);
    CHECK_THROWS_WITH_AS(run_until(one, Predicate::both_isolated(), 1.0),
                         "predicate arity mismatch: both_isolated needs two walkers",
                         std::invalid_argument);
}

TEST_CASE("run_until censors at the cap") {
    Params pr{10, 2.0, 0.0};  // frozen: walker on a closed pair can never isolate the env change
    std::vector<std::pair<int, int>> edges{{0, 1}};
    System sys(pr, InitMode::explicit_edges, make_rng(6, 0), &edges);
    sys.add_walker(0);  // degree 1, never isolated since mu = 0
    auto res = run_until(sys, Predicate::walker_isolated(0), 3.0);
    CHECK(res.censored);
    CHECK(res.stop_time == 3.0);
    CHECK(sys.env.clock() == 3.0);
}

TEST_CASE("giant membership predicates recompute lazily") {
    Params pr{6, 2.0, 0.1};
    std::vector<std::pair<int, int>> edges{{0, 1}, {1, 2}, {3, 4}};
    System sys(pr, InitMode::explicit_edges, make_rng(7, 0), &edges);
    sys.add_walker(0);
    sys.add_walker(3);
    CHECK(sys.in_giant(0));
    CHECK_FALSE(sys.in_giant(3));
    // Grow {3,4} into the new giant; the cached components must refresh.
    sys.env.set_edge(3, 5, true);
    sys.env.set_edge(4, 5, true);
    sys.env.set_edge(0, 1, false);
    CHECK_FALSE(sys.in_giant(0));
    CHECK(sys.in_giant(3));

    Predicate out = Predicate::walker_out_of_giant(0);
    CHECK(out.evaluate(sys));
}

TEST_CASE("isolation window for a degree-1 start (scaled variant)") {
    // P(tau_isol <= s) must sit in [mu s/4, mu s/(1-p)] for small mu s; checked
    // with a 3-sigma allowance on a 500-replica estimate.
    Params pr{100, 2.0, 3e-5};
    const double s = 100.0 * std::pow(std::log(100.0), 3.0);
    const long reps = 500;
    long hits = 0;
    for (long r = 0; r < reps; ++r) {
        auto rng = make_rng(777, replica_stream(r));
        System sys(pr, InitMode::stationary, rng);
        // place the walker on a degree-1 vertex, resampling the env if needed
        int pos = -1;
        while (pos < 0) {
            for (int v = 0; v < pr.n; ++v)
                if (sys.env.degree(v) == 1) {
                    pos = v;
                    break;
                }
            if (pos < 0) sys = System(pr, InitMode::stationary, make_rng(777, replica_stream(r) + 31), nullptr);
        }
        sys.add_walker(pos);
        auto res = run_until(sys, Predicate::walker_isolated(0), s);
        if (!res.censored) ++hits;
    }
    auto est = proportion_estimate(hits, reps, 777);
    double mus = pr.mu * s;
    CHECK(est.value + 3.0 * est.std_error >= mus / 4.0);
    CHECK(est.value - 3.0 * est.std_error <= mus / (1.0 - pr.p()));
}

TEST_CASE("replay determinism and log round-trip") {
    Params pr{15, 2.0, 0.4};
    auto rng = make_rng(31337, 0);
    System sys(pr, InitMode::stationary, rng);
    sys.add_walker(2);
    sys.add_walker(9);
    System initial = sys;

    EventLog log;
    advance(sys, 8.0, &log);
    for (std::size_t i = 1; i < log.events.size(); ++i)
        CHECK(log.events[i - 1].time < log.events[i].time);

    // Same seed, same trajectory.
    System sys2 = initial;
    EventLog log2;
    advance(sys2, 8.0, &log2);
    REQUIRE(log.events.size() == log2.events.size());
    CHECK(sys2.env == sys.env);
    CHECK(sys2.walkers[0].position == sys.walkers[0].position);

    // Replaying the log reproduces the final state exactly.
    System re = replay(initial, log);
    CHECK(re.env == sys.env);
    CHECK(re.walkers[1].position == sys.walkers[1].position);
    sys.env.check_invariants();

    // CSV round-trip.
    std::string csv = log.to_csv();
    std::istringstream in(csv);
    EventLog parsed = EventLog::from_csv(in);
    REQUIRE(parsed.events.size() == log.events.size());
    for (std::size_t i = 0; i < parsed.events.size(); ++i) {
        CHECK(parsed.events[i].time == log.events[i].time);
        CHECK(parsed.events[i].kind == log.events[i].kind);
        CHECK(parsed.events[i].a == log.events[i].a);
        CHECK(parsed.events[i].b == log.events[i].b);
        CHECK(parsed.events[i].c == log.events[i].c);
    }
    System re2 = replay(initial, parsed);
    CHECK(re2.env == sys.env);
}
