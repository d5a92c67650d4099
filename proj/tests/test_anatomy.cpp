#include "dynperc/anatomy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "dynperc/graph.hpp"
#include "dynperc/rng.hpp"
#include "dynperc/structure.hpp"
#include "json.hpp"

using namespace dynperc;

TEST_CASE("theta solver: frozen values, residual contract, domain") {
    CHECK(solve_theta(2.0) == doctest::Approx(0.40637573995995991).epsilon(1e-11));
    CHECK(solve_theta(1.1) == doctest::Approx(0.90625244200500942).epsilon(1e-11));
    CHECK(solve_theta(5.0) == doctest::Approx(0.034885768255723696).epsilon(1e-11));
    CHECK(solve_theta(1.0) == 1.0);
    CHECK(solve_theta(0.5) == 0.5);  // at or below 1 the fixed point is lambda itself

    // Residual identity on a 100-point grid across the supercritical range.
    for (int i = 0; i < 100; ++i) {
        const double lambda = 1.01 + (10.0 - 1.01) * i / 99.0;
        const double theta = solve_theta(lambda);
        CHECK(std::abs(theta * std::exp(-theta) - lambda * std::exp(-lambda)) < 1e-12);
        CHECK(theta >= 0.0);
        CHECK(theta < 1.0);
    }

    CHECK_THROWS_AS(solve_theta(0.0), std::invalid_argument);
    CHECK_THROWS_AS(solve_theta(-1.0), std::invalid_argument);
}

TEST_CASE("giant fraction: frozen values and fixed-point cross-check") {
    CHECK(giant_fraction(2.0) == doctest::Approx(0.79681213002002005).epsilon(1e-10));
    CHECK(giant_fraction(5.0) == doctest::Approx(0.99302284634885526).epsilon(1e-10));
    CHECK(giant_fraction(1.0) == 0.0);
    CHECK(giant_fraction(0.5) == 0.0);
    CHECK(giant_fraction(1.0001) < 0.001);  // vanishes at the critical point

    // beta must also solve beta = 1 - e^(-lambda beta).
    for (double lambda : {1.1, 1.5, 2.0, 3.0, 5.0, 8.0}) {
        const double beta = giant_fraction(lambda);
        CHECK(std::abs(beta - (1.0 - std::exp(-lambda * beta))) < 1e-9);
    }
}

TEST_CASE("configuration model: forced matchings, degree exactness, odd sum rejected") {
    auto rng = make_rng(0xc0f1ULL, 0);

    // A single vertex of degree 2 can only match its two half-edges together.
    for (int rep = 0; rep < 20; ++rep) {
        const Multigraph g = sample_configuration_model({{2}}, rng);
        REQUIRE(g.edges.size() == 1);
        CHECK(g.edges[0] == std::pair<int, int>{0, 0});
        CHECK(g.degrees() == std::vector<int>{2});
        CHECK(g.loop_count() == 1);
    }
    // Two degree-1 vertices force the single edge.
    for (int rep = 0; rep < 20; ++rep) {
        const Multigraph g = sample_configuration_model({{1, 1}}, rng);
        REQUIRE(g.edges.size() == 1);
        CHECK(g.edges[0] == std::pair<int, int>{0, 1});
    }

    CHECK_THROWS_AS(sample_configuration_model({{3, 3, 1}}, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_configuration_model({{2, -1, 1}}, rng), std::invalid_argument);

    // Degree exactness on irregular sequences, loops counting 2.
    std::poisson_distribution<int> po(2.0);
    for (int rep = 0; rep < 50; ++rep) {
        DegreeSequence d;
        for (int i = 0; i < 40; ++i) d.degrees.push_back(po(rng));
        if (d.half_edges() % 2 != 0) d.degrees.push_back(1);
        const Multigraph g = sample_configuration_model(d, rng);
        CHECK(g.degrees() == d.degrees);
    }
}

TEST_CASE("configuration model simplicity on (3,3,3,3) matches exhaustive enumeration") {
    // All 11!! = 10395 matchings on 12 half-edges, 1296 simple.
    const double exact = 1296.0 / 10395.0;
    auto rng = make_rng(0x51e9ULL, 0);
    const long reps = 100000;
    long simple = 0;
    for (long r = 0; r < reps; ++r)
        if (sample_configuration_model({{3, 3, 3, 3}}, rng).is_simple()) ++simple;
    const double freq = static_cast<double>(simple) / reps;
    const double se = std::sqrt(exact * (1.0 - exact) / reps);
    CHECK(std::abs(freq - exact) <= 3.0 * se);
}

TEST_CASE("simplicity lower bound: frozen value, degree condition, validity at the exact point") {
    // Two degree-1 vertices: N2 = 0, bound exactly 1.
    const auto trivial = simplicity_lower_bound({{1, 1, 0, 0}});
    CHECK(trivial.value == 1.0);
    CHECK(trivial.degree_condition_ok);

    CHECK(simplicity_lower_bound({{}}).value == 1.0);

    // (3,3,3,3) violates max d <= M^(1/4) = 12^(1/4); the checked call refuses,
    // the unchecked one evaluates exp(-1 - 1 - 1/6).
    CHECK_THROWS_AS(simplicity_lower_bound({{3, 3, 3, 3}}), std::invalid_argument);
    const auto mw = simplicity_lower_bound({{3, 3, 3, 3}}, false);
    CHECK(mw.value == doctest::Approx(0.11455884399268773).epsilon(1e-12));
    CHECK_FALSE(mw.degree_condition_ok);
    CHECK(mw.correction_omitted);

    // Even at this tiny size the bound sits below the exhaustive probability.
    CHECK(mw.value <= 1296.0 / 10395.0);
}

TEST_CASE("simplicity bound is one-sided against sampling on a real core sequence") {
    auto rng = make_rng(0x2b3cULL, 7);
    const Graph g = erdos_renyi(500, 2.0 / 500.0, rng);
    const auto comps = components_and_giant(g);
    const Graph giant = induced_subgraph(g, comps.giant_vertices);
    const auto core = core_of(giant);

    DegreeSequence d;
    for (int v = 0; v < core.core.n; ++v) d.degrees.push_back(core.core.degree(v));
    REQUIRE(d.half_edges() > 0);
    if (d.half_edges() % 2 != 0) d.degrees.push_back(1);  // parity pad, does not occur for a 2-core

    const auto bound = simplicity_lower_bound(d, false);
    const long reps = 2000;
    long simple = 0;
    for (long r = 0; r < reps; ++r)
        if (sample_configuration_model(d, rng).is_simple()) ++simple;
    const double freq = static_cast<double>(simple) / reps;
    const double se = std::sqrt(std::max(freq * (1.0 - freq), 1e-12) / reps);
    CHECK(freq >= bound.value - 3.0 * se);
}

TEST_CASE("subcritical Poisson tree size: mean formula and domain") {
    auto rng = make_rng(0x7eeeULL, 0);
    CHECK_THROWS_AS(sample_poisson_tree_size(1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_poisson_tree_size(-0.1, rng), std::invalid_argument);
    CHECK(sample_poisson_tree_size(0.0, rng) == 1);

    const double theta = solve_theta(2.0);
    const long reps = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (long r = 0; r < reps; ++r) {
        const double s = static_cast<double>(sample_poisson_tree_size(theta, rng));
        sum += s;
        sumsq += s * s;
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sumsq / reps - mean * mean) / reps);
    CHECK(std::abs(mean - 1.684567271446335) <= 3.0 * se);  // 1/(1-theta) at lambda=2
}

TEST_CASE("conditioned path lengths match whole-vector rejection sampling in law") {
    const double theta = solve_theta(2.0);
    auto rng = make_rng(0x9a71ULL, 0);

    // Loop: lengths are Geometric conditioned >= 3, so P(L=3) = 1-theta and
    // the mean is 2 + 1/(1-theta).
    Multigraph loop(1);
    loop.add_edge(0, 0);
    const long reps = 100000;
    long at3 = 0;
    double mean = 0.0;
    long groups = 0;
    for (long r = 0; r < reps; ++r) {
        const auto len = sample_path_lengths(loop, theta, rng, groups);
        REQUIRE(len.size() == 1);
        REQUIRE(len[0] >= 3);
        at3 += len[0] == 3;
        mean += len[0];
    }
    CHECK(groups == reps);
    double se = std::sqrt(theta * (1.0 - theta) / reps);
    CHECK(std::abs(static_cast<double>(at3) / reps - (1.0 - theta)) <= 3.0 * se);
    CHECK(mean / reps == doctest::Approx(2.0 + 1.0 / (1.0 - theta)).epsilon(0.01));

    // Triple edge: compare the exact group sampler against brute-force
    // rejection (redraw three unconditioned geometrics until at most one
    // equals 1) on the probability that no edge is direct.
    Multigraph triple(2);
    for (int e = 0; e < 3; ++e) triple.add_edge(0, 1);
    long no_direct_exact = 0;
    for (long r = 0; r < reps; ++r) {
        const auto len = sample_path_lengths(triple, theta, rng, groups);
        const long direct = std::count(len.begin(), len.end(), 1);
        REQUIRE(direct <= 1);
        no_direct_exact += direct == 0;
    }
    std::geometric_distribution<int> fails(1.0 - theta);
    long no_direct_reject = 0;
    for (long r = 0; r < reps; ++r) {
        int direct;
        do {
            direct = 0;
            for (int e = 0; e < 3; ++e) direct += fails(rng) == 0;
        } while (direct > 1);
        no_direct_reject += direct == 0;
    }
    // Closed form: theta / (theta + 3 (1-theta)).
    const double p0 = theta / (theta + 3.0 * (1.0 - theta));
    se = std::sqrt(p0 * (1.0 - p0) / reps);
    CHECK(std::abs(static_cast<double>(no_direct_exact) / reps - p0) <= 3.0 * se);
    CHECK(std::abs(static_cast<double>(no_direct_reject) / reps - p0) <= 3.0 * se);

    // Singleton edges stay plain geometric: P(L=1) = 1-theta.
    Multigraph single(2);
    single.add_edge(0, 1);
    long direct_single = 0;
    const long before = groups;
    for (long r = 0; r < reps; ++r)
        direct_single += sample_path_lengths(single, theta, rng, groups)[0] == 1;
    CHECK(groups == before);  // nothing to condition
    se = std::sqrt(theta * (1.0 - theta) / reps);
    CHECK(std::abs(static_cast<double>(direct_single) / reps - (1.0 - theta)) <= 3.0 * se);

    long dummy = 0;
    CHECK_THROWS_AS(sample_path_lengths(single, 1.0, rng, dummy), std::invalid_argument);
}

TEST_CASE("anatomy sampler: internal consistency and kernel round-trip") {
    auto rng = make_rng(0xa11ceULL, 3);
    const AnatomySample s = sample_anatomy(1000, 2.0, rng);

    // Bookkeeping adds up.
    long long internals = 0;
    for (std::size_t e = 0; e < s.kernel.edges.size(); ++e) {
        CHECK(s.kernel_path_lengths[e] >= 1);
        internals += s.kernel_path_lengths[e] - 1;
    }
    CHECK(s.core_size == s.kernel.n + internals);
    CHECK(s.graph.n == s.core_size + s.tree_vertices);

    // Kernel degrees are all >= 3 by construction.
    for (int deg : s.kernel.degrees()) CHECK(deg >= 3);

    // Round-trip: recovering the kernel from the assembled graph reproduces
    // the one the sample was built from (isomorphism-invariant statistics).
    const KernelResult rt = kernel_of(s.graph);
    CHECK(rt.kernel.n == s.kernel.n);
    CHECK(rt.kernel.edges.size() == s.kernel.edges.size());
    auto built = s.kernel.degrees();
    auto recovered = rt.kernel.degrees();
    std::sort(built.begin(), built.end());
    std::sort(recovered.begin(), recovered.end());
    CHECK(built == recovered);
    CHECK(rt.kernel.loop_count() == s.kernel.loop_count());
    CHECK(rt.deleted_cycles == 0);

    // Path lengths round-trip as a multiset too.
    std::vector<int> built_len = s.kernel_path_lengths, rec_len;
    for (const auto& e : rt.edges) rec_len.push_back(e.path_length);
    std::sort(built_len.begin(), built_len.end());
    std::sort(rec_len.begin(), rec_len.end());
    CHECK(built_len == rec_len);

    CHECK_THROWS_AS(sample_anatomy(1000, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sample_anatomy(0, 2.0, rng), std::invalid_argument);
}

TEST_CASE("anatomy sampler: core/kernel ratio approaches 1 for large lambda") {
    // theta(8) ~ 0.0027, so geometric path lengths are almost all 1 and the
    // core barely exceeds the kernel.
    auto rng = make_rng(0xbeefULL, 1);
    double ratio_sum = 0.0;
    const int reps = 20;
    for (int r = 0; r < reps; ++r) {
        const AnatomySample s = sample_anatomy(500, 8.0, rng);
        ratio_sum += static_cast<double>(s.core_size) / static_cast<double>(s.kernel.n);
    }
    CHECK(ratio_sum / reps == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("anatomy sampler tracks the giant-fraction asymptotics") {
    // Mean proposal size over replicas should sit near beta * n.
    auto rng = make_rng(0xfadeULL, 2);
    const long n = 1000;
    const int reps = 60;
    double mean = 0.0;
    for (int r = 0; r < reps; ++r) mean += static_cast<double>(sample_anatomy(n, 2.0, rng).graph.n);
    mean /= reps;
    CHECK(mean == doctest::Approx(giant_fraction(2.0) * n).epsilon(0.05));
}

TEST_CASE("summary comparison: self-comparison gives zero gaps, full run stays close") {
    std::vector<GiantSummary> ens;
    auto rng = make_rng(0x909ULL, 0);
    for (int r = 0; r < 40; ++r) {
        const Graph g = erdos_renyi(300, 2.0 / 300.0, rng);
        const auto comps = components_and_giant(g);
        ens.push_back(summarize_giant(induced_subgraph(g, comps.giant_vertices)));
    }
    const AnatomyComparison self = compare_summaries(ens, ens, 0x909ULL);
    REQUIRE(self.gaps.size() == kSummaryFields);
    for (const auto& gap : self.gaps) {
        CHECK(gap.relative_gap == 0.0);
        CHECK(gap.reference.value == gap.candidate.value);
    }

    CHECK_THROWS_AS(compare_anatomy_vs_er(300, 1.0, 50, 1), std::invalid_argument);
    CHECK_THROWS_AS(compare_anatomy_vs_er(300, 2.0, 10, 1), std::invalid_argument);

    // Loose agreement already at n=300 with 60 replicas; the tight 5% gate at
    // n=1000 with 200 replicas runs in the acceptance suite.
    const AnatomyComparison cmp = compare_anatomy_vs_er(300, 2.0, 60, 0x77aa);
    REQUIRE(cmp.gaps.size() == kSummaryFields);
    REQUIRE(cmp.reference_rows.size() == 60);
    REQUIRE(cmp.candidate_rows.size() == 60);
    for (const auto& gap : cmp.gaps) {
        INFO(gap.name);
        CHECK(gap.relative_gap < 0.15);
    }

    // The JSON report parses and carries one entry per summary field.
    const auto j = nlohmann::json::parse(cmp.to_json());
    CHECK(j["n"] == 300);
    CHECK(j["replicas"] == 60);
    REQUIRE(j["stats"].size() == kSummaryFields);
    CHECK(j["stats"][0]["name"] == "giant");
    CHECK(j["stats"][0].contains("relative_gap"));
}
