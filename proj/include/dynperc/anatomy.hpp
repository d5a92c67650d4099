#pragma once

// Generative model of the supercritical giant component: a configuration-model
// kernel on Poisson degrees conditioned >= 3, kernel edges expanded into
// geometric-length paths, and subcritical Poisson Galton-Watson trees hung on
// every core vertex.  The resulting graph matches the law of the giant of
// G(n, lambda/n) closely enough that summary statistics agree with direct
// sampling; compare_anatomy_vs_er quantifies the gaps.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "dynperc/graph.hpp"
#include "dynperc/stats.hpp"

namespace dynperc {

// Unique solution in [0,1] of theta e^-theta = lambda e^-lambda (bisection to
// residual < 1e-12); for lambda <= 1 the solution is lambda itself.
// Throws std::invalid_argument for lambda <= 0.
double solve_theta(double lambda);

// Asymptotic giant fraction beta = 1 - theta/lambda, equivalently the positive
// fixed point of beta = 1 - e^(-lambda beta); returns 0 for lambda <= 1.
double giant_fraction(double lambda);

// Derived parameters of the generative model at (n, lambda).
struct AnatomyParams {
    long n = 0;
    double lambda = 0.0;
    double theta = 0.0;  // dual parameter
    double chi = 0.0;    // lambda - theta, the kernel-degree Poisson mean

    // Throws std::invalid_argument unless lambda > 1 and n >= 1.
    static AnatomyParams make(long n, double lambda);
};

struct DegreeSequence {
    std::vector<int> degrees;

    long long half_edges() const;   // M = sum d_i
    long long pair_sum() const;     // N2 = sum d_i (d_i - 1)
    int max_degree() const;
};

// Uniform random perfect matching on the half-edges; the output multigraph has
// exactly the requested degrees, loops counting 2.  Throws std::invalid_argument
// when M is odd or any degree is negative.
Multigraph sample_configuration_model(const DegreeSequence& d, std::mt19937_64& rng);

struct SimplicityBound {
    double value = 1.0;
    bool degree_condition_ok = false;   // max d_i <= M^(1/4)
    // The bound evaluates exp(-N2/(2M) - N2^2/(4M^2) - N2^2/(2M^3)); the
    // asymptotic O(M^(-1/4)) error term is always omitted.
    bool correction_omitted = true;
};

// Lower bound on P(configuration model on d is simple).  By default the
// max-degree condition backing the bound is enforced (violation throws);
// pass enforce_degree_condition = false to evaluate anyway, with
// degree_condition_ok reporting the violation.  M = 0 gives bound 1.
SimplicityBound simplicity_lower_bound(const DegreeSequence& d,
                                       bool enforce_degree_condition = true);

// Total progeny (root included) of a Galton-Watson tree with Poisson(mean)
// offspring; requires mean < 1 so the tree is almost surely finite.
long long sample_poisson_tree_size(double offspring_mean, std::mt19937_64& rng);

// Per-kernel-edge path lengths, i.i.d. Geometric(1-theta) on {1,2,...}
// conditioned on a simple expansion: loops need length >= 3, and each parallel
// class admits at most one direct (length-1) edge.  The conditioning
// factorizes over loops and parallel classes, so the law is sampled exactly;
// `conditioned_groups` counts the groups that actually needed conditioning.
// Requires theta in (0,1).
std::vector<int> sample_path_lengths(const Multigraph& kernel, double theta,
                                     std::mt19937_64& rng, long& conditioned_groups);

struct AnatomySample {
    Graph graph;                 // the proposed giant, always simple
    Multigraph kernel;           // the kernel the sample was built from
    std::vector<int> kernel_path_lengths;  // per kernel edge, in edges
    long long core_size = 0;     // kernel vertices + path internals
    long long tree_vertices = 0; // vertices added by the hanging trees
    long parity_retries = 0;     // full-vector redraws of the degree sequence
    long conditioned_path_groups = 0;  // loops / parallel classes needing conditioning
};

// Three-step sampler: (1) X ~ Normal(chi, 1/n), D_1..D_n i.i.d. Poisson(X+),
// redrawn until the degree->=3 subsequence has even sum and is nonempty;
// kernel = configuration model on that subsequence.  (2) every kernel edge
// becomes a path of Geometric(1 - theta) length (>= 1 edge), conditioned on
// the expansion being simple: loops need length >= 3 and each parallel class
// admits at most one direct edge.  The simplicity event factorizes over loops
// and parallel classes, so the conditional law is sampled exactly (no
// rejection).  (3) a Poisson(theta) Galton-Watson tree hangs on every core
// vertex.  Throws std::runtime_error with diagnostics when the degree-vector
// rejection loop exceeds its retry cap.
AnatomySample sample_anatomy(long n, double lambda, std::mt19937_64& rng);
AnatomySample sample_anatomy(long n, double lambda, std::uint64_t seed);

// Summary statistics of a (proposed or actual) giant, all isomorphism
// invariant: vertex count, 2-core size, kernel size, degree-1 count, largest
// kernel-edge decoration.
struct GiantSummary {
    long long giant = 0;
    long long core = 0;
    long long kernel = 0;
    long long deg1 = 0;
    long long max_decoration = 0;
};

GiantSummary summarize_giant(const Graph& giant);

inline constexpr int kSummaryFields = 5;
extern const char* const kSummaryFieldNames[kSummaryFields];
long long summary_field(const GiantSummary& s, int field);

struct SummaryGap {
    std::string name;
    Estimate reference;    // direct G(n, lambda/n) giants
    Estimate candidate;    // generative model
    double relative_gap = 0.0;  // |candidate - reference| / reference means
};

struct AnatomyComparison {
    long n = 0;
    double lambda = 0.0;
    long replicas = 0;
    std::uint64_t master_seed = 0;
    std::vector<SummaryGap> gaps;             // one per summary field, fixed order
    std::vector<GiantSummary> reference_rows; // per-replica, for CSV export
    std::vector<GiantSummary> candidate_rows;

    std::string to_json() const;
};

// Field-by-field comparison of two summary ensembles (self-comparison of the
// same ensemble gives all gaps exactly 0).
AnatomyComparison compare_summaries(const std::vector<GiantSummary>& reference,
                                    const std::vector<GiantSummary>& candidate,
                                    std::uint64_t master_seed);

// Draws `replicas` direct giants and `replicas` generative samples and compares
// them.  Throws std::invalid_argument for lambda <= 1 or replicas < 30.
AnatomyComparison compare_anatomy_vs_er(long n, double lambda, long replicas,
                                        std::uint64_t seed);

}  // namespace dynperc
