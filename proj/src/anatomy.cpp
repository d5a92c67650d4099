#include "dynperc/anatomy.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <map>

#include "dynperc/rng.hpp"
#include "dynperc/structure.hpp"
#include "json.hpp"

namespace dynperc {

double solve_theta(double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("solve_theta: lambda must be positive");
    if (lambda <= 1.0) return lambda;
    // theta e^-theta is strictly increasing on [0,1], so bisection brackets the
    // unique root of theta e^-theta = lambda e^-lambda there.
    const double target = lambda * std::exp(-lambda);
    double lo = 0.0, hi = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (mid * std::exp(-mid) < target ? lo : hi) = mid;
    }
    const double theta = 0.5 * (lo + hi);
    assert(std::abs(theta * std::exp(-theta) - target) < 1e-12);
    return theta;
}

double giant_fraction(double lambda) {
    if (lambda <= 1.0) return 0.0;
    return 1.0 - solve_theta(lambda) / lambda;
}

AnatomyParams AnatomyParams::make(long n, double lambda) {
    if (!(lambda > 1.0))
        throw std::invalid_argument("anatomy: lambda must exceed 1 (no giant otherwise)");
    if (n < 1) throw std::invalid_argument("anatomy: n must be positive");
    AnatomyParams ap;
    ap.n = n;
    ap.lambda = lambda;
    ap.theta = solve_theta(lambda);
    ap.chi = lambda - ap.theta;
    return ap;
}

long long DegreeSequence::half_edges() const {
    long long m = 0;
    for (int d : degrees) m += d;
    return m;
}

long long DegreeSequence::pair_sum() const {
    long long s = 0;
    for (int d : degrees) s += static_cast<long long>(d) * (d - 1);
    return s;
}

int DegreeSequence::max_degree() const {
    return degrees.empty() ? 0 : *std::max_element(degrees.begin(), degrees.end());
}

Multigraph sample_configuration_model(const DegreeSequence& d, std::mt19937_64& rng) {
    for (int deg : d.degrees)
        if (deg < 0) throw std::invalid_argument("configuration model: negative degree");
    const long long m = d.half_edges();
    if (m % 2 != 0)
        throw std::invalid_argument("configuration model: odd half-edge count " + std::to_string(m));

    std::vector<int> half;
    half.reserve(static_cast<std::size_t>(m));
    for (std::size_t v = 0; v < d.degrees.size(); ++v)
        half.insert(half.end(), static_cast<std::size_t>(d.degrees[v]), static_cast<int>(v));

    // A uniform shuffle paired off consecutively is a uniform perfect matching.
    std::shuffle(half.begin(), half.end(), rng);
    Multigraph g(static_cast<int>(d.degrees.size()));
    for (std::size_t i = 0; i + 1 < half.size(); i += 2) g.add_edge(half[i], half[i + 1]);

    assert(g.degrees() == d.degrees);
    return g;
}

SimplicityBound simplicity_lower_bound(const DegreeSequence& d, bool enforce_degree_condition) {
    const double m = static_cast<double>(d.half_edges());
    const double n2 = static_cast<double>(d.pair_sum());
    SimplicityBound out;
    out.degree_condition_ok = static_cast<double>(d.max_degree()) <= std::pow(m, 0.25);
    if (enforce_degree_condition && !out.degree_condition_ok)
        throw std::invalid_argument(
            "simplicity_lower_bound: max degree exceeds M^(1/4); pass "
            "enforce_degree_condition=false to evaluate the formula anyway");
    if (m == 0.0) return out;  // empty sequence: trivially simple
    out.value = std::exp(-n2 / (2.0 * m) - n2 * n2 / (4.0 * m * m) - n2 * n2 / (2.0 * m * m * m));
    return out;
}

long long sample_poisson_tree_size(double offspring_mean, std::mt19937_64& rng) {
    if (offspring_mean < 0.0 || offspring_mean >= 1.0)
        throw std::invalid_argument("poisson tree: offspring mean must lie in [0,1) (subcritical)");
    if (offspring_mean == 0.0) return 1;
    std::poisson_distribution<long> po(offspring_mean);
    long long size = 1, pending = 1;
    while (pending > 0) {
        const long c = po(rng);
        size += c;
        pending += c - 1;
    }
    return size;
}

namespace {

constexpr long kRetryCap = 10000;

// Kernel degrees: the >=3 entries of n i.i.d. Poisson(x) draws, redrawn as a
// whole vector until their sum is even and the subsequence is nonempty.
DegreeSequence draw_kernel_degrees(long n, double x, std::mt19937_64& rng, long& retries) {
    DegreeSequence kd;
    for (long attempt = 0; attempt < kRetryCap; ++attempt) {
        kd.degrees.clear();
        if (x > 0.0) {
            std::poisson_distribution<int> po(x);
            for (long i = 0; i < n; ++i) {
                const int di = po(rng);
                if (di >= 3) kd.degrees.push_back(di);
            }
        }
        if (!kd.degrees.empty() && kd.half_edges() % 2 == 0) return kd;
        ++retries;
    }
    throw std::runtime_error(
        "sample_anatomy: no nonempty even-sum kernel degree vector in " +
        std::to_string(kRetryCap) + " draws (n=" + std::to_string(n) +
        ", Poisson mean X=" + std::to_string(x) + "); the kernel is degenerate at these parameters");
}

}  // namespace

// Memorylessness gives L | L >= k as k-1 plus a fresh draw, and within a
// parallel class of size k the allowed configurations are "no direct edge"
// (weight theta^k) or "edge j direct" (weight (1-theta) theta^(k-1) each), so
// each group is sampled exactly in O(size).
std::vector<int> sample_path_lengths(const Multigraph& kernel, double theta, std::mt19937_64& rng,
                                     long& conditioned_groups) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("sample_path_lengths: theta must lie in (0,1)");
    std::geometric_distribution<int> failures(1.0 - theta);
    std::vector<int> len(kernel.edges.size(), 0);

    std::map<std::pair<int, int>, std::vector<std::size_t>> classes;
    for (std::size_t e = 0; e < kernel.edges.size(); ++e) classes[kernel.edges[e]].push_back(e);

    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (const auto& [pair, members] : classes) {
        if (pair.first == pair.second) {
            // Loops, conditioned on length >= 3.
            for (std::size_t e : members) len[e] = 3 + failures(rng);
            conditioned_groups += static_cast<long>(members.size());
        } else if (members.size() == 1) {
            len[members[0]] = 1 + failures(rng);
        } else {
            // P(one direct) / P(no direct) = k (1-theta) / theta.
            const auto k = static_cast<double>(members.size());
            const double odds_no_direct = theta / (k * (1.0 - theta));
            const bool one_direct = u01(rng) * (1.0 + odds_no_direct) < 1.0;
            std::size_t direct_edge = members.size();
            if (one_direct) {
                std::uniform_int_distribution<std::size_t> pick(0, members.size() - 1);
                direct_edge = pick(rng);
            }
            for (std::size_t i = 0; i < members.size(); ++i)
                len[members[i]] = i == direct_edge ? 1 : 2 + failures(rng);
            ++conditioned_groups;
        }
    }
    return len;
}

AnatomySample sample_anatomy(long n, double lambda, std::mt19937_64& rng) {
    const AnatomyParams ap = AnatomyParams::make(n, lambda);

    std::normal_distribution<double> normal(ap.chi, 1.0 / std::sqrt(static_cast<double>(n)));
    const double x = std::max(0.0, normal(rng));

    AnatomySample out;
    const DegreeSequence kd = draw_kernel_degrees(n, x, rng, out.parity_retries);
    out.kernel = sample_configuration_model(kd, rng);
    out.kernel_path_lengths =
        sample_path_lengths(out.kernel, ap.theta, rng, out.conditioned_path_groups);

    // Expand kernel edges into paths; kernel vertices keep ids 0..K-1 and
    // internal vertices are appended.
    std::vector<std::pair<int, int>> edges;
    int next = out.kernel.n;
    for (std::size_t e = 0; e < out.kernel.edges.size(); ++e) {
        auto [a, b] = out.kernel.edges[e];
        int prev = a;
        for (int s = 1; s < out.kernel_path_lengths[e]; ++s) {
            edges.emplace_back(prev, next);
            prev = next++;
        }
        edges.emplace_back(prev, b);
    }
    out.core_size = next;

    // Hang a subcritical Galton-Watson tree on every core vertex.
    std::poisson_distribution<long> offspring(ap.theta);
    std::vector<int> stack;
    for (int v = 0; v < out.core_size; ++v) {
        stack.assign(1, v);
        while (!stack.empty()) {
            const int u = stack.back();
            stack.pop_back();
            const long children = offspring(rng);
            for (long c = 0; c < children; ++c) {
                edges.emplace_back(u, next);
                stack.push_back(next++);
            }
        }
    }
    out.tree_vertices = next - out.core_size;

    Graph g(next);
    for (auto [u, v] : edges) g.add_edge(u, v);
    out.graph = std::move(g);
    return out;
}

AnatomySample sample_anatomy(long n, double lambda, std::uint64_t seed) {
    auto rng = make_rng(seed, 0);
    return sample_anatomy(n, lambda, rng);
}

GiantSummary summarize_giant(const Graph& giant) {
    GiantSummary s;
    s.giant = giant.n;
    s.core = static_cast<long long>(core_of(giant).vertices.size());
    s.kernel = kernel_of(giant).kernel.n;
    for (int v = 0; v < giant.n; ++v)
        if (giant.degree(v) == 1) ++s.deg1;
    s.max_decoration = decoration_stats(giant).max_size;
    return s;
}

const char* const kSummaryFieldNames[kSummaryFields] = {"giant", "core", "kernel", "deg1",
                                                        "max_decoration"};

long long summary_field(const GiantSummary& s, int field) {
    switch (field) {
        case 0: return s.giant;
        case 1: return s.core;
        case 2: return s.kernel;
        case 3: return s.deg1;
        case 4: return s.max_decoration;
        default: throw std::invalid_argument("summary_field: index out of range");
    }
}

AnatomyComparison compare_summaries(const std::vector<GiantSummary>& reference,
                                    const std::vector<GiantSummary>& candidate,
                                    std::uint64_t master_seed) {
    AnatomyComparison cmp;
    cmp.master_seed = master_seed;
    cmp.replicas = static_cast<long>(std::min(reference.size(), candidate.size()));
    cmp.reference_rows = reference;
    cmp.candidate_rows = candidate;
    for (int f = 0; f < kSummaryFields; ++f) {
        SummaryGap gap;
        gap.name = kSummaryFieldNames[f];
        std::vector<double> ref_vals, cand_vals;
        ref_vals.reserve(reference.size());
        cand_vals.reserve(candidate.size());
        for (const auto& s : reference) ref_vals.push_back(static_cast<double>(summary_field(s, f)));
        for (const auto& s : candidate) cand_vals.push_back(static_cast<double>(summary_field(s, f)));
        gap.reference = mean_estimate(ref_vals, master_seed);
        gap.candidate = mean_estimate(cand_vals, master_seed);
        const double r = gap.reference.value, c = gap.candidate.value;
        if (r == 0.0)
            gap.relative_gap = c == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        else
            gap.relative_gap = std::abs(c - r) / std::abs(r);
        cmp.gaps.push_back(std::move(gap));
    }
    return cmp;
}

AnatomyComparison compare_anatomy_vs_er(long n, double lambda, long replicas, std::uint64_t seed) {
    AnatomyParams::make(n, lambda);  // validates lambda > 1
    if (replicas < 30)
        throw std::invalid_argument("compare_anatomy_vs_er: need at least 30 replicas");

    std::vector<GiantSummary> reference, candidate;
    reference.reserve(static_cast<std::size_t>(replicas));
    candidate.reserve(static_cast<std::size_t>(replicas));
    for (long r = 0; r < replicas; ++r) {
        auto rng_ref = make_rng(seed, replica_stream(r, 0));
        const Graph g = erdos_renyi(static_cast<int>(n), lambda / static_cast<double>(n), rng_ref);
        const auto comps = components_and_giant(g);
        reference.push_back(summarize_giant(induced_subgraph(g, comps.giant_vertices)));

        auto rng_cand = make_rng(seed, replica_stream(r, 1));
        candidate.push_back(summarize_giant(sample_anatomy(n, lambda, rng_cand).graph));
    }
    AnatomyComparison cmp = compare_summaries(reference, candidate, seed);
    cmp.n = n;
    cmp.lambda = lambda;
    cmp.replicas = replicas;
    return cmp;
}

std::string AnatomyComparison::to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["lambda"] = lambda;
    j["replicas"] = replicas;
    j["master_seed"] = master_seed;
    nlohmann::json stats = nlohmann::json::array();
    for (const auto& g : gaps) {
        nlohmann::json s;
        s["name"] = g.name;
        s["reference_mean"] = g.reference.value;
        s["reference_stderr"] = g.reference.std_error;
        s["candidate_mean"] = g.candidate.value;
        s["candidate_stderr"] = g.candidate.std_error;
        s["relative_gap"] = g.relative_gap;
        stats.push_back(std::move(s));
    }
    j["stats"] = std::move(stats);
    return j.dump(2);
}

}  // namespace dynperc
