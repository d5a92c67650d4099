#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dynperc/graph.hpp"

namespace dynperc {

// Thresholds for the good-graph verdict. omega_star is the deepest iterated-log
// level M with log_(M) n >= 1 (natural log throughout).
struct GoodGraphConstants {
    double c_star = 0.05;
    double C_star = 20.0;

    void validate() const;  // 0 < c_star <= C_star
};

double iterated_log(double x, int depth);
int omega_star(int n);

struct ComponentsResult {
    std::vector<int> comp;        // component id per vertex
    std::vector<int> sizes;       // size per component id
    int count = 0;
    int giant_id = -1;            // largest; ties -> component of smallest vertex
    std::vector<int> giant_vertices;
    int giant_size() const { return giant_id < 0 ? 0 : sizes[giant_id]; }
};

ComponentsResult components_and_giant(const Graph& g);

// R(x): number of bridges in x's component whose removal leaves x in the
// strictly smaller side; an exact split counts the side without the smallest
// label of the component. Bridge-tree subtree DP, O(n + m).
std::vector<long long> removal_edge_counts(const Graph& g);

// Brute-force R(x) by removing each edge and re-running components; test oracle.
std::vector<long long> removal_edge_counts_brute(const Graph& g);

struct CoreResult {
    std::vector<char> in_core;    // over original vertex ids
    std::vector<int> vertices;    // original ids, ascending
    Graph core;                   // induced subgraph, relabelled 0..k-1
    std::vector<int> orig_of;     // core id -> original id
    std::vector<int> core_of_orig;  // original id -> core id or -1
};

// 2-core: recursively strip degree <= 1 vertices; empty when none survive.
CoreResult core_of(const Graph& g);

struct KernelEdge {
    int a = 0, b = 0;          // kernel vertex ids (a <= b); loop when a == b
    int path_length = 1;       // core edges on the contracted 2-path
    std::vector<int> internal; // original ids of internal path vertices
};

struct KernelResult {
    Multigraph kernel;             // on kernel vertex ids 0..k-1
    std::vector<int> orig_of;      // kernel id -> original id
    std::vector<KernelEdge> edges; // parallel to kernel.edges
    long long deleted_cycle_vertices = 0;  // isolated core cycles are dropped
    int deleted_cycles = 0;
};

// Kernel: 2-core with maximal 2-paths between degree->=3 vertices contracted
// and isolated cycles deleted; min degree >= 3 or empty. kernel_of(g) takes the
// core first, so kernel_of(core_of(g)) == kernel_of(g).
KernelResult kernel_of(const Graph& g);

struct DecorationStats {
    std::vector<long long> sizes;  // per kernel edge: internal vertices + trees hung on them
    long long max_size = 0;
};

// Decoration of kernel edge e: vertices created when e expands back to its core
// path plus the trees hanging from the path's internal vertices; endpoints and
// their trees excluded. Empty kernel -> empty result.
DecorationStats decoration_stats(const Graph& g);

enum class PhiMethod { exact, cheeger_interval };

struct PhiResult {
    double value = 0.0;        // exact value, or interval lower end for estimates
    double upper = 0.0;        // == value when exact
    PhiMethod method = PhiMethod::exact;
    double gamma = 0.0;        // gap used to build the interval (estimate method)
};

struct SpectralOptions {
    double tol = 1e-9;
    long max_iters = 100000;
    // Early exit once gamma is certified on one side of the threshold.
    std::optional<double> decision_threshold;
    const std::vector<double>* warm_start = nullptr;
};

struct SpectralResult {
    double gamma = 0.0;        // 1 - lambda_2 of the NN SRW on the component
    double lower = 0.0;        // two-sided certificate from Rayleigh + residual
    double upper = 0.0;
    long iters = 0;
    bool converged = false;
    double residual = 0.0;
    std::vector<double> vector;  // converged iterate, reusable as warm start
};

// gamma = 1 - lambda_2 via power iteration on the lazy symmetrized operator
// (I + D^-1/2 A D^-1/2)/2 with the Perron direction sqrt(deg) deflated;
// gamma = 2(1 - nu_2) maps back to the non-lazy walk. Requires a connected
// nonempty vertex set.
SpectralResult spectral_gap(const Graph& g, const std::vector<int>& component_vertices,
                            const SpectralOptions& opts = {});

// Exhaustive Phi = min |dS|/d(S) over nonempty S with d(S) <= |E| of the
// component; requires <= 20 vertices. `estimate` inverts the Cheeger sandwich
// into [gamma/2, sqrt(2 gamma)].
PhiResult isoperimetric_constant(const Graph& g, const std::vector<int>& component_vertices,
                                 PhiMethod method, const SpectralOptions& opts = {});

struct FarProfileEntry {
    int M = 0;
    double threshold = 0.0;   // C* log_(M) n
    double fraction = 0.0;    // |G \ W^M| / |G|
    double bound = 0.0;       // (log_(M-1) n)^-4
};

// Far-from-core profile for M = 2..omega_star(n); rejects levels with
// log_(M) n < 1.
std::vector<FarProfileEntry> far_from_core_profile(const Graph& g, const GoodGraphConstants& gc);

// Fraction of giant vertices with R(x) above an explicit threshold.
double far_fraction(const Graph& g, double threshold);

struct GoodGraphVerdict {
    bool unique_giant = false;       // exactly one component >= C* log n
    bool giant_size = false;         // |G| >= c* n
    bool max_degree = false;         // max degree <= C* log n
    bool giant_edges = false;        // edges inside G <= C* n
    bool deg1_in_giant = false;      // degree-1 vertices of G >= c* n
    bool removal_bounded = false;    // R(x) <= C* log n for all x in G
    bool far_profile = false;        // per-M fractions within (log_(M-1) n)^-4
    bool expansion = false;          // Phi >= c* log^-2 n and gamma >= c* log^-4 n
    bool isolated_fraction = true;   // optional clause; true when not requested
    bool good = false;

    bool isolated_clause_checked = false;
    double phi_lower = 0.0;          // exact Phi or interval lower end
    double gamma = 0.0;
};

GoodGraphVerdict good_graph_check(const Graph& g, const GoodGraphConstants& gc,
                                  bool with_isolated_clause);

struct StructureReport {
    int n = 0;
    std::vector<int> giant_vertices;
    long long giant_size = 0;
    std::map<int, long long> degree_histogram;
    long long deg1_in_giant = 0;
    std::vector<long long> removal_counts;  // zero outside the giant
    long long core_size = 0;
    long long kernel_size = 0;
    std::vector<std::pair<std::pair<int, int>, int>> kernel_edge_multiset;  // ((a,b), multiplicity)
    long long max_decoration = 0;
    std::vector<FarProfileEntry> far_profile;
    PhiResult phi;
    double gamma = 0.0;
    GoodGraphVerdict good;

    std::string to_json() const;
};

// Full snapshot analysis; core/kernel/decorations are taken on the giant,
// R(x) is reported for giant vertices only (zero elsewhere).
StructureReport analyze_structure(const Graph& g, const GoodGraphConstants& gc = {},
                                  bool with_isolated_clause = false);

}  // namespace dynperc
