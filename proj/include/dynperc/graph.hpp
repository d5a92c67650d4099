#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace dynperc {

// Simple undirected graph on vertices 0..n-1.
struct Graph {
    int n = 0;
    std::vector<std::vector<int>> adj;
    long long m = 0;

    Graph() = default;
    explicit Graph(int n_) : n(n_), adj(n_) {}

    void add_edge(int u, int v);
    bool has_edge(int u, int v) const;
    int degree(int v) const { return static_cast<int>(adj[v].size()); }
    std::vector<std::pair<int, int>> edge_list() const;
};

// Undirected multigraph; loops and parallel edges allowed.
// A loop at v contributes 2 to degree(v).
struct Multigraph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;  // (u,v) with u <= v; loop when u == v

    Multigraph() = default;
    explicit Multigraph(int n_) : n(n_) {}

    void add_edge(int u, int v);
    std::vector<int> degrees() const;
    long long loop_count() const;
    // True when no loops and no repeated pairs.
    bool is_simple() const;
    // Canonical sorted edge multiset, for equality-in-law tests.
    std::vector<std::pair<int, int>> sorted_edges() const;
};

// Number of unordered vertex pairs.
inline long long pair_count(int n) { return static_cast<long long>(n) * (n - 1) / 2; }

// Row-major index of pair (i,j), i < j, within 0..pair_count(n)-1.
inline long long edge_index(int i, int j, int n) {
    if (i > j) std::swap(i, j);
    return static_cast<long long>(i) * (2LL * n - i - 1) / 2 + (j - i - 1);
}

std::pair<int, int> edge_from_index(long long k, int n);

// G(n,p): each pair open independently with probability p.
// Sampled as K ~ Binomial(N,p) open pairs, then K distinct uniform pair
// indices (complement-sampled when p > 1/2); exact product law either way.
Graph erdos_renyi(int n, double p, std::mt19937_64& rng);

// Subgraph induced by `vertices`, relabelled 0..k-1 in the order given.
// Vertices must be distinct and in range.
Graph induced_subgraph(const Graph& g, const std::vector<int>& vertices);

}  // namespace dynperc
