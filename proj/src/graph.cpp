#include "dynperc/graph.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace dynperc {

void Graph::add_edge(int u, int v) {
    assert(u != v && u >= 0 && v >= 0 && u < n && v < n);
    assert(!has_edge(u, v));
    adj[u].push_back(v);
    adj[v].push_back(u);
    ++m;
}

bool Graph::has_edge(int u, int v) const {
    const auto& a = adj[u].size() <= adj[v].size() ? adj[u] : adj[v];
    int target = adj[u].size() <= adj[v].size() ? v : u;
    return std::find(a.begin(), a.end(), target) != a.end();
}

std::vector<std::pair<int, int>> Graph::edge_list() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(m));
    for (int u = 0; u < n; ++u)
        for (int v : adj[u])
            if (u < v) out.emplace_back(u, v);
    return out;
}

void Multigraph::add_edge(int u, int v) {
    assert(u >= 0 && v >= 0 && u < n && v < n);
    if (u > v) std::swap(u, v);
    edges.emplace_back(u, v);
}

std::vector<int> Multigraph::degrees() const {
    std::vector<int> d(n, 0);
    for (auto [u, v] : edges) {
        d[u] += 1;
        d[v] += 1;  // loop (u == v) contributes 2 in total
    }
    return d;
}

long long Multigraph::loop_count() const {
    long long c = 0;
    for (auto [u, v] : edges)
        if (u == v) ++c;
    return c;
}

bool Multigraph::is_simple() const {
    auto es = sorted_edges();
    for (std::size_t i = 0; i < es.size(); ++i) {
        if (es[i].first == es[i].second) return false;
        if (i > 0 && es[i] == es[i - 1]) return false;
    }
    return true;
}

std::vector<std::pair<int, int>> Multigraph::sorted_edges() const {
    auto es = edges;
    std::sort(es.begin(), es.end());
    return es;
}

std::pair<int, int> edge_from_index(long long k, int n) {
    assert(k >= 0 && k < pair_count(n));
    // Invert the row-major triangular layout; float guess then local fix-up.
    double nd = static_cast<double>(n);
    int i = static_cast<int>(nd - 0.5 - std::sqrt((nd - 0.5) * (nd - 0.5) - 2.0 * static_cast<double>(k)));
    if (i < 0) i = 0;
    while (i > 0 && static_cast<long long>(i) * (2LL * n - i - 1) / 2 > k) --i;
    while (static_cast<long long>(i + 1) * (2LL * n - i - 2) / 2 <= k) ++i;
    long long base = static_cast<long long>(i) * (2LL * n - i - 1) / 2;
    int j = i + 1 + static_cast<int>(k - base);
    assert(j > i && j < n);
    return {i, j};
}

Graph erdos_renyi(int n, double p, std::mt19937_64& rng) {
    if (n <= 0) throw std::invalid_argument("erdos_renyi: n must be positive");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("erdos_renyi: p outside [0,1]");
    Graph g(n);
    long long N = pair_count(n);
    if (N == 0 || p == 0.0) return g;

    bool complement = p > 0.5;
    double q = complement ? 1.0 - p : p;
    std::binomial_distribution<long long> bin(N, q);
    long long K = bin(rng);

    std::unordered_set<long long> chosen;
    chosen.reserve(static_cast<std::size_t>(K) * 2 + 1);
    std::uniform_int_distribution<long long> pick(0, N - 1);
    while (static_cast<long long>(chosen.size()) < K) chosen.insert(pick(rng));

    if (!complement) {
        for (long long k : chosen) {
            auto [i, j] = edge_from_index(k, n);
            g.add_edge(i, j);
        }
    } else {
        for (long long k = 0; k < N; ++k) {
            if (chosen.count(k)) continue;
            auto [i, j] = edge_from_index(k, n);
            g.add_edge(i, j);
        }
    }
    return g;
}

Graph induced_subgraph(const Graph& g, const std::vector<int>& vertices) {
    std::vector<int> label(g.n, -1);
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        int v = vertices[i];
        if (v < 0 || v >= g.n) throw std::invalid_argument("induced_subgraph: vertex out of range");
        if (label[v] != -1) throw std::invalid_argument("induced_subgraph: duplicate vertex");
        label[v] = static_cast<int>(i);
    }
    Graph h(static_cast<int>(vertices.size()));
    for (int v : vertices)
        for (int w : g.adj[v])
            if (label[w] != -1 && v < w) h.add_edge(label[v], label[w]);
    return h;
}

}  // namespace dynperc
