#include "dynperc/environment.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace dynperc {

bool Params::slow_mu() const {
    double ln = std::log(static_cast<double>(n));
    return mu * static_cast<double>(n) <= std::pow(ln, -20.0);
}

// The p=0, p=1 and mu=0 corners are legal (frozen or degenerate dynamics);
// the interesting regime is p in (0,1), mu > 0.
void Params::validate() const {
    if (n < 2) throw std::invalid_argument("Params: n must be >= 2");
    if (lambda < 0.0) throw std::invalid_argument("Params: lambda must be nonnegative");
    if (p() > 1.0) throw std::invalid_argument("Params: p = lambda/n exceeds 1");
    if (mu < 0.0) throw std::invalid_argument("Params: mu must be nonnegative");
}

Environment::Environment(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("Environment: n must be positive");
    open_.assign(static_cast<std::size_t>(pair_count(n)), 0);
    adj_.assign(n, {});
    isolated_count_ = n;
}

Environment Environment::init(const Params& params, InitMode mode, std::mt19937_64& rng,
                              const std::vector<std::pair<int, int>>* edges) {
    params.validate();
    Environment env(params.n);
    long long N = params.N();
    switch (mode) {
        case InitMode::all_closed:
            break;
        case InitMode::all_open:
            for (long long k = 0; k < N; ++k) {
                auto [u, v] = edge_from_index(k, params.n);
                env.set_edge(u, v, true);
            }
            break;
        case InitMode::stationary: {
            double p = params.p();
            if (p <= 0.0) break;
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
                    auto [u, v] = edge_from_index(k, params.n);
                    env.set_edge(u, v, true);
                }
            } else {
                for (long long k = 0; k < N; ++k) {
                    if (chosen.count(k)) continue;
                    auto [u, v] = edge_from_index(k, params.n);
                    env.set_edge(u, v, true);
                }
            }
            break;
        }
        case InitMode::explicit_edges: {
            if (!edges) throw std::invalid_argument("init_environment: explicit mode needs an edge set");
            for (auto [u, v] : *edges) {
                if (u == v || u < 0 || v < 0 || u >= params.n || v >= params.n) {
                    std::ostringstream os;
                    os << "init_environment: invalid pair (" << u << "," << v << ")";
                    throw std::invalid_argument(os.str());
                }
                env.set_edge(u, v, true);
            }
            break;
        }
    }
    env.version_ = 0;
    return env;
}

bool Environment::set_edge(int u, int v, bool open) {
    assert(u != v && u >= 0 && v >= 0 && u < n_ && v < n_);
    long long k = edge_index(u, v, n_);
    if ((open_[k] != 0) == open) return false;
    open_[k] = open ? 1 : 0;
    if (open) {
        if (adj_[u].empty()) --isolated_count_;
        if (adj_[v].empty()) --isolated_count_;
        adj_[u].push_back(v);
        adj_[v].push_back(u);
        ++open_count_;
    } else {
        auto drop = [](std::vector<int>& a, int x) {
            auto it = std::find(a.begin(), a.end(), x);
            assert(it != a.end());
            *it = a.back();
            a.pop_back();
        };
        drop(adj_[u], v);
        drop(adj_[v], u);
        if (adj_[u].empty()) ++isolated_count_;
        if (adj_[v].empty()) ++isolated_count_;
        --open_count_;
    }
    ++version_;
    return true;
}

std::vector<std::pair<int, int>> Environment::open_edges() const {
    std::vector<std::pair<int, int>> out;
    out.reserve(static_cast<std::size_t>(open_count_));
    for (int u = 0; u < n_; ++u)
        for (int v : adj_[u])
            if (u < v) out.emplace_back(u, v);
    return out;
}

Graph Environment::snapshot() const {
    Graph g(n_);
    for (int u = 0; u < n_; ++u)
        for (int v : adj_[u])
            if (u < v) g.add_edge(u, v);
    return g;
}

void Environment::check_invariants() const {
    long long count = 0;
    int isolated = 0;
    for (int u = 0; u < n_; ++u) {
        if (adj_[u].empty()) ++isolated;
        for (int v : adj_[u]) {
            assert(v != u);
            assert(is_open(u, v));
            if (u < v) ++count;
        }
    }
    assert(count == open_count_);
    assert(isolated == isolated_count_);
    long long raw = 0;
    for (char c : open_) raw += c;
    assert(raw == open_count_);
    (void)count;
    (void)isolated;
    (void)raw;
}

}  // namespace dynperc
