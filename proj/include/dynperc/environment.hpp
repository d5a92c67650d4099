#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "dynperc/graph.hpp"

namespace dynperc {

// Model parameters for the dynamical percolation on K_n.
struct Params {
    int n = 2;           // vertices, >= 2
    double lambda = 1.0; // edge intensity; p = lambda / n
    double mu = 1.0;     // per-edge refresh rate, >= 0 (0 freezes the environment)

    double p() const { return lambda / static_cast<double>(n); }
    long long N() const { return pair_count(n); }
    // Informational regime flag: mu * n <= log(n)^-20.
    bool slow_mu() const;
    void validate() const;
};

enum class InitMode { stationary, all_open, all_closed, explicit_edges };

// Open/closed state of all n(n-1)/2 edges plus derived counters. Mutations go
// through set_edge so adjacency, open_count, isolated_count and the structural
// version stay consistent.
class Environment {
  public:
    explicit Environment(int n);

    // stationary: each edge open independently with probability p (sampled as a
    // Binomial count plus distinct uniform indices; identical in law).
    static Environment init(const Params& params, InitMode mode, std::mt19937_64& rng,
                            const std::vector<std::pair<int, int>>* edges = nullptr);

    int n() const { return n_; }
    long long open_count() const { return open_count_; }
    int isolated_count() const { return isolated_count_; }
    double clock() const { return clock_; }
    void set_clock(double t) { clock_ = t; }
    std::uint64_t version() const { return version_; }

    bool is_open(int u, int v) const { return open_[edge_index(u, v, n_)] != 0; }
    bool is_open_index(long long k) const { return open_[k] != 0; }
    int degree(int v) const { return static_cast<int>(adj_[v].size()); }
    const std::vector<int>& neighbors(int v) const { return adj_[v]; }

    // Returns true when the stored state actually changed.
    bool set_edge(int u, int v, bool open);

    std::vector<std::pair<int, int>> open_edges() const;
    Graph snapshot() const;

    bool operator==(const Environment& o) const { return n_ == o.n_ && open_ == o.open_; }
    bool operator!=(const Environment& o) const { return !(*this == o); }

    // O(n + m) consistency check of counters against adjacency; assert-backed.
    void check_invariants() const;

  private:
    int n_;
    std::vector<char> open_;  // by edge_index
    std::vector<std::vector<int>> adj_;
    long long open_count_ = 0;
    int isolated_count_ = 0;
    double clock_ = 0.0;
    std::uint64_t version_ = 0;  // bumped on every structural change
};

}  // namespace dynperc
