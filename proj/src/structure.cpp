#include "dynperc/structure.hpp"

#include <algorithm>
#include <bit>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <unordered_set>

#include "json.hpp"

#include "dynperc/rng.hpp"

namespace dynperc {

void GoodGraphConstants::validate() const {
    if (!(0.0 < c_star && c_star <= C_star))
        throw std::invalid_argument("GoodGraphConstants: need 0 < c_star <= C_star");
}

double iterated_log(double x, int depth) {
    for (int i = 0; i < depth; ++i) {
        if (x <= 0.0) return -std::numeric_limits<double>::infinity();
        x = std::log(x);
    }
    return x;
}

int omega_star(int n) {
    if (n < 1) throw std::invalid_argument("omega_star: n must be positive");
    int m = 0;
    while (iterated_log(static_cast<double>(n), m + 1) >= 1.0) ++m;
    return m;
}

ComponentsResult components_and_giant(const Graph& g) {
    if (g.n == 0) throw std::invalid_argument("components_and_giant: empty graph");
    ComponentsResult res;
    res.comp.assign(g.n, -1);
    std::vector<int> stack;
    for (int s = 0; s < g.n; ++s) {
        if (res.comp[s] >= 0) continue;
        int id = res.count++;
        res.sizes.push_back(0);
        stack.push_back(s);
        res.comp[s] = id;
        while (!stack.empty()) {
            int v = stack.back();
            stack.pop_back();
            ++res.sizes[id];
            for (int w : g.adj[v]) {
                if (res.comp[w] < 0) {
                    res.comp[w] = id;
                    stack.push_back(w);
                }
            }
        }
    }
    // Largest component; ties go to the one holding the smallest vertex, and
    // since ids are assigned in vertex order that is the lowest id.
    res.giant_id = 0;
    for (int id = 1; id < res.count; ++id)
        if (res.sizes[id] > res.sizes[res.giant_id]) res.giant_id = id;
    for (int v = 0; v < g.n; ++v)
        if (res.comp[v] == res.giant_id) res.giant_vertices.push_back(v);
    return res;
}

namespace {

struct EdgeRec {
    int u, v;
};

struct BridgeData {
    std::vector<EdgeRec> edges;
    std::vector<std::vector<std::pair<int, int>>> adj;  // (neighbour, edge id)
    std::vector<char> is_bridge;
    std::vector<int> block;  // 2-edge-connected block id per vertex
    int block_count = 0;
};

BridgeData find_bridges(const Graph& g) {
    BridgeData bd;
    bd.adj.assign(g.n, {});
    for (int u = 0; u < g.n; ++u)
        for (int v : g.adj[u])
            if (u < v) {
                int id = static_cast<int>(bd.edges.size());
                bd.edges.push_back({u, v});
                bd.adj[u].push_back({v, id});
                bd.adj[v].push_back({u, id});
            }
    bd.is_bridge.assign(bd.edges.size(), 0);

    std::vector<int> disc(g.n, -1), low(g.n, 0), it(g.n, 0), parent_edge(g.n, -1);
    int timer = 0;
    std::vector<int> stack;
    for (int s = 0; s < g.n; ++s) {
        if (disc[s] >= 0) continue;
        stack.push_back(s);
        disc[s] = low[s] = timer++;
        while (!stack.empty()) {
            int v = stack.back();
            if (it[v] < static_cast<int>(bd.adj[v].size())) {
                auto [w, id] = bd.adj[v][it[v]++];
                if (id == parent_edge[v]) continue;
                if (disc[w] < 0) {
                    disc[w] = low[w] = timer++;
                    parent_edge[w] = id;
                    stack.push_back(w);
                } else {
                    low[v] = std::min(low[v], disc[w]);
                }
            } else {
                stack.pop_back();
                if (!stack.empty()) {
                    int p = stack.back();
                    low[p] = std::min(low[p], low[v]);
                    if (low[v] > disc[p]) bd.is_bridge[parent_edge[v]] = 1;
                }
            }
        }
    }

    // Blocks: flood fill over non-bridge edges.
    bd.block.assign(g.n, -1);
    for (int s = 0; s < g.n; ++s) {
        if (bd.block[s] >= 0) continue;
        int id = bd.block_count++;
        std::vector<int> st{s};
        bd.block[s] = id;
        while (!st.empty()) {
            int v = st.back();
            st.pop_back();
            for (auto [w, eid] : bd.adj[v]) {
                if (bd.is_bridge[eid] || bd.block[w] >= 0) continue;
                bd.block[w] = id;
                st.push_back(w);
            }
        }
    }
    return bd;
}

}  // namespace

std::vector<long long> removal_edge_counts(const Graph& g) {
    std::vector<long long> R(g.n, 0);
    if (g.n == 0) return R;
    auto comps = components_and_giant(g);
    auto bd = find_bridges(g);

    // Bridge forest: one tree per component, nodes are blocks.
    std::vector<long long> block_vertices(bd.block_count, 0);
    std::vector<int> block_min_vertex(bd.block_count, g.n);
    for (int v = 0; v < g.n; ++v) {
        ++block_vertices[bd.block[v]];
        block_min_vertex[bd.block[v]] = std::min(block_min_vertex[bd.block[v]], v);
    }
    std::vector<std::vector<std::pair<int, int>>> tree(bd.block_count);  // (block, bridge id)
    for (std::size_t e = 0; e < bd.edges.size(); ++e) {
        if (!bd.is_bridge[e]) continue;
        int a = bd.block[bd.edges[e].u], b = bd.block[bd.edges[e].v];
        tree[a].push_back({b, static_cast<int>(e)});
        tree[b].push_back({a, static_cast<int>(e)});
    }

    // Component roots: the block holding the component's smallest vertex, so in
    // an exact split the root side is the designated "larger" side.
    std::vector<int> comp_root(comps.count, -1);
    for (int v = 0; v < g.n; ++v) {
        int c = comps.comp[v];
        if (comp_root[c] < 0) comp_root[c] = bd.block[v];  // vertex order: first seen is smallest
    }

    std::vector<long long> subtree(bd.block_count, 0);
    std::vector<long long> delta_sub(bd.block_count, 0);
    std::vector<int> parent(bd.block_count, -1), order;
    order.reserve(bd.block_count);
    std::vector<char> seen(bd.block_count, 0);
    for (int c = 0; c < comps.count; ++c) {
        int root = comp_root[c];
        long long comp_size = comps.sizes[c];
        // Collect the tree in DFS order.
        std::size_t first = order.size();
        std::vector<int> st{root};
        seen[root] = 1;
        while (!st.empty()) {
            int b = st.back();
            st.pop_back();
            order.push_back(b);
            for (auto [nb, eid] : tree[b])
                if (!seen[nb]) {
                    seen[nb] = 1;
                    parent[nb] = b;
                    st.push_back(nb);
                }
        }
        for (std::size_t i = order.size(); i-- > first;) subtree[order[i]] = block_vertices[order[i]];
        for (std::size_t i = order.size(); i-- > first;) {
            int b = order[i];
            if (parent[b] >= 0) subtree[parent[b]] += subtree[b];
        }
        long long delta_comp = 0;
        for (std::size_t i = first; i < order.size(); ++i) {
            int b = order[i];
            if (parent[b] < 0) continue;
            long long below = subtree[b], above = comp_size - below;
            if (below <= above) {
                // strictly smaller, or exact split: root side holds the
                // smallest label and counts as larger either way
                delta_sub[b] += 1;
            } else {
                delta_comp += 1;
                delta_sub[b] -= 1;
            }
        }
        // Push prefix sums down the tree (order is root-first within the component).
        for (std::size_t i = first; i < order.size(); ++i) {
            int b = order[i];
            delta_sub[b] += parent[b] < 0 ? delta_comp : delta_sub[parent[b]];
        }
    }
    for (int v = 0; v < g.n; ++v) R[v] = delta_sub[bd.block[v]];
    return R;
}

std::vector<long long> removal_edge_counts_brute(const Graph& g) {
    std::vector<long long> R(g.n, 0);
    if (g.n == 0) return R;
    auto comps = components_and_giant(g);
    std::vector<int> comp_min(comps.count, g.n);
    for (int v = 0; v < g.n; ++v) comp_min[comps.comp[v]] = std::min(comp_min[comps.comp[v]], v);
    auto edges = g.edge_list();
    for (auto [a, b] : edges) {
        // Remove (a,b); if the component splits, BFS from a gives a's side.
        std::vector<int> side(g.n, -1);
        std::vector<int> st{a};
        side[a] = 0;
        long long size_a = 0;
        while (!st.empty()) {
            int v = st.back();
            st.pop_back();
            ++size_a;
            for (int w : g.adj[v]) {
                if ((v == a && w == b) || (v == b && w == a)) continue;
                if (side[w] < 0) {
                    side[w] = 0;
                    st.push_back(w);
                }
            }
        }
        if (side[b] == 0) continue;  // not a bridge
        long long comp_size = comps.sizes[comps.comp[a]];
        long long size_b = comp_size - size_a;
        int small_side;  // 0 = a's side, 1 = b's side
        if (size_a != size_b) {
            small_side = size_a < size_b ? 0 : 1;
        } else {
            int mv = comp_min[comps.comp[a]];
            small_side = side[mv] == 0 ? 1 : 0;  // side with smallest label is larger
        }
        if (small_side == 0) {
            for (int v = 0; v < g.n; ++v)
                if (side[v] == 0) ++R[v];
        } else {
            for (int v = 0; v < g.n; ++v)
                if (side[v] < 0 && comps.comp[v] == comps.comp[a]) ++R[v];
        }
    }
    return R;
}

CoreResult core_of(const Graph& g) {
    CoreResult res;
    res.in_core.assign(g.n, 1);
    std::vector<int> deg(g.n);
    std::vector<int> queue;
    for (int v = 0; v < g.n; ++v) {
        deg[v] = g.degree(v);
        if (deg[v] <= 1) {
            queue.push_back(v);
            res.in_core[v] = 0;
        }
    }
    while (!queue.empty()) {
        int v = queue.back();
        queue.pop_back();
        for (int w : g.adj[v]) {
            if (!res.in_core[w]) continue;
            if (--deg[w] <= 1) {
                res.in_core[w] = 0;
                queue.push_back(w);
            }
        }
    }
    res.core_of_orig.assign(g.n, -1);
    for (int v = 0; v < g.n; ++v)
        if (res.in_core[v]) {
            res.core_of_orig[v] = static_cast<int>(res.vertices.size());
            res.vertices.push_back(v);
            res.orig_of.push_back(v);
        }
    res.core = Graph(static_cast<int>(res.vertices.size()));
    for (int v : res.vertices)
        for (int w : g.adj[v])
            if (res.in_core[w] && v < w) res.core.add_edge(res.core_of_orig[v], res.core_of_orig[w]);
    return res;
}

KernelResult kernel_of(const Graph& g) {
    CoreResult cr = core_of(g);
    const Graph& c = cr.core;
    KernelResult res;

    std::vector<int> kid(c.n, -1);
    for (int v = 0; v < c.n; ++v)
        if (c.degree(v) >= 3) {
            kid[v] = static_cast<int>(res.orig_of.size());
            res.orig_of.push_back(cr.orig_of[v]);
        }
    res.kernel = Multigraph(static_cast<int>(res.orig_of.size()));

    std::unordered_set<long long> used;  // core edge keys
    auto key = [&](int u, int v) { return edge_index(u, v, c.n); };
    std::vector<char> on_path(c.n, 0);
    for (int u = 0; u < c.n; ++u) {
        if (kid[u] < 0) continue;
        for (int w0 : c.adj[u]) {
            if (used.count(key(u, w0))) continue;
            // Walk the 2-path from u through w0 to the next kernel vertex.
            KernelEdge ke;
            used.insert(key(u, w0));
            int prev = u, cur = w0;
            while (kid[cur] < 0) {
                assert(c.degree(cur) == 2);
                ke.internal.push_back(cr.orig_of[cur]);
                on_path[cur] = 1;
                int nxt = c.adj[cur][0] == prev ? c.adj[cur][1] : c.adj[cur][0];
                used.insert(key(cur, nxt));
                prev = cur;
                cur = nxt;
            }
            ke.a = std::min(kid[u], kid[cur]);
            ke.b = std::max(kid[u], kid[cur]);
            ke.path_length = static_cast<int>(ke.internal.size()) + 1;
            res.kernel.add_edge(ke.a, ke.b);
            res.edges.push_back(std::move(ke));
        }
    }
    // Remaining degree-2 vertices not on any contracted path form isolated
    // cycles; the kernel drops them.
    std::vector<char> counted(c.n, 0);
    for (int v = 0; v < c.n; ++v) {
        if (kid[v] >= 0 || on_path[v] || counted[v]) continue;
        ++res.deleted_cycles;
        std::vector<int> st{v};
        counted[v] = 1;
        while (!st.empty()) {
            int x = st.back();
            st.pop_back();
            ++res.deleted_cycle_vertices;
            for (int y : c.adj[x])
                if (!counted[y]) {
                    counted[y] = 1;
                    st.push_back(y);
                }
        }
    }
    return res;
}

DecorationStats decoration_stats(const Graph& g) {
    DecorationStats ds;
    KernelResult kr = kernel_of(g);
    if (kr.orig_of.empty()) return ds;
    CoreResult cr = core_of(g);

    // Trees hang off exactly one core vertex each; multi-source BFS assigns them.
    std::vector<long long> tree_size(g.n, 0);
    std::vector<int> root(g.n, -1);
    std::vector<int> frontier;
    for (int v : cr.vertices) {
        root[v] = v;
        frontier.push_back(v);
    }
    while (!frontier.empty()) {
        std::vector<int> next;
        for (int v : frontier)
            for (int w : g.adj[v])
                if (root[w] < 0) {
                    root[w] = root[v];
                    ++tree_size[root[v]];
                    next.push_back(w);
                }
        frontier = std::move(next);
    }

    for (const auto& ke : kr.edges) {
        long long d = 0;
        for (int v : ke.internal) d += 1 + tree_size[v];
        ds.sizes.push_back(d);
        ds.max_size = std::max(ds.max_size, d);
    }
    return ds;
}

SpectralResult spectral_gap(const Graph& g, const std::vector<int>& component_vertices,
                            const SpectralOptions& opts) {
    int k = static_cast<int>(component_vertices.size());
    if (k < 2) throw std::invalid_argument("spectral_gap: component must have >= 2 vertices");
    std::vector<int> local(g.n, -1);
    for (int i = 0; i < k; ++i) local[component_vertices[i]] = i;

    std::vector<double> inv_sqrt_deg(k);
    std::vector<int> xadj(k + 1, 0);
    for (int i = 0; i < k; ++i) {
        int v = component_vertices[i];
        int d = g.degree(v);
        if (d == 0) throw std::invalid_argument("spectral_gap: isolated vertex in component");
        inv_sqrt_deg[i] = 1.0 / std::sqrt(static_cast<double>(d));
        xadj[i + 1] = xadj[i] + d;
    }
    std::vector<int> nbr(xadj[k]);
    {
        std::vector<int> pos(xadj.begin(), xadj.end() - 1);
        for (int i = 0; i < k; ++i)
            for (int w : g.adj[component_vertices[i]]) {
                assert(local[w] >= 0);  // components are adjacency-closed
                nbr[pos[i]++] = local[w];
            }
    }

    // Perron direction of the symmetrized operator: sqrt(deg), normalized.
    std::vector<double> v1(k);
    {
        double s = 0.0;
        for (int i = 0; i < k; ++i) {
            v1[i] = 1.0 / inv_sqrt_deg[i];
            s += v1[i] * v1[i];
        }
        s = std::sqrt(s);
        for (double& x : v1) x /= s;
    }

    std::vector<double> u(k), w(k);
    if (opts.warm_start && static_cast<int>(opts.warm_start->size()) == k) {
        u = *opts.warm_start;
    } else {
        for (int i = 0; i < k; ++i)
            u[i] = (static_cast<double>(mix64(static_cast<std::uint64_t>(i + 1))) /
                    static_cast<double>(std::numeric_limits<std::uint64_t>::max())) - 0.5;
    }
    auto deflate = [&](std::vector<double>& x) {
        double dot = 0.0;
        for (int i = 0; i < k; ++i) dot += x[i] * v1[i];
        for (int i = 0; i < k; ++i) x[i] -= dot * v1[i];
    };
    auto normalize = [&](std::vector<double>& x) {
        double s = 0.0;
        for (double t : x) s += t * t;
        s = std::sqrt(s);
        if (s > 0)
            for (double& t : x) t /= s;
        return s;
    };
    auto apply_lazy = [&](const std::vector<double>& x, std::vector<double>& out) {
        // out = (x + D^-1/2 A D^-1/2 x) / 2
        for (int i = 0; i < k; ++i) {
            double acc = 0.0;
            for (int t = xadj[i]; t < xadj[i + 1]; ++t) {
                int j = nbr[t];
                acc += x[j] * inv_sqrt_deg[j];
            }
            out[i] = 0.5 * (x[i] + inv_sqrt_deg[i] * acc);
        }
    };

    deflate(u);
    double nu = normalize(u);
    SpectralResult res;
    if (nu < 1e-250) {
        // Start vector happened to be parallel to the Perron direction; re-seed.
        for (int i = 0; i < k; ++i)
            u[i] = (static_cast<double>(mix64(static_cast<std::uint64_t>(3 * i + 2))) /
                    static_cast<double>(std::numeric_limits<std::uint64_t>::max())) - 0.25;
        deflate(u);
        normalize(u);
    }

    double rho = 0.0, resid = 0.0;
    for (long it = 0; it < opts.max_iters; ++it) {
        apply_lazy(u, w);
        deflate(w);
        rho = 0.0;
        for (int i = 0; i < k; ++i) rho += u[i] * w[i];  // u is unit
        resid = 0.0;
        for (int i = 0; i < k; ++i) {
            double d = w[i] - rho * u[i];
            resid += d * d;
        }
        resid = std::sqrt(resid);
        res.iters = it + 1;
        if (resid <= opts.tol) {
            res.converged = true;
            break;
        }
        if (opts.decision_threshold) {
            double tau = *opts.decision_threshold;
            double glo = 2.0 * (1.0 - rho - resid);
            double gup = 2.0 * (1.0 - rho);  // rho <= nu_2 always, so this side is rigorous
            if ((glo >= tau && resid <= 0.1 * (1.0 - rho)) || gup < tau) {
                res.converged = true;
                break;
            }
        }
        double nw = normalize(w);
        if (nw < 1e-250) {
            // Operator annihilates the deflated space: nu_2 = 0.
            res.gamma = res.lower = res.upper = 2.0;
            res.converged = true;
            res.vector.assign(k, 0.0);
            return res;
        }
        std::swap(u, w);
    }
    res.gamma = 2.0 * (1.0 - rho);
    res.lower = 2.0 * (1.0 - rho - resid);
    res.upper = 2.0 * (1.0 - rho + resid);
    res.residual = resid;
    res.vector = u;
    return res;
}

PhiResult isoperimetric_constant(const Graph& g, const std::vector<int>& component_vertices,
                                 PhiMethod method, const SpectralOptions& opts) {
    int k = static_cast<int>(component_vertices.size());
    if (k == 0) throw std::invalid_argument("isoperimetric_constant: empty component");
    PhiResult res;
    if (method == PhiMethod::exact) {
        if (k > 20) throw std::invalid_argument("isoperimetric_constant: exact limited to 20 vertices");
        res.method = PhiMethod::exact;
        if (k == 1) {
            res.value = res.upper = 0.0;  // no edges, no expansion to speak of
            return res;
        }
        std::vector<int> local(g.n, -1);
        for (int i = 0; i < k; ++i) local[component_vertices[i]] = i;
        std::vector<std::uint32_t> nb(k, 0);
        std::vector<int> deg(k, 0);
        long long total_deg = 0;
        for (int i = 0; i < k; ++i) {
            for (int w : g.adj[component_vertices[i]]) {
                nb[i] |= 1u << local[w];
                ++deg[i];
            }
            total_deg += deg[i];
        }
        long long edge_budget = total_deg / 2;  // |E| of the component
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t S = 0;
        long long dS = 0, cut = 0;
        // Gray-code sweep: counter c's lowest set bit is the vertex to toggle.
        for (std::uint32_t c = 1; c < (1u << k); ++c) {
            int b = std::countr_zero(c);
            std::uint32_t bit = 1u << b;
            if (S & bit) {
                S ^= bit;
                int inside = std::popcount(nb[b] & S);
                cut += 2 * inside - deg[b];
                dS -= deg[b];
            } else {
                int inside = std::popcount(nb[b] & S);
                S ^= bit;
                cut += deg[b] - 2 * inside;
                dS += deg[b];
            }
            if (S != 0 && dS > 0 && dS <= edge_budget) {
                double val = static_cast<double>(cut) / static_cast<double>(dS);
                best = std::min(best, val);
            }
        }
        res.value = res.upper = best;
        return res;
    }
    auto sg = spectral_gap(g, component_vertices, opts);
    res.method = PhiMethod::cheeger_interval;
    res.gamma = sg.gamma;
    res.value = std::max(0.0, sg.gamma / 2.0);
    res.upper = std::sqrt(std::max(0.0, 2.0 * sg.gamma));
    return res;
}

std::vector<FarProfileEntry> far_from_core_profile(const Graph& g, const GoodGraphConstants& gc) {
    gc.validate();
    if (g.n == 0) throw std::invalid_argument("far_from_core_profile: empty graph");
    auto comps = components_and_giant(g);
    auto R = removal_edge_counts(g);
    std::vector<FarProfileEntry> out;
    int depth_cap = omega_star(g.n);
    double gsize = static_cast<double>(comps.giant_size());
    for (int M = 2; M <= depth_cap; ++M) {
        FarProfileEntry e;
        e.M = M;
        double lM = iterated_log(static_cast<double>(g.n), M);
        if (lM < 1.0) break;  // depth guard
        e.threshold = gc.C_star * lM;
        long long far = 0;
        for (int v : comps.giant_vertices)
            if (static_cast<double>(R[v]) > e.threshold) ++far;
        e.fraction = gsize > 0 ? static_cast<double>(far) / gsize : 0.0;
        double lM1 = iterated_log(static_cast<double>(g.n), M - 1);
        e.bound = 1.0 / (lM1 * lM1 * lM1 * lM1);
        out.push_back(e);
    }
    return out;
}

double far_fraction(const Graph& g, double threshold) {
    auto comps = components_and_giant(g);
    auto R = removal_edge_counts(g);
    long long far = 0;
    for (int v : comps.giant_vertices)
        if (static_cast<double>(R[v]) > threshold) ++far;
    return comps.giant_size() > 0
               ? static_cast<double>(far) / static_cast<double>(comps.giant_size())
               : 0.0;
}

namespace {

GoodGraphVerdict good_check_impl(const Graph& g, const GoodGraphConstants& gc,
                                 bool with_isolated_clause, const ComponentsResult& comps,
                                 const std::vector<long long>& R) {
    GoodGraphVerdict v;
    v.isolated_clause_checked = with_isolated_clause;
    int n = g.n;
    double logn = std::log(static_cast<double>(n));
    double big = gc.C_star * logn;

    int big_comps = 0;
    for (int c = 0; c < comps.count; ++c)
        if (static_cast<double>(comps.sizes[c]) >= big) ++big_comps;
    v.unique_giant = big_comps == 1 &&
                     static_cast<double>(comps.giant_size()) >= big;

    v.giant_size = static_cast<double>(comps.giant_size()) >= gc.c_star * n;

    int max_deg = 0;
    for (int x = 0; x < n; ++x) max_deg = std::max(max_deg, g.degree(x));
    v.max_degree = static_cast<double>(max_deg) <= big;

    long long giant_edges = 0, deg1 = 0, isolated = 0;
    for (int x = 0; x < n; ++x) {
        if (g.degree(x) == 0) ++isolated;
        if (comps.comp[x] == comps.giant_id) {
            giant_edges += g.degree(x);
            if (g.degree(x) == 1) ++deg1;
        }
    }
    giant_edges /= 2;
    v.giant_edges = static_cast<double>(giant_edges) <= gc.C_star * n;
    v.deg1_in_giant = static_cast<double>(deg1) >= gc.c_star * n;

    long long maxR = 0;
    for (int x : comps.giant_vertices) maxR = std::max(maxR, R[x]);
    v.removal_bounded = static_cast<double>(maxR) <= big;

    v.far_profile = true;
    for (const auto& e : far_from_core_profile(g, gc))
        if (e.fraction > e.bound) v.far_profile = false;

    // Expansion: Phi >= c* log^-2 n and gamma >= c* log^-4 n. Past 20 vertices
    // Phi goes through the Cheeger lower end gamma/2, so the binding condition
    // is a single gamma threshold and the power iteration can stop early.
    double phi_thresh = gc.c_star / (logn * logn);
    double gamma_thresh = gc.c_star / (logn * logn * logn * logn);
    if (comps.giant_size() >= 2) {
        if (comps.giant_size() <= 20) {
            auto phi = isoperimetric_constant(g, comps.giant_vertices, PhiMethod::exact);
            auto sg = spectral_gap(g, comps.giant_vertices);
            v.phi_lower = phi.value;
            v.gamma = sg.gamma;
            v.expansion = phi.value >= phi_thresh && sg.gamma >= gamma_thresh;
        } else {
            SpectralOptions opts;
            opts.decision_threshold = std::max(gamma_thresh, 2.0 * phi_thresh);
            auto sg = spectral_gap(g, comps.giant_vertices, opts);
            v.gamma = sg.gamma;
            v.phi_lower = std::max(0.0, sg.gamma / 2.0);
            v.expansion = v.gamma >= gamma_thresh && v.phi_lower >= phi_thresh;
        }
    } else {
        v.expansion = false;
    }

    if (with_isolated_clause)
        v.isolated_fraction = static_cast<double>(isolated) >= gc.c_star * n;

    v.good = v.unique_giant && v.giant_size && v.max_degree && v.giant_edges &&
             v.deg1_in_giant && v.removal_bounded && v.far_profile && v.expansion &&
             v.isolated_fraction;
    return v;
}

}  // namespace

GoodGraphVerdict good_graph_check(const Graph& g, const GoodGraphConstants& gc,
                                  bool with_isolated_clause) {
    gc.validate();
    if (g.n == 0) {
        GoodGraphVerdict v;
        v.isolated_clause_checked = with_isolated_clause;
        return v;  // no giant: nothing passes
    }
    auto comps = components_and_giant(g);
    auto R = removal_edge_counts(g);
    return good_check_impl(g, gc, with_isolated_clause, comps, R);
}

StructureReport analyze_structure(const Graph& g, const GoodGraphConstants& gc,
                                  bool with_isolated_clause) {
    gc.validate();
    StructureReport rep;
    rep.n = g.n;
    if (g.n == 0) return rep;

    auto comps = components_and_giant(g);
    rep.giant_vertices = comps.giant_vertices;
    rep.giant_size = comps.giant_size();

    for (int v = 0; v < g.n; ++v) ++rep.degree_histogram[g.degree(v)];
    for (int v : comps.giant_vertices)
        if (g.degree(v) == 1) ++rep.deg1_in_giant;

    auto R = removal_edge_counts(g);
    rep.removal_counts.assign(g.n, 0);
    for (int v : comps.giant_vertices) rep.removal_counts[v] = R[v];

    // Core, kernel and decorations are properties of the giant.
    Graph giant(g.n);
    for (int v : comps.giant_vertices)
        for (int w : g.adj[v])
            if (v < w) giant.add_edge(v, w);
    auto core = core_of(giant);
    rep.core_size = static_cast<long long>(core.vertices.size());
    auto kern = kernel_of(giant);
    rep.kernel_size = static_cast<long long>(kern.orig_of.size());
    {
        std::map<std::pair<int, int>, int> mult;
        for (auto [a, b] : kern.kernel.edges) ++mult[{a, b}];
        for (auto& [ab, c] : mult) rep.kernel_edge_multiset.push_back({ab, c});
    }
    rep.max_decoration = decoration_stats(giant).max_size;

    rep.far_profile = far_from_core_profile(g, gc);

    if (rep.giant_size >= 2) {
        if (rep.giant_size <= 20) {
            rep.phi = isoperimetric_constant(g, comps.giant_vertices, PhiMethod::exact);
            rep.gamma = spectral_gap(g, comps.giant_vertices).gamma;
        } else {
            rep.phi = isoperimetric_constant(g, comps.giant_vertices, PhiMethod::cheeger_interval);
            rep.gamma = rep.phi.gamma;
        }
    }

    rep.good = good_check_impl(g, gc, with_isolated_clause, comps, R);
    return rep;
}

std::string StructureReport::to_json() const {
    nlohmann::json j;
    j["n"] = n;
    j["giant_vertices"] = giant_vertices;
    j["giant_size"] = giant_size;
    {
        nlohmann::json h = nlohmann::json::object();
        for (auto& [d, c] : degree_histogram) h[std::to_string(d)] = c;
        j["degree_histogram"] = h;
    }
    j["deg1_in_giant"] = deg1_in_giant;
    j["removal_counts"] = removal_counts;
    j["core_size"] = core_size;
    j["kernel_size"] = kernel_size;
    {
        nlohmann::json ks = nlohmann::json::array();
        for (auto& [ab, c] : kernel_edge_multiset)
            ks.push_back({{"a", ab.first}, {"b", ab.second}, {"multiplicity", c}});
        j["kernel_edge_multiset"] = ks;
    }
    j["max_decoration"] = max_decoration;
    {
        nlohmann::json fp = nlohmann::json::array();
        for (auto& e : far_profile)
            fp.push_back({{"M", e.M},
                          {"threshold", e.threshold},
                          {"fraction", e.fraction},
                          {"bound", e.bound}});
        j["far_profile"] = fp;
    }
    j["phi"] = {{"value", phi.value},
                {"upper", phi.upper},
                {"method", phi.method == PhiMethod::exact ? "exact" : "cheeger_interval"}};
    j["gamma"] = gamma;
    j["good"] = {{"unique_giant", good.unique_giant},
                 {"giant_size", good.giant_size},
                 {"max_degree", good.max_degree},
                 {"giant_edges", good.giant_edges},
                 {"deg1_in_giant", good.deg1_in_giant},
                 {"removal_bounded", good.removal_bounded},
                 {"far_profile", good.far_profile},
                 {"expansion", good.expansion},
                 {"isolated_fraction", good.isolated_fraction},
                 {"isolated_clause_checked", good.isolated_clause_checked},
                 {"good", good.good}};
    return j.dump(2);
}

}  // namespace dynperc
