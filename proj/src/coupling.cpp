#include "dynperc/coupling.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dynperc/csvio.hpp"
#include "dynperc/rng.hpp"

namespace dynperc {

bool h_close(const Environment& eta, const Environment& xi) {
    if (eta.n() != xi.n()) throw std::invalid_argument("h_close: environment sizes differ");
    const int n = eta.n();
    const long long N = pair_count(n);
    std::vector<long long> diff;
    for (long long k = 0; k < N && diff.size() <= 2; ++k)
        if (eta.is_open_index(k) != xi.is_open_index(k)) diff.push_back(k);
    if (diff.empty()) return true;  // equal environments: any triple works
    if (n < 3 || diff.size() > 2) return false;
    if (diff.size() == 1) return true;  // one edge (x,z); any third vertex serves as y
    auto [a, b] = edge_from_index(diff[0], n);
    auto [c, d] = edge_from_index(diff[1], n);
    // Two distinct edges fit {(x,z),(y,z)} iff they share an endpoint (the apex z).
    return a == c || a == d || b == c || b == d;
}

StaticDynamicResult run_static_dynamic(const Params& params, const Environment& eta0,
                                       int x0, double t_cap, std::uint64_t seed) {
    params.validate();
    if (eta0.n() != params.n)
        throw std::invalid_argument("run_static_dynamic: environment size != params.n");
    if (x0 < 0 || x0 >= params.n)
        throw std::invalid_argument("run_static_dynamic: x0 out of range");
    if (t_cap < 0.0) throw std::invalid_argument("run_static_dynamic: negative t_cap");

    const int n = params.n;
    const long long N = params.N();
    const double mu_total = params.mu * static_cast<double>(N);
    const double total = mu_total + 1.0;

    Environment env = eta0;  // evolves; eta0 stays frozen for the static walk
    int ps = x0;
    int pd = x0;
    std::vector<char> visited(n, 0);
    visited[x0] = 1;
    std::vector<char> differs(N, 0);  // env vs eta0 by edge index
    long long diff_count = 0;

    StaticDynamicResult out;
    out.t_cap = t_cap;

    std::mt19937_64 rng = make_rng(seed);
    std::exponential_distribution<double> hold(total);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<long long> epick(0, N - 1);
    std::uniform_int_distribution<int> tpick(0, n - 2);

    double now = 0.0;
    auto see_vertex = [&](int v) {
        if (visited[v]) return;
        visited[v] = 1;
        if (out.decoupled || diff_count == 0) return;
        for (int w = 0; w < n; ++w)
            if (w != v && differs[edge_index(v, w, n)]) {
                out.decoupled = true;
                out.decoupling_time = now;
                return;
            }
    };

    while (true) {
        double dt = hold(rng);
        if (now + dt > t_cap) break;
        now += dt;
        if (u01(rng) * total < mu_total) {
            long long k = epick(rng);
            bool open = u01(rng) < params.p();
            auto [i, j] = edge_from_index(k, n);
            env.set_edge(i, j, open);
            bool d = env.is_open_index(k) != eta0.is_open_index(k);
            if (d != (differs[k] != 0)) {
                differs[k] = d ? 1 : 0;
                diff_count += d ? 1 : -1;
            }
            if (d && !out.env_changed) {
                out.env_changed = true;
                out.first_env_change_time = now;
            }
            if (d && !out.decoupled && (visited[i] || visited[j])) {
                out.decoupled = true;
                out.decoupling_time = now;
            }
        } else {
            int t = tpick(rng);
            int vs = t >= ps ? t + 1 : t;  // the shared draw read from each walk's seat
            int vd = t >= pd ? t + 1 : t;
            if (eta0.is_open(ps, vs)) {
                ps = vs;
                out.static_moves.push_back({now, vs});
                see_vertex(vs);
            }
            if (env.is_open(pd, vd)) {
                pd = vd;
                out.dynamic_moves.push_back({now, vd});
                see_vertex(vd);
            }
        }
    }
    return out;
}

const char* coupling_failure_name(CouplingFailure f) {
    switch (f) {
        case CouplingFailure::opened_direct_edge: return "opened_direct_edge";
        case CouplingFailure::z_not_isolated: return "z_not_isolated";
        case CouplingFailure::wrong_edge_pattern: return "wrong_edge_pattern";
        case CouplingFailure::premature_change: return "premature_change";
        case CouplingFailure::walkers_not_at_z: return "walkers_not_at_z";
    }
    return "unknown";
}

namespace {

enum class Phase { search, armed, paired, merged };

}  // namespace

CouplingResult run_full_coupling(const Params& params, const CoupledStart& start,
                                 double t_cap, std::uint64_t seed, std::uint64_t stream) {
    params.validate();
    if (params.n < 3)
        throw std::invalid_argument("run_full_coupling: needs n >= 3 (no target vertex for step iii)");
    if (start.eta.n() != params.n || start.xi.n() != params.n)
        throw std::invalid_argument("run_full_coupling: environment size != params.n");
    if (start.x0 < 0 || start.x0 >= params.n || start.y0 < 0 || start.y0 >= params.n)
        throw std::invalid_argument("run_full_coupling: walker position out of range");
    if (t_cap < 0.0) throw std::invalid_argument("run_full_coupling: negative t_cap");

    const int n = params.n;
    const long long N = params.N();
    const double p = params.p();
    const double mu_total = params.mu * static_cast<double>(N);

    CouplingResult res{CouplingRecord{}, start.x0, start.y0, start.eta, start.xi};
    Environment& eta = res.eta;
    Environment& xi = res.xi;
    int& x = res.x;
    int& y = res.y;
    CouplingRecord& rec = res.record;
    rec.t_cap = t_cap;
    rec.phases.push_back({});

    std::vector<char> mm(N, 0);  // eta(k) != xi(k)
    long long mismatches = 0;
    for (long long k = 0; k < N; ++k)
        if (eta.is_open_index(k) != xi.is_open_index(k)) {
            mm[k] = 1;
            ++mismatches;
        }

    std::mt19937_64 clk = make_rng(seed, stream + 0);
    std::mt19937_64 envr = make_rng(seed, stream + 1);
    std::mt19937_64 wx = make_rng(seed, stream + 2);
    std::mt19937_64 wy = make_rng(seed, stream + 3);
    std::mt19937_64 cpl = make_rng(seed, stream + 4);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    std::uniform_int_distribution<long long> epick(0, N - 1);
    std::uniform_int_distribution<int> tpick(0, n - 2);

    Phase phase = Phase::search;
    int xp = -1, yp = -1, z = -1;
    long long pair_open_k = -1, pair_mirror_k = -1;
    double now = 0.0;
    double phase_start = 0.0;

    auto update_mm = [&](long long k) {
        char d = eta.is_open_index(k) != xi.is_open_index(k) ? 1 : 0;
        if (d != mm[k]) {
            mm[k] = d;
            mismatches += d ? 1 : -1;
        }
    };
    auto coalesce = [&]() {
        assert(mismatches == 0 && x == y);
        rec.tau_c = now;
        phase = Phase::merged;
    };
    auto fail = [&](CouplingFailure reason) {
        ++rec.failure_counts[static_cast<int>(reason)];
        ++rec.attempts;
        assert(h_close(eta, xi));
        phase = Phase::search;
        phase_start = now;
        rec.phases.push_back({});
        xp = yp = z = -1;
        pair_open_k = pair_mirror_k = -1;
    };
    // Ends the search phase on full-state identity (coalesced) or on equal
    // environments with both walks isolated (step iii begins).
    auto search_check = [&]() {
        if (phase != Phase::search || mismatches != 0) return;
        if (x == y) {
            rec.phases.back().sigma1 = now - phase_start;
            coalesce();
            return;
        }
        if (eta.degree(x) == 0 && xi.degree(y) == 0) {
            rec.phases.back().sigma1 = now - phase_start;
            xp = x;
            yp = y;
            phase = Phase::armed;
            phase_start = now;
        }
    };
    auto mirror = [&](int v) { return v == xp ? yp : v == yp ? xp : v; };

    auto handle_refresh = [&](long long k, bool open) {
        auto [i, j] = edge_from_index(k, n);
        switch (phase) {
            case Phase::search:
            case Phase::merged: {
                eta.set_edge(i, j, open);
                xi.set_edge(i, j, open);
                update_mm(k);
                search_check();
                break;
            }
            case Phase::armed: {
                bool incident = i == xp || i == yp || j == xp || j == yp;
                if (!incident) {
                    eta.set_edge(i, j, open);
                    xi.set_edge(i, j, open);
                    update_mm(k);
                    break;
                }
                // Every edge at the isolated pair is closed, so a closed
                // outcome cannot change state; thinning keeps only openings,
                // which realise the joint change-clock at rate (2n-3)*p*mu.
                assert(!eta.is_open_index(k) && !xi.is_open_index(k));
                if (!open) break;
                rec.phases.back().sigma2 = now - phase_start;
                if (u01(cpl) * static_cast<double>(2 * n - 3) < 1.0) {
                    eta.set_edge(xp, yp, true);
                    xi.set_edge(xp, yp, true);
                    update_mm(edge_index(xp, yp, n));
                    fail(CouplingFailure::opened_direct_edge);
                    search_check();
                    break;
                }
                std::uniform_int_distribution<int> zpick(0, n - 3);
                int zz = zpick(cpl);
                int lo = std::min(xp, yp), hi = std::max(xp, yp);
                if (zz >= lo) ++zz;
                if (zz >= hi) ++zz;
                bool eta_gets_x_side = u01(cpl) < 0.5;
                bool z_isolated = eta.degree(zz) == 0;  // environments agree here
                int eta_end = eta_gets_x_side ? xp : yp;
                int xi_end = eta_gets_x_side ? yp : xp;
                eta.set_edge(eta_end, zz, true);
                xi.set_edge(xi_end, zz, true);
                update_mm(edge_index(eta_end, zz, n));
                update_mm(edge_index(xi_end, zz, n));
                if (!z_isolated) {
                    fail(CouplingFailure::z_not_isolated);
                    search_check();
                    break;
                }
                if (!eta_gets_x_side) {
                    fail(CouplingFailure::wrong_edge_pattern);
                    search_check();
                    break;
                }
                z = zz;
                pair_open_k = edge_index(xp, z, n);
                pair_mirror_k = edge_index(yp, z, n);
                phase = Phase::paired;
                phase_start = now;
                break;
            }
            case Phase::paired: {
                if (k == pair_open_k) {
                    // One clock for the open pair (x0',z) in eta, (y0',z) in xi.
                    eta.set_edge(xp, z, open);
                    xi.set_edge(yp, z, open);
                    update_mm(pair_open_k);
                    update_mm(pair_mirror_k);
                    if (!open) {
                        // Both open edges closed together: environments recoupled.
                        assert(mismatches == 0);
                        rec.phases.back().sigma3 = now - phase_start;
                        if (x == z) {
                            assert(y == z);
                            coalesce();
                        } else {
                            assert(x == xp && y == yp);
                            fail(CouplingFailure::walkers_not_at_z);
                            search_check();
                        }
                    }
                } else if (k == pair_mirror_k) {
                    // The other clock: (y0',z) in eta, (x0',z) in xi.
                    eta.set_edge(yp, z, open);
                    xi.set_edge(xp, z, open);
                    update_mm(pair_open_k);
                    update_mm(pair_mirror_k);
                    if (open) {
                        // The closed mirror pair opened: both ends of z are now
                        // open in both configurations (environments equal again),
                        // but the scripted closing never happened.
                        assert(mismatches == 0);
                        rec.phases.back().sigma3 = now - phase_start;
                        fail(CouplingFailure::premature_change);
                        search_check();
                    }
                } else {
                    bool was = eta.is_open_index(k);
                    eta.set_edge(i, j, open);
                    xi.set_edge(i, j, open);
                    update_mm(k);
                    bool incident = i == xp || i == yp || i == z || j == xp || j == yp || j == z;
                    if (incident && open != was) {
                        rec.phases.back().sigma3 = now - phase_start;
                        fail(CouplingFailure::premature_change);
                        search_check();
                    }
                }
                break;
            }
        }
    };

    auto handle_ring_independent = [&](bool is_x) {
        if (is_x) {
            int t = tpick(wx);
            int v = t >= x ? t + 1 : t;
            if (eta.is_open(x, v)) {
                assert(phase != Phase::armed);  // x0' is isolated while armed
                x = v;
            }
        } else {
            int t = tpick(wy);
            int v = t >= y ? t + 1 : t;
            if (xi.is_open(y, v)) {
                assert(phase != Phase::armed);
                y = v;
            }
        }
        search_check();
    };

    auto handle_ring_shared = [&]() {
        int t = tpick(wx);
        int v = t >= x ? t + 1 : t;
        if (phase == Phase::merged) {
            if (eta.is_open(x, v)) {
                x = v;
                y = v;
            }
            return;
        }
        // paired: Y's target mirrors X's through the swap x0' <-> y0', which
        // keeps the walks in lockstep because xi is eta conjugated by that swap.
        int vy = mirror(v);
        bool move_x = eta.is_open(x, v);
        bool move_y = xi.is_open(y, vy);
        assert(move_x == move_y);
        if (move_x) {
            x = v;
            y = vy;
        }
        assert((x == xp && y == yp) || (x == z && y == z));
    };

    search_check();  // identical starts coalesce at time zero
    while (true) {
        const bool shared_ring = phase == Phase::paired || phase == Phase::merged;
        const double total = mu_total + (shared_ring ? 1.0 : 2.0);
        std::exponential_distribution<double> hold(total);
        double dt = hold(clk);
        if (now + dt > t_cap) {
            now = t_cap;
            break;
        }
        now += dt;
        double u = u01(clk) * total;
        if (u < mu_total) {
            long long k = epick(envr);
            bool open = u01(envr) < p;
            handle_refresh(k, open);
        } else if (shared_ring) {
            handle_ring_shared();
        } else {
            handle_ring_independent(u < mu_total + 1.0);
        }
    }

    if (phase == Phase::merged) {
        assert(mismatches == 0 && x == y);
    } else {
        rec.censored = true;
        rec.tau_c = std::numeric_limits<double>::infinity();
        double elapsed = t_cap - phase_start;
        auto& ph = rec.phases.back();
        if (phase == Phase::search)
            ph.sigma1 = elapsed;
        else if (phase == Phase::armed)
            ph.sigma2 = elapsed;
        else
            ph.sigma3 = elapsed;
    }
    assert(static_cast<long>(rec.phases.size()) == rec.attempts + 1);
    return res;
}

TailCurve coalescence_tail_curve(const Params& params, const StartSampler& sample_start,
                                 const std::vector<double>& times, long replicas,
                                 std::uint64_t seed) {
    params.validate();
    if (!sample_start) throw std::invalid_argument("coalescence_tail_curve: missing start sampler");
    if (replicas <= 0) throw std::invalid_argument("coalescence_tail_curve: needs replicas > 0");
    if (times.empty()) throw std::invalid_argument("coalescence_tail_curve: empty time grid");
    if (times.front() < 0.0)
        throw std::invalid_argument("coalescence_tail_curve: negative time");
    if (!std::is_sorted(times.begin(), times.end()))
        throw std::invalid_argument("coalescence_tail_curve: times must be ascending");

    const double t_cap = times.back();
    std::vector<double> taus(static_cast<std::size_t>(replicas));
    long censored = 0;
    for (long r = 0; r < replicas; ++r) {
        std::mt19937_64 srng = make_rng(seed, replica_stream(static_cast<std::uint64_t>(r), 5));
        CoupledStart st = sample_start(srng);
        CouplingResult cr =
            run_full_coupling(params, st, t_cap, seed, replica_stream(static_cast<std::uint64_t>(r)));
        taus[static_cast<std::size_t>(r)] = cr.record.tau_c;
        if (cr.record.censored) ++censored;
    }

    TailCurve curve;
    curve.times = times;
    curve.censored_fraction = static_cast<double>(censored) / static_cast<double>(replicas);
    curve.survival.reserve(times.size());
    for (double t : times) {
        long hits = static_cast<long>(std::count_if(taus.begin(), taus.end(),
                                                    [t](double tau) { return tau > t; }));
        // The indicator {tau_c > t} is fully observed for every t in the grid
        // (censoring only hides values beyond times.back()), so the proportion
        // carries no censoring distortion.
        curve.survival.push_back(proportion_estimate(hits, replicas, seed));
    }
    return curve;
}

std::string coupling_records_csv(const std::vector<CouplingRecord>& records) {
    std::string out =
        "tau_c,censored,attempts,opened_direct_edge,z_not_isolated,wrong_edge_pattern,"
        "premature_change,walkers_not_at_z\n";
    for (const auto& r : records) {
        out += r.censored ? ">" + format_double(r.t_cap) : format_double(r.tau_c);
        out += ',';
        out += r.censored ? '1' : '0';
        out += ',';
        out += std::to_string(r.attempts);
        for (long c : r.failure_counts) {
            out += ',';
            out += std::to_string(c);
        }
        out += '\n';
    }
    return out;
}

}  // namespace dynperc
