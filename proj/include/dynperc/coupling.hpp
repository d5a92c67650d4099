#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "dynperc/environment.hpp"
#include "dynperc/stats.hpp"

namespace dynperc {

// True iff the open-edge sets of eta and xi differ only inside {(x,z),(y,z)}
// for some distinct vertices x, y, z. Equal environments qualify for every n;
// below three vertices nothing else can.
bool h_close(const Environment& eta, const Environment& xi);

// ---------------------------------------------------------------------------
// Static/dynamic walk comparison: one evolving environment, two walks off the
// same ring clock and the same target draws. The static walk consults the
// frozen initial environment, the dynamic walk the current one. An edge is
// "seen" once it is incident to any vertex either walk has occupied so far;
// decoupling is the first moment a seen edge differs between the initial and
// the current environment. Until then the walks provably make identical moves.
// ---------------------------------------------------------------------------

struct StaticDynamicResult {
    bool decoupled = false;
    double decoupling_time = 0.0;  // meaningful only when decoupled
    bool env_changed = false;
    double first_env_change_time = 0.0;  // first refresh after which eta_t != eta_0 anywhere
    std::vector<std::pair<double, int>> static_moves;   // (time, new position)
    std::vector<std::pair<double, int>> dynamic_moves;  // (time, new position)
    double t_cap = 0.0;
};

StaticDynamicResult run_static_dynamic(const Params& params, const Environment& eta0,
                                       int x0, double t_cap, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Four-step coalescent coupling of two full systems (X, eta) and (Y, xi).
//
//   search (steps i+ii): refreshes identical in both environments, the two
//     walks ring independently, until the environments agree and both walks
//     are isolated at the same moment, at positions x0' and y0'. Should the
//     full states ever coincide exactly (equal environments, walks on the
//     same vertex), the systems have coalesced and run merged from then on;
//     in particular x0' = y0' coalesces instantly.
//   armed (step iii): refreshes stay identical away from {x0',y0'}; the 2n-3
//     closed edges at the pair carry a joint change-clock of rate (2n-3)*p*mu,
//     realised by thinning refresh events to those that would open an
//     incident edge. When it rings, the choice (direct edge with probability
//     1/(2n-3), else a uniform z and a fair side) is drawn from a dedicated
//     stream: the direct edge (x0',y0') opens in both -> failure; otherwise
//     one of (x0',z)/(y0',z) opens in eta and the opposite one in xi.
//     Proceed only if z was isolated and eta opened (x0',z).
//   paired (step iv): the pair (x0',z) in eta / (y0',z) in xi shares one
//     refresh clock, the pair (y0',z) in eta / (x0',z) in xi another; all
//     other edges share clocks identically, and the walks move in lockstep
//     to and from z (targets mirrored through swapping x0' <-> y0'). The
//     phase ends at the first state change on an edge incident to
//     {x0',y0',z}: if that change is the designated open pair closing, the
//     environments recouple and the coupling succeeds when both walks sit at
//     z (failure walkers_not_at_z otherwise); any other incident change is a
//     premature_change failure.
//
// On failure the pair of environments is again close in the h_close sense
// (asserted). The source definition returns to step i after premature_change
// and to step ii after every other failure; both land in the unified search
// phase here, which re-establishes environment equality exactly when it was
// lost, so the asymmetry -- easy to miss in the source -- is behaviourally
// absorbed. Coalescence is declared at the first full-state identity, which
// can only shorten the coalescence time relative to waiting for the scripted
// success; after it both systems evolve as one.
// ---------------------------------------------------------------------------

enum class CouplingFailure {
    opened_direct_edge = 0,  // step iii opened (x0',y0') itself
    z_not_isolated,          // step iii picked a z with positive degree
    wrong_edge_pattern,      // step iii opened (y0',z) in eta instead of (x0',z)
    premature_change,        // step iv: another edge at {x0',y0',z} changed first
    walkers_not_at_z,        // step iv: the pair closed while the walks sat at x0',y0'
};
inline constexpr int kCouplingFailureKinds = 5;
const char* coupling_failure_name(CouplingFailure f);

struct PhaseDurations {
    double sigma1 = 0.0;  // search: until equal environments with both walks isolated
    double sigma2 = 0.0;  // armed: wait for the joint change-clock
    double sigma3 = 0.0;  // paired: until an edge at {x0',y0',z} changes state
};

struct CouplingRecord {
    double tau_c = 0.0;   // +infinity when censored
    bool censored = false;
    long attempts = 0;    // returns to the search phase == total failures
    std::array<long, kCouplingFailureKinds> failure_counts{};
    std::vector<PhaseDurations> phases;  // one entry per attempt cycle started
    double t_cap = 0.0;
};

struct CoupledStart {
    int x0;
    int y0;
    Environment eta;
    Environment xi;
};

struct CouplingResult {
    CouplingRecord record;
    int x;
    int y;
    Environment eta;
    Environment xi;
};

// Runs the coupling from the given joint start until coalescence, then merged
// to t_cap (censored record if coalescence never happens). Requires n >= 3:
// step iii has no target vertex otherwise. Randomness is split into fixed
// substreams of (seed, stream): event clock, refresh payload, X targets,
// Y targets, step-iii choices; batch drivers pass stream = replica_stream(r)
// so replicas are deterministic and order-independent.
CouplingResult run_full_coupling(const Params& params, const CoupledStart& start,
                                 double t_cap, std::uint64_t seed, std::uint64_t stream = 0);

using StartSampler = std::function<CoupledStart(std::mt19937_64&)>;

struct TailCurve {
    std::vector<double> times;
    std::vector<Estimate> survival;  // empirical P(tau_c > t), exact even past censoring
    double censored_fraction = 0.0;  // replicas not coalesced by times.back()
};

// Empirical survival function of the coalescence time over independent
// replicas, capped at times.back(). Nonincreasing in t by construction.
TailCurve coalescence_tail_curve(const Params& params, const StartSampler& sample_start,
                                 const std::vector<double>& times, long replicas,
                                 std::uint64_t seed);

// One row per record: tau_c (">t_cap" when censored), censored flag, attempts
// and the five failure counts.
std::string coupling_records_csv(const std::vector<CouplingRecord>& records);

}  // namespace dynperc
