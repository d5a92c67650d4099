#pragma once

// Monte Carlo estimators on top of the event-driven simulator: plug-in TV
// mixing curves, stopping-time ensembles (isolation, giant hitting/exit) with
// goodness-along-path flags, environment goodness persistence, the exact
// birth-death analysis of a single vertex's degree, isolation-excursion
// statistics of a tracked vertex, and visit-rate statistics of the static walk
// on a giant.  Pure closed-form bound evaluators live in bounds.hpp; the exact
// small-system oracle lives in oracle.hpp.

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "dynperc/environment.hpp"
#include "dynperc/graph.hpp"
#include "dynperc/stats.hpp"
#include "dynperc/structure.hpp"

namespace dynperc {

// Plug-in total-variation distance of a sample multiset from the uniform
// distribution on {0,..,n-1}: (1/2) sum_v |freq(v) - 1/n|.  The estimator is
// positively biased by roughly sqrt(n / (2 pi replicas)) near uniformity
// (every cell contributes half-normal noise), so treat small values as noise
// floor, not evidence of exact mixing.  Throws on empty samples or ids
// outside [0, n).
double tv_plugin(const std::vector<int>& samples, long n);

// Plug-in TV against an arbitrary reference law on cells 0..probs.size()-1.
double tv_plugin_against(const std::vector<int>& samples, const std::vector<double>& probs);

// What a mixing curve measures:
//   walk              plug-in TV of the walker position against uniform;
//   full_system       plug-in TV of (walker, environment mask) against the
//                     exact product stationary law -- n <= 5 only, the state
//                     space has n * 2^(n(n-1)/2) cells;
//   environment_count TV of the open-edge count against Binomial(N, p).  The
//                     count is a projection, so this lower-bounds the true
//                     environment TV; from an exchangeable start (all_open,
//                     all_closed or stationary) the count is sufficient and
//                     the projection is exact.
enum class MixingTarget { walk, full_system, environment_count };

struct MixingStart {
    InitMode env_mode = InitMode::stationary;
    const std::vector<std::pair<int, int>>* env_edges = nullptr;  // explicit_edges
    int walker = 0;  // ignored for environment_count
};

struct MixingCurve {
    std::vector<double> times;
    std::vector<Estimate> tv;
};

// One path per replica, sampled at every grid time (estimates at different
// times share paths and are therefore correlated; each one is unbiased).
// Times must be nonnegative and strictly increasing.  full_system with n > 5
// is rejected with guidance to use the coalescence tail bound from
// coupling.hpp instead.  The environment_count target evolves the open-edge
// count directly: a refresh redeclares a uniform edge, which is open with
// probability count/N independently of which edge it is, so the count is
// itself Markov and the projected simulation is exact in law.
MixingCurve mixing_curve(const Params& params, MixingTarget target, const MixingStart& start,
                         const std::vector<double>& times, long replicas, std::uint64_t seed);

// Walk TV from the exchangeable start (stationary environment independent of
// the walker, walker pinned at vertex 0).  Under that start every vertex
// other than 0 carries the same probability at every time, so
// TV(t) = |P(X_t = 0) - 1/n| exactly, and the return frequency estimates it
// with binomial (n-free) noise -- unlike the plug-in, which drowns small TV
// values in sqrt(n/replicas) bias.  Used for crossing-time experiments.
MixingCurve start_return_tv_curve(const Params& params, const std::vector<double>& times,
                                  long replicas, std::uint64_t seed);

// Goodness-along-path tracking for stopping-time samplers.  The environment
// is checked with good_graph_check at snapshot granularity: a check runs when
// the structural version moved and at least `check_every_events` events have
// elapsed since the previous check (plus once at the start and once at the
// stopping time).  check_every_events == 0 resolves to the default cadence:
// every state-changing refresh for n <= 500, every 100 events above.  The
// knob trades fidelity for speed -- coarsening it can only miss bad windows,
// never invent them -- and the resolved value is echoed in outputs.
struct GoodnessTracking {
    bool enabled = true;
    long check_every_events = 0;
    bool with_isolated_clause = true;
    GoodGraphConstants constants{};
};

struct StoppingSample {
    double time = 0.0;    // stopping time, == t_cap when censored
    bool censored = false;
    // First checked snapshot that failed the goodness verdict; +inf when none
    // (or when tracking is disabled).
    double first_bad_time = std::numeric_limits<double>::infinity();
};

struct StoppingEnsemble {
    std::vector<StoppingSample> samples;
    double t_cap = 0.0;
    long cadence_events = 0;   // resolved goodness cadence (0 = disabled)
    long goodness_checks = 0;  // total verdicts computed across replicas
    std::uint64_t master_seed = 0;

    double censored_fraction() const;
    // P(tau > t); censored replicas count as tau > t for every t < t_cap.
    Estimate survival(double t) const;
    // P(tau > t and no checked snapshot in [0, t] was bad).
    Estimate joint_survival(double t) const;
    // Mean stopping time; refused (nullopt) when more than 1% of replicas are
    // censored, since the cap would bias it.
    std::optional<Estimate> mean_time() const;
};

// Rows "time,censored,first_bad_time" (censored times printed ">t_cap",
// first_bad_time empty when the path stayed good), preceded by '#' metadata
// lines including the resolved goodness cadence.
std::string stopping_samples_csv(const StoppingEnsemble& ensemble,
                                 const std::vector<std::string>& metadata = {});

// CSV for estimate curves: '#' metadata lines, then a header and one row per
// time: "time,estimate,stderr,replicas,censored_fraction".
std::string estimates_csv(const std::vector<double>& times, const std::vector<Estimate>& rows,
                          const std::vector<std::string>& metadata = {});

// Initial condition for a stopping-time replica: an environment plus one
// position per registered walker.
struct SystemStart {
    Environment env;
    std::vector<int> walkers;
};

using SystemStartSampler = std::function<SystemStart(std::mt19937_64&)>;

// Stationary environment with iid uniform walker positions; with
// condition_good set, environments are resampled until the goodness verdict
// passes (rejection sampling -- cheap whenever good graphs are typical).
SystemStartSampler stationary_system_start(const Params& params, int walker_count,
                                           bool condition_good = false,
                                           const GoodGraphConstants& gc = {},
                                           bool with_isolated_clause = true);

enum class IsolationMode { single, dual };

// Stopping times of walker isolation: single waits for the walker's vertex to
// have degree 0, dual registers two independent walkers on one environment
// and waits for both to be isolated simultaneously.  A start that already
// satisfies the condition stops at 0.  Censored at t_cap.
StoppingEnsemble isolation_samples(const Params& params, IsolationMode mode,
                                   const SystemStartSampler& start, double t_cap, long replicas,
                                   std::uint64_t seed, const GoodnessTracking& tracking = {});

enum class GiantStopKind { hit, exit };

// Stopping times for the walker entering (hit) or leaving (exit) the current
// giant component.  Exit mode requires every sampled start to place the
// walker inside the giant (std::invalid_argument otherwise).  Membership only
// changes when a refresh flips an edge -- a walker move stays inside its
// component -- so the component structure is recomputed only then.
StoppingEnsemble giant_hit_exit_samples(const Params& params, GiantStopKind which,
                                        const SystemStartSampler& start, double t_cap,
                                        long replicas, std::uint64_t seed,
                                        const GoodnessTracking& tracking = {});

// P(the environment leaves the good class at some checked snapshot within
// [0, horizon]) from the fixed initial environment eta0: replicas share eta0
// and differ only in refresh randomness.  horizon == 0 degenerates to the
// indicator that eta0 itself fails the verdict.  Requires horizon <= n/mu
// (the class is only meaningful on that scale) and eta0.n() == params.n.
Estimate goodness_persistence(const Environment& eta0, const Params& params, double horizon,
                              long replicas, std::uint64_t seed,
                              const GoodnessTracking& tracking = {});

// Exact birth-death analysis of d_t(v), the open-degree of one fixed vertex:
// jumps k -> k+1 at rate (n-1-k) p mu and k -> k-1 at rate k (1-p) mu, so the
// stationary law is Binomial(n-1, p) and downward passage times satisfy the
// standard linear recursion.  hit_zero_from[k] is E_k[time to reach 0]
// (+inf when mu == 0 and k > 0, or when p == 1).
struct DegreeChainAnalysis {
    std::vector<double> up_rates;     // k = 0..n-1
    std::vector<double> down_rates;   // k = 0..n-1
    std::vector<double> stationary;   // Binomial(n-1, p) pmf
    std::vector<double> hit_zero_from;
    double hit_zero_from_stationary = 0.0;
};

DegreeChainAnalysis degree_chain_analysis(const Params& params);

// Simulation cross-check for the hitting time: Gillespie runs of the
// two-rate chain from a Binomial(n-1, p) start until 0.  Requires mu > 0.
Estimate degree_chain_hit_zero_mc(const Params& params, long replicas, std::uint64_t seed);

// Isolation excursions of the tracked vertex 0 under the exchangeable start
// (stationary environment, walker at 0).  With sigma[k] the k-th time vertex
// 0 becomes isolated, sigma_prime[k] is the first de-isolation after sigma[k]
// and sigma_dblprime[k] the start of the terminal degree-1 stretch ending at
// sigma[k]; ordering: sigma[k] < sigma_prime[k] < sigma[k+1] and
// sigma_dblprime[k] <= sigma[k].  walker_at_tracked[k] records X = 0 at
// sigma[k].  A start with degree 0 yields the degenerate sigma[0] == 0.
struct IsolationExcursionRecord {
    std::vector<double> sigma;
    std::vector<double> sigma_prime;
    std::vector<double> sigma_dblprime;
    std::vector<char> walker_at_tracked;
    bool censored = false;  // t_cap hit before the requested excursions
                            // (including the final de-isolation) completed
};

struct ExcursionEnsemble {
    std::vector<IsolationExcursionRecord> records;
    double t_cap = 0.0;
    int requested = 0;
    std::uint64_t master_seed = 0;

    // Row k: among replicas whose first k strictly positive isolations were
    // all observed and whose walker sat at the tracked vertex at the first
    // k-1 of them, how often it was there at the k-th as well.  Degenerate
    // sigma == 0 entries (vertex isolated at start, walker trivially there)
    // are skipped, so row 1 is the first informative isolation.
    struct ConditionalRow {
        long at_risk = 0;
        long stayed = 0;
        Estimate prob;
    };
    std::vector<ConditionalRow> conditional_at_tracked;
};

ExcursionEnsemble excursion_samples(const Params& params, double t_cap, long replicas,
                                    std::uint64_t seed, int excursions = 3);

// Visit-rate statistics of the discrete-time nearest-neighbour random walk on
// the giant of a static graph: runs independent walks of m steps from the
// degree-biased stationary law and counts visits to the giant's degree-1
// vertices.  Under that start E[N_m / m] equals pi_A exactly.  failures
// counts runs with |N_m - m pi_A| >= pi_A m / 2, and failure_bound evaluates
// the spectral visit-concentration bound at that deviation using the
// certified lower end of the power-iteration gap.
struct VisitRateStats {
    long long m = 0;
    long runs = 0;
    double pi_A = 0.0;      // stationary mass of degree-1 giant vertices
    double pi_min = 0.0;
    double gamma_lower = 0.0;
    Estimate rate;          // mean N_m / m
    long failures = 0;
    double failure_bound = 0.0;
};

VisitRateStats degree_one_visit_stats(const Graph& g, long long m, long runs,
                                      std::uint64_t seed);

}  // namespace dynperc
