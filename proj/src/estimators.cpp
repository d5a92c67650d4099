#include "dynperc/estimators.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "dynperc/bounds.hpp"
#include "dynperc/csvio.hpp"
#include "dynperc/rng.hpp"
#include "dynperc/simulation.hpp"

namespace dynperc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Plug-in TV of counts against a reference law plus a delta-method standard
// error: holding the realized signs s_i = sign(f_i - q_i) fixed, the statistic
// is a sample mean of (1/2) s_{cell}, whose variance is estimated from the
// empirical frequencies.  Sign flips near f_i == q_i make this approximate,
// which is all a TV point estimate warrants.
Estimate tv_against_counts(const std::vector<long>& counts, const std::vector<double>& probs,
                           long total, std::uint64_t seed) {
    double tv = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        double f = static_cast<double>(counts[i]) / static_cast<double>(total);
        double d = f - probs[i];
        tv += std::abs(d);
        double s = d > 0 ? 0.5 : (d < 0 ? -0.5 : 0.0);
        m1 += s * f;
        m2 += s * s * f;
    }
    double var = std::max(0.0, m2 - m1 * m1) / static_cast<double>(total);
    return {0.5 * tv, std::sqrt(var), total, seed, 0.0};
}

std::vector<long> bucket_samples(const std::vector<int>& samples, long cells,
                                 const char* where) {
    if (samples.empty()) throw std::invalid_argument(std::string(where) + ": empty sample set");
    std::vector<long> counts(static_cast<std::size_t>(cells), 0);
    for (int s : samples) {
        if (s < 0 || s >= cells)
            throw std::invalid_argument(std::string(where) + ": sample id out of range");
        ++counts[static_cast<std::size_t>(s)];
    }
    return counts;
}

void check_time_grid(const std::vector<double>& times, const char* where) {
    if (times.empty()) throw std::invalid_argument(std::string(where) + ": empty time grid");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (times[i] < 0.0 || !std::isfinite(times[i]))
            throw std::invalid_argument(std::string(where) + ": times must be finite and nonnegative");
        if (i > 0 && times[i] <= times[i - 1])
            throw std::invalid_argument(std::string(where) + ": times must be strictly increasing");
    }
}

// Environment bitmask over the N = n(n-1)/2 edge indices; only used for the
// n <= 5 full-system target, where N <= 10.
unsigned env_mask(const Environment& env) {
    long long N = pair_count(env.n());
    unsigned mask = 0;
    for (long long k = 0; k < N; ++k)
        if (env.is_open_index(k)) mask |= 1u << static_cast<unsigned>(k);
    return mask;
}

// Checks the goodness verdict at snapshot granularity.  A verdict runs when
// the structural version moved and at least `cadence` events passed since the
// previous verdict (always on the first call; `force` waives the cadence for
// the final stopping-time snapshot).  Checking stops after the first bad
// snapshot -- only the first failure time is reported.
struct GoodnessMonitor {
    bool enabled;
    long cadence;
    bool with_isolated;
    GoodGraphConstants gc;
    std::uint64_t last_version = std::numeric_limits<std::uint64_t>::max();
    long events_since;
    double first_bad = kInf;
    long checks = 0;

    GoodnessMonitor(const GoodnessTracking& t, const Params& p)
        : enabled(t.enabled),
          cadence(t.check_every_events > 0 ? t.check_every_events : (p.n <= 500 ? 1 : 100)),
          with_isolated(t.with_isolated_clause),
          gc(t.constants),
          events_since(cadence) {}

    void observe(System& sys, bool force) {
        if (!enabled || first_bad != kInf) return;
        if (sys.env.version() == last_version && last_version != std::numeric_limits<std::uint64_t>::max()) {
            ++events_since;
            return;
        }
        if (!force && events_since < cadence) {
            ++events_since;
            return;
        }
        GoodGraphVerdict v = good_graph_check(sys.env.snapshot(), gc, with_isolated);
        ++checks;
        last_version = sys.env.version();
        events_since = 0;
        if (!v.good) first_bad = sys.env.clock();
    }
};

StoppingEnsemble run_stopping_ensemble(const Params& params, const SystemStartSampler& start,
                                       int expected_walkers, double t_cap, long replicas,
                                       std::uint64_t seed, const GoodnessTracking& tracking,
                                       const Predicate& base,
                                       const std::function<void(System&)>& validate_start) {
    params.validate();
    tracking.constants.validate();
    if (!start) throw std::invalid_argument("stopping ensemble: start sampler is empty");
    if (replicas <= 0) throw std::invalid_argument("stopping ensemble: replicas must be positive");
    if (!(t_cap >= 0.0)) throw std::invalid_argument("stopping ensemble: t_cap must be nonnegative");
    if (tracking.check_every_events < 0)
        throw std::invalid_argument("stopping ensemble: check_every_events must be nonnegative");

    StoppingEnsemble out;
    out.t_cap = t_cap;
    out.master_seed = seed;
    out.cadence_events =
        tracking.enabled
            ? (tracking.check_every_events > 0 ? tracking.check_every_events
                                               : (params.n <= 500 ? 1 : 100))
            : 0;
    out.samples.reserve(static_cast<std::size_t>(replicas));

    for (long r = 0; r < replicas; ++r) {
        auto engine = make_rng(seed, replica_stream(static_cast<std::uint64_t>(r)));
        SystemStart s0 = start(engine);
        if (s0.env.n() != params.n)
            throw std::invalid_argument("stopping ensemble: start environment has wrong n");
        if (static_cast<int>(s0.walkers.size()) != expected_walkers)
            throw std::invalid_argument("stopping ensemble: start sampler placed wrong walker count");
        auto edges = s0.env.open_edges();
        System sys(params, InitMode::explicit_edges, engine, &edges);
        for (int w : s0.walkers) sys.add_walker(w);
        if (validate_start) validate_start(sys);

        GoodnessMonitor mon(tracking, params);
        base.validate(sys);
        Predicate pred = Predicate::custom([&](System& s) {
            mon.observe(s, false);
            return base.evaluate(s);
        });
        RunResult rr = run_until(sys, pred, t_cap);
        mon.observe(sys, true);
        out.goodness_checks += mon.checks;
        out.samples.push_back({rr.stop_time, rr.censored, mon.first_bad});
    }
    return out;
}

}  // namespace

double tv_plugin(const std::vector<int>& samples, long n) {
    if (n <= 0) throw std::invalid_argument("tv_plugin: n must be positive");
    auto counts = bucket_samples(samples, n, "tv_plugin");
    std::vector<double> probs(static_cast<std::size_t>(n), 1.0 / static_cast<double>(n));
    return tv_against_counts(counts, probs, static_cast<long>(samples.size()), 0).value;
}

double tv_plugin_against(const std::vector<int>& samples, const std::vector<double>& probs) {
    for (double q : probs)
        if (!(q >= 0.0)) throw std::invalid_argument("tv_plugin_against: negative reference mass");
    auto counts = bucket_samples(samples, static_cast<long>(probs.size()), "tv_plugin_against");
    return tv_against_counts(counts, probs, static_cast<long>(samples.size()), 0).value;
}

MixingCurve mixing_curve(const Params& params, MixingTarget target, const MixingStart& start,
                         const std::vector<double>& times, long replicas, std::uint64_t seed) {
    params.validate();
    check_time_grid(times, "mixing_curve");
    if (replicas <= 0) throw std::invalid_argument("mixing_curve: replicas must be positive");

    const long long N = params.N();
    MixingCurve out;
    out.times = times;

    if (target == MixingTarget::environment_count) {
        // The open-edge count is itself Markov: a refresh redeclares a uniform
        // edge, which is open with probability count/N regardless of identity.
        // Simulating the projected chain is exact in law and avoids touching
        // N edge states per replica.
        long long k0_fixed = 0;
        bool stationary_start = false;
        switch (start.env_mode) {
            case InitMode::all_open: k0_fixed = N; break;
            case InitMode::all_closed: k0_fixed = 0; break;
            case InitMode::stationary: stationary_start = true; break;
            case InitMode::explicit_edges: {
                auto rng0 = make_rng(seed);
                Environment env = Environment::init(params, InitMode::explicit_edges, rng0,
                                                    start.env_edges);
                k0_fixed = env.open_count();
                break;
            }
        }
        std::vector<std::vector<long>> counts(times.size(),
                                              std::vector<long>(static_cast<std::size_t>(N) + 1, 0));
        for (long r = 0; r < replicas; ++r) {
            auto engine = make_rng(seed, replica_stream(static_cast<std::uint64_t>(r)));
            long long k = k0_fixed;
            if (stationary_start) {
                std::binomial_distribution<long long> bin(N, params.p());
                k = bin(engine);
            }
            double now = 0.0;
            std::size_t next = 0;
            const double rate = params.mu * static_cast<double>(N);
            std::exponential_distribution<double> hold(rate > 0.0 ? rate : 1.0);
            std::uniform_real_distribution<double> u01(0.0, 1.0);
            while (next < times.size()) {
                double t_event = rate > 0.0 ? now + hold(engine) : kInf;
                while (next < times.size() && times[next] <= t_event) {
                    ++counts[next][static_cast<std::size_t>(k)];
                    ++next;
                }
                if (next >= times.size()) break;
                now = t_event;
                bool was_open = u01(engine) * static_cast<double>(N) < static_cast<double>(k);
                bool open = u01(engine) < params.p();
                k += (open ? 1 : 0) - (was_open ? 1 : 0);
            }
        }
        std::vector<double> probs(static_cast<std::size_t>(N) + 1);
        for (long long k = 0; k <= N; ++k)
            probs[static_cast<std::size_t>(k)] = std::exp(log_binomial_pmf(k, N, params.p()));
        for (std::size_t ti = 0; ti < times.size(); ++ti)
            out.tv.push_back(tv_against_counts(counts[ti], probs, replicas, seed));
        return out;
    }

    // walk / full_system: real event-driven paths, one per replica, sampled at
    // every grid time.
    long cells = 0;
    std::vector<double> probs;
    if (target == MixingTarget::walk) {
        cells = params.n;
        probs.assign(static_cast<std::size_t>(cells), 1.0 / params.n);
    } else {
        if (params.n > 5)
            throw std::invalid_argument(
                "mixing_curve: full_system plug-in needs n <= 5 (n * 2^N cells); use the "
                "coalescence tail curve from coupling.hpp as the mixing surrogate instead");
        cells = params.n << N;
        probs.resize(static_cast<std::size_t>(cells));
        for (unsigned mask = 0; mask < (1u << N); ++mask) {
            int pop = __builtin_popcount(mask);
            double pm = std::pow(params.p(), pop) * std::pow(1.0 - params.p(), double(N - pop)) /
                        params.n;
            for (int x = 0; x < params.n; ++x)
                probs[static_cast<std::size_t>(mask) * params.n + x] = pm;
        }
    }
    if (start.walker < 0 || start.walker >= params.n)
        throw std::invalid_argument("mixing_curve: walker start out of range");

    std::vector<std::vector<long>> counts(times.size(),
                                          std::vector<long>(static_cast<std::size_t>(cells), 0));
    for (long r = 0; r < replicas; ++r) {
        auto engine = make_rng(seed, replica_stream(static_cast<std::uint64_t>(r)));
        System sys(params, start.env_mode, engine, start.env_edges);
        sys.add_walker(start.walker);
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
            advance(sys, times[ti]);
            long cell = target == MixingTarget::walk
                            ? sys.walkers[0].position
                            : static_cast<long>(env_mask(sys.env)) * params.n +
                                  sys.walkers[0].position;
            ++counts[ti][static_cast<std::size_t>(cell)];
        }
    }
    for (std::size_t ti = 0; ti < times.size(); ++ti)
        out.tv.push_back(tv_against_counts(counts[ti], probs, replicas, seed));
    return out;
}

MixingCurve start_return_tv_curve(const Params& params, const std::vector<double>& times,
                                  long replicas, std::uint64_t seed) {
    params.validate();
    check_time_grid(times, "start_return_tv_curve");
    if (replicas <= 0)
        throw std::invalid_argument("start_return_tv_curve: replicas must be positive");

    std::vector<long> returns(times.size(), 0);
    for (long r = 0; r < replicas; ++r) {
        auto engine = make_rng(seed, replica_stream(static_cast<std::uint64_t>(r)));
        System sys(params, InitMode::stationary, engine);
        sys.add_walker(0);
        for (std::size_t ti = 0; ti < times.size(); ++ti) {
            advance(sys, times[ti]);
            if (sys.walkers[0].position == 0) ++returns[ti];
        }
    }
    MixingCurve out;
    out.times = times;
    for (std::size_t ti = 0; ti < times.size(); ++ti) {
        Estimate e = proportion_estimate(returns[ti], replicas, seed);
        e.value = std::abs(e.value - 1.0 / params.n);
        out.tv.push_back(e);
    }
    return out;
}

double StoppingEnsemble::censored_fraction() const {
    if (samples.empty()) return 0.0;
    long c = 0;
    for (const auto& s : samples) c += s.censored ? 1 : 0;
    return static_cast<double>(c) / static_cast<double>(samples.size());
}

Estimate StoppingEnsemble::survival(double t) const {
    if (!(t >= 0.0 && t <= t_cap))
        throw std::invalid_argument("survival: t outside [0, t_cap] is unidentified");
    long hits = 0;
    for (const auto& s : samples) hits += (s.censored || s.time > t) ? 1 : 0;
    Estimate e = proportion_estimate(hits, static_cast<long>(samples.size()), master_seed);
    e.censored_fraction = censored_fraction();
    return e;
}

Estimate StoppingEnsemble::joint_survival(double t) const {
    if (!(t >= 0.0 && t <= t_cap))
        throw std::invalid_argument("joint_survival: t outside [0, t_cap] is unidentified");
    long hits = 0;
    for (const auto& s : samples)
        hits += ((s.censored || s.time > t) && s.first_bad_time > t) ? 1 : 0;
    Estimate e = proportion_estimate(hits, static_cast<long>(samples.size()), master_seed);
    e.censored_fraction = censored_fraction();
    return e;
}

std::optional<Estimate> StoppingEnsemble::mean_time() const {
    double cf = censored_fraction();
    if (cf > 0.01 || samples.empty()) return std::nullopt;
    std::vector<double> xs;
    xs.reserve(samples.size());
    for (const auto& s : samples) xs.push_back(s.time);
    Estimate e = mean_estimate(xs, master_seed);
    e.censored_fraction = cf;
    return e;
}

std::string stopping_samples_csv(const StoppingEnsemble& ensemble,
                                 const std::vector<std::string>& metadata) {
    CsvTable table;
    table.meta = metadata;
    table.add_meta("replicas", std::to_string(ensemble.samples.size()));
    table.add_meta("t_cap", format_double(ensemble.t_cap));
    table.add_meta("goodness_cadence_events", std::to_string(ensemble.cadence_events));
    table.add_meta("goodness_checks", std::to_string(ensemble.goodness_checks));
    table.add_meta("master_seed", std::to_string(ensemble.master_seed));
    table.columns = {"time", "censored", "first_bad_time"};
    for (const auto& s : ensemble.samples) {
        std::string t = s.censored ? ">" + format_double(ensemble.t_cap) : format_double(s.time);
        std::string bad = s.first_bad_time == kInf ? "" : format_double(s.first_bad_time);
        table.add_row({t, s.censored ? "1" : "0", bad});
    }
    return table.to_string();
}

std::string estimates_csv(const std::vector<double>& times, const std::vector<Estimate>& rows,
                          const std::vector<std::string>& metadata) {
    if (times.size() != rows.size())
        throw std::invalid_argument("estimates_csv: times and rows differ in length");
    CsvTable table;
    table.meta = metadata;
    table.columns = {"time", "estimate", "stderr", "replicas", "censored_fraction"};
    for (std::size_t i = 0; i < rows.size(); ++i)
        table.add_row({format_double(times[i]), format_double(rows[i].value),
                       format_double(rows[i].std_error), std::to_string(rows[i].replicas),
                       format_double(rows[i].censored_fraction)});
    return table.to_string();
}

SystemStartSampler stationary_system_start(const Params& params, int walker_count,
                                           bool condition_good, const GoodGraphConstants& gc,
                                           bool with_isolated_clause) {
    params.validate();
    gc.validate();
    if (walker_count < 0)
        throw std::invalid_argument("stationary_system_start: negative walker count");
    return [params, walker_count, condition_good, gc,
            with_isolated_clause](std::mt19937_64& rng) -> SystemStart {
        // Goodness is a high-probability event only for moderately large n (it
        // has probability ~0 below n ~ 150 at lambda = 2), so cap the rejection
        // loop rather than spinning forever on an infeasible conditioning.
        constexpr int kMaxRejections = 100000;
        for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
            Environment env = Environment::init(params, InitMode::stationary, rng);
            if (condition_good && !good_graph_check(env.snapshot(), gc, with_isolated_clause).good)
                continue;
            std::vector<int> ws(static_cast<std::size_t>(walker_count));
            std::uniform_int_distribution<int> upos(0, params.n - 1);
            for (auto& w : ws) w = upos(rng);
            return {std::move(env), std::move(ws)};
        }
        throw std::runtime_error(
            "stationary_system_start: no good environment found in 100000 stationary samples; "
            "goodness conditioning is infeasible at these parameters");
    };
}

StoppingEnsemble isolation_samples(const Params& params, IsolationMode mode,
                                   const SystemStartSampler& start, double t_cap, long replicas,
                                   std::uint64_t seed, const GoodnessTracking& tracking) {
    Predicate base = mode == IsolationMode::single ? Predicate::walker_isolated(0)
                                                   : Predicate::both_isolated();
    int walkers = mode == IsolationMode::single ? 1 : 2;
    return run_stopping_ensemble(params, start, walkers, t_cap, replicas, seed, tracking, base,
                                 {});
}

StoppingEnsemble giant_hit_exit_samples(const Params& params, GiantStopKind which,
                                        const SystemStartSampler& start, double t_cap,
                                        long replicas, std::uint64_t seed,
                                        const GoodnessTracking& tracking) {
    Predicate base = which == GiantStopKind::hit ? Predicate::walker_in_giant(0)
                                                 : Predicate::walker_out_of_giant(0);
    std::function<void(System&)> validate_start;
    if (which == GiantStopKind::exit) {
        validate_start = [](System& sys) {
            if (!sys.in_giant(sys.walkers[0].position))
                throw std::invalid_argument(
                    "giant_hit_exit_samples: exit mode needs the walker started in the giant");
        };
    }
    return run_stopping_ensemble(params, start, 1, t_cap, replicas, seed, tracking, base,
                                 validate_start);
}

Estimate goodness_persistence(const Environment& eta0, const Params& params, double horizon,
                              long replicas, std::uint64_t seed,
                              const GoodnessTracking& tracking) {
    params.validate();
    tracking.constants.validate();
    if (eta0.n() != params.n)
        throw std::invalid_argument("goodness_persistence: environment size mismatch");
    if (!(horizon >= 0.0))
        throw std::invalid_argument("goodness_persistence: horizon must be nonnegative");
    if (replicas <= 0) throw std::invalid_argument("goodness_persistence: replicas must be positive");
    if (params.mu > 0.0 && horizon > static_cast<double>(params.n) / params.mu)
        throw std::invalid_argument("goodness_persistence: horizon exceeds n/mu");

    GoodnessTracking local = tracking;  // the verdict is the whole point here
    local.enabled = true;
    auto edges = eta0.open_edges();
    long hits = 0;
    for (long r = 0; r < replicas; ++r) {
        auto engine = make_rng(seed, replica_stream(static_cast<std::uint64_t>(r)));
        System sys(params, InitMode::explicit_edges, engine, &edges);
        GoodnessMonitor mon(local, params);
        Predicate pred = Predicate::custom([&](System& s) {
            mon.observe(s, false);
            return mon.first_bad != kInf;
        });
        run_until(sys, pred, horizon);
        mon.observe(sys, true);
        if (mon.first_bad != kInf) ++hits;
    }
    return proportion_estimate(hits, replicas, seed);
}

DegreeChainAnalysis degree_chain_analysis(const Params& params) {
    params.validate();
    const int n = params.n;
    const double p = params.p();
    const double mu = params.mu;
    DegreeChainAnalysis out;
    out.up_rates.resize(static_cast<std::size_t>(n));
    out.down_rates.resize(static_cast<std::size_t>(n));
    out.stationary.resize(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) {
        out.up_rates[k] = static_cast<double>(n - 1 - k) * p * mu;
        out.down_rates[k] = static_cast<double>(k) * (1.0 - p) * mu;
        out.stationary[k] = std::exp(log_binomial_pmf(k, n - 1, p));
    }
    // Mean downward passage times h[j] = E_j[hit j-1] from the one-step
    // relation h[j] = 1/q-(j) + (q+(j)/q-(j)) h[j+1], solved top-down (the top
    // state has no upward rate).
    std::vector<double> h(static_cast<std::size_t>(n), 0.0);
    for (int j = n - 1; j >= 1; --j) {
        double up = out.up_rates[j], down = out.down_rates[j];
        if (down <= 0.0) {
            h[j] = kInf;
        } else if (up <= 0.0) {
            h[j] = 1.0 / down;
        } else {
            h[j] = 1.0 / down + up / down * h[j + 1 < n ? j + 1 : j];  // j == n-1 has up == 0
        }
    }
    out.hit_zero_from.resize(static_cast<std::size_t>(n), 0.0);
    for (int k = 1; k < n; ++k) out.hit_zero_from[k] = out.hit_zero_from[k - 1] + h[k];
    double mean = 0.0;
    for (int k = 1; k < n; ++k) {
        if (out.stationary[k] <= 0.0) continue;  // avoid 0 * inf
        mean += out.stationary[k] * out.hit_zero_from[k];
    }
    out.hit_zero_from_stationary = mean;
    return out;
}

Estimate degree_chain_hit_zero_mc(const Params& params, long replicas, std::uint64_t seed) {
    params.validate();
    if (params.mu <= 0.0)
        throw std::invalid_argument("degree_chain_hit_zero_mc: mu must be positive");
    if (params.p() >= 1.0)
        throw std::invalid_argument("degree_chain_hit_zero_mc: p == 1 never reaches 0");
    if (replicas <= 0)
        throw std::invalid_argument("degree_chain_hit_zero_mc: replicas must be positive");
    const int n = params.n;
    const double p = params.p();
    const double mu = params.mu;
    std::vector<double> taus;
    taus.reserve(static_cast<std::size_t>(replicas));
    for (long r = 0; r < replicas; ++r) {
        auto engine = make_rng(seed, replica_stream(static_cast<std::uint64_t>(r)));
        std::binomial_distribution<int> bin(n - 1, p);
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        int k = bin(engine);
        double t = 0.0;
        while (k > 0) {
            double up = static_cast<double>(n - 1 - k) * p * mu;
            double down = static_cast<double>(k) * (1.0 - p) * mu;
            double total = up + down;
            std::exponential_distribution<double> hold(total);
            t += hold(engine);
            k += u01(engine) * total < up ? 1 : -1;
        }
        taus.push_back(t);
    }
    return mean_estimate(taus, seed);
}

ExcursionEnsemble excursion_samples(const Params& params, double t_cap, long replicas,
                                    std::uint64_t seed, int excursions) {
    params.validate();
    if (!(t_cap >= 0.0)) throw std::invalid_argument("excursion_samples: t_cap must be nonnegative");
    if (replicas <= 0) throw std::invalid_argument("excursion_samples: replicas must be positive");
    if (excursions < 1) throw std::invalid_argument("excursion_samples: need at least one excursion");

    ExcursionEnsemble out;
    out.t_cap = t_cap;
    out.requested = excursions;
    out.master_seed = seed;
    out.records.reserve(static_cast<std::size_t>(replicas));

    const std::size_t want = static_cast<std::size_t>(excursions);
    for (long r = 0; r < replicas; ++r) {
        auto engine = make_rng(seed, replica_stream(static_cast<std::uint64_t>(r)));
        System sys(params, InitMode::stationary, engine);
        sys.add_walker(0);

        IsolationExcursionRecord rec;
        int prev_deg = sys.env.degree(0);
        double deg1_since = prev_deg == 1 ? 0.0 : kInf;
        if (prev_deg == 0) {
            rec.sigma.push_back(0.0);
            rec.sigma_dblprime.push_back(0.0);
            rec.walker_at_tracked.push_back(1);  // the walker starts at 0
        }
        Predicate pred = Predicate::custom([&](System& s) {
            int d = s.env.degree(0);
            if (d != prev_deg) {
                double now = s.env.clock();
                if (prev_deg == 0) rec.sigma_prime.push_back(now);  // de-isolation
                if (d == 1) deg1_since = now;                       // degree-1 stretch begins
                if (d == 0) {
                    assert(prev_deg == 1 && deg1_since != kInf);
                    rec.sigma.push_back(now);
                    rec.sigma_dblprime.push_back(deg1_since);
                    rec.walker_at_tracked.push_back(s.walkers[0].position == 0 ? 1 : 0);
                }
                prev_deg = d;
            }
            return rec.sigma.size() >= want && rec.sigma_prime.size() >= want;
        });
        RunResult rr = run_until(sys, pred, t_cap);
        rec.censored = rr.censored;
        out.records.push_back(std::move(rec));
    }

    // Conditional at-tracked table over the strictly positive isolations: a
    // degenerate sigma == 0 (vertex isolated at start, walker trivially there)
    // carries no information and is skipped.
    for (int k = 1; k <= excursions; ++k) {
        long at_risk = 0, stayed = 0;
        for (const auto& rec : out.records) {
            std::size_t off = !rec.sigma.empty() && rec.sigma.front() == 0.0 ? 1 : 0;
            if (rec.sigma.size() < off + static_cast<std::size_t>(k)) continue;
            bool prior = true;
            for (int j = 0; j + 1 < k; ++j)
                prior = prior && rec.walker_at_tracked[off + static_cast<std::size_t>(j)];
            if (!prior) continue;
            ++at_risk;
            stayed += rec.walker_at_tracked[off + static_cast<std::size_t>(k) - 1] ? 1 : 0;
        }
        ExcursionEnsemble::ConditionalRow row;
        row.at_risk = at_risk;
        row.stayed = stayed;
        row.prob = at_risk > 0 ? proportion_estimate(stayed, at_risk, seed)
                               : Estimate{0.0, 0.0, 0, seed, 0.0};
        out.conditional_at_tracked.push_back(row);
    }
    return out;
}

VisitRateStats degree_one_visit_stats(const Graph& g, long long m, long runs,
                                      std::uint64_t seed) {
    if (m <= 0) throw std::invalid_argument("degree_one_visit_stats: m must be positive");
    if (runs <= 0) throw std::invalid_argument("degree_one_visit_stats: runs must be positive");
    auto comps = components_and_giant(g);
    if (comps.giant_size() < 2)
        throw std::invalid_argument("degree_one_visit_stats: giant has no edges to walk on");

    long long d_G = 0;
    int min_deg = g.n;
    long long deg1 = 0;
    std::vector<char> in_A(static_cast<std::size_t>(g.n), 0);
    std::vector<int> half_edges;
    for (int v : comps.giant_vertices) {
        int d = g.degree(v);
        d_G += d;
        min_deg = std::min(min_deg, d);
        if (d == 1) {
            in_A[static_cast<std::size_t>(v)] = 1;
            ++deg1;
        }
        for (int i = 0; i < d; ++i) half_edges.push_back(v);
    }

    VisitRateStats out;
    out.m = m;
    out.runs = runs;
    out.pi_A = static_cast<double>(deg1) / static_cast<double>(d_G);
    out.pi_min = static_cast<double>(min_deg) / static_cast<double>(d_G);
    SpectralResult sg = spectral_gap(g, comps.giant_vertices);
    out.gamma_lower = std::max(0.0, sg.lower);

    const double half_band = 0.5 * out.pi_A * static_cast<double>(m);
    std::vector<double> rates;
    rates.reserve(static_cast<std::size_t>(runs));
    for (long run = 0; run < runs; ++run) {
        auto engine = make_rng(seed, replica_stream(static_cast<std::uint64_t>(run)));
        std::uniform_int_distribution<std::size_t> hpick(0, half_edges.size() - 1);
        int x = half_edges[hpick(engine)];
        long long hits = 0;
        for (long long step = 0; step < m; ++step) {
            const auto& nbrs = g.adj[static_cast<std::size_t>(x)];
            std::uniform_int_distribution<std::size_t> npick(0, nbrs.size() - 1);
            x = nbrs[npick(engine)];
            hits += in_A[static_cast<std::size_t>(x)];
        }
        rates.push_back(static_cast<double>(hits) / static_cast<double>(m));
        if (std::abs(static_cast<double>(hits) - out.pi_A * static_cast<double>(m)) >= half_band)
            ++out.failures;
    }
    out.rate = mean_estimate(rates, seed);
    out.failure_bound = gillman_bound(out.pi_min, out.gamma_lower, out.pi_A, m, half_band);
    return out;
}

}  // namespace dynperc
