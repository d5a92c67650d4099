#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>

#include "dynperc/environment.hpp"
#include "dynperc/structure.hpp"

namespace dynperc {

struct WalkerState {
    int position = 0;
    int id = 0;
};

enum class EventKind { edge_refresh, walker_ring };

struct Event {
    double time = 0.0;
    EventKind kind = EventKind::edge_refresh;
    int a = 0;  // refresh: u      ring: walker index
    int b = 0;  // refresh: v      ring: target vertex
    int c = 0;  // refresh: state  ring: moved flag
};

struct EventLog {
    std::vector<Event> events;

    std::string to_csv() const;  // columns time,event_kind,arg1,arg2,arg3
    static EventLog from_csv(std::istream& in);
};

// One environment, any number of walkers, one engine. Event randomness is
// consumed in a fixed order (holding time, classification, event payload), so
// (seed, Params, mode) determine the log exactly.
struct System {
    Params params;
    Environment env;
    std::vector<WalkerState> walkers;
    std::mt19937_64 rng;

    System(const Params& p, InitMode mode, std::mt19937_64 engine,
           const std::vector<std::pair<int, int>>* edges = nullptr)
        : params(p), env(Environment::init(p, mode, engine, edges)), rng(engine) {}

    void add_walker(int position);

    // Component ids of the current snapshot, recomputed when the environment's
    // structural version moved.
    const ComponentsResult& components();
    bool in_giant(int v);

  private:
    std::optional<ComponentsResult> comps_cache_;
    std::uint64_t comps_version_ = ~std::uint64_t{0};
};

// Merged-Poisson race: one exponential at rate mu*N + #walkers per event; a
// uniform edge resamples Bernoulli(p) (even if unchanged) with probability
// mu*N/total, else a uniform walker rings at a uniform target != position and
// moves iff that edge is open. Identical in law to independent per-edge and
// per-walker clocks. Simultaneous events have probability zero; replay ties
// break refresh-first.
void advance(System& sys, double t_end, EventLog* log = nullptr);

struct Predicate {
    enum class Kind {
        walker_isolated,
        both_isolated,
        walker_in_giant,
        walker_out_of_giant,
        environments_equal,
        custom
    };
    Kind kind = Kind::walker_isolated;
    int walker = 0;                        // walker_* kinds
    const Environment* other = nullptr;    // environments_equal compares against this
    std::function<bool(System&)> custom_fn;

    static Predicate walker_isolated(int i) { return {Kind::walker_isolated, i, nullptr, {}}; }
    static Predicate both_isolated() { return {Kind::both_isolated, 0, nullptr, {}}; }
    static Predicate walker_in_giant(int i) { return {Kind::walker_in_giant, i, nullptr, {}}; }
    static Predicate walker_out_of_giant(int i) { return {Kind::walker_out_of_giant, i, nullptr, {}}; }
    static Predicate environments_equal(const Environment& o) {
        return {Kind::environments_equal, 0, &o, {}};
    }
    static Predicate custom(std::function<bool(System&)> fn) {
        return {Kind::custom, 0, nullptr, std::move(fn)};
    }

    bool evaluate(System& sys) const;
    void validate(const System& sys) const;  // arity / argument checks
};

struct RunResult {
    double stop_time = 0.0;
    bool censored = false;
};

// First event time at which the predicate holds (0 if it already does),
// censored at t_cap. The predicate is checked after every event.
RunResult run_until(System& sys, const Predicate& pred, double t_cap, EventLog* log = nullptr);

// Re-applies a log to a copy of the initial system; returns the final state.
// Used to verify replay determinism.
System replay(System initial, const EventLog& log);

}  // namespace dynperc
