#include "dynperc/simulation.hpp"

#include <cassert>
#include <istream>
#include <sstream>
#include <stdexcept>

#include "dynperc/csvio.hpp"

namespace dynperc {

void System::add_walker(int position) {
    if (position < 0 || position >= params.n)
        throw std::invalid_argument("add_walker: position out of range");
    walkers.push_back({position, static_cast<int>(walkers.size())});
}

const ComponentsResult& System::components() {
    if (!comps_cache_ || comps_version_ != env.version()) {
        comps_cache_ = components_and_giant(env.snapshot());
        comps_version_ = env.version();
    }
    return *comps_cache_;
}

bool System::in_giant(int v) {
    const auto& c = components();
    return c.comp[v] == c.giant_id;
}

namespace {

// Draws and applies one event; returns false (clock advanced to t_limit, no
// event) when the holding time overshoots.
bool one_event(System& sys, double t_limit, EventLog* log) {
    const double mu_total = sys.params.mu * static_cast<double>(sys.params.N());
    const double total = mu_total + static_cast<double>(sys.walkers.size());
    double now = sys.env.clock();
    if (total <= 0.0) {
        sys.env.set_clock(t_limit);
        return false;
    }
    std::exponential_distribution<double> exp_dist(total);
    double dt = exp_dist(sys.rng);
    if (now + dt > t_limit) {
        sys.env.set_clock(t_limit);
        return false;
    }
    now += dt;
    sys.env.set_clock(now);

    std::uniform_real_distribution<double> u01(0.0, 1.0);
    bool refresh = u01(sys.rng) * total < mu_total;
    if (refresh) {
        std::uniform_int_distribution<long long> pick(0, sys.params.N() - 1);
        auto [i, j] = edge_from_index(pick(sys.rng), sys.params.n);
        bool open = u01(sys.rng) < sys.params.p();
        sys.env.set_edge(i, j, open);
        if (log) log->events.push_back({now, EventKind::edge_refresh, i, j, open ? 1 : 0});
    } else {
        std::uniform_int_distribution<int> wpick(0, static_cast<int>(sys.walkers.size()) - 1);
        int w = wpick(sys.rng);
        int pos = sys.walkers[w].position;
        std::uniform_int_distribution<int> tpick(0, sys.params.n - 2);
        int t = tpick(sys.rng);
        int v = t >= pos ? t + 1 : t;
        bool moved = sys.env.is_open(pos, v);
        if (moved) sys.walkers[w].position = v;
        if (log) log->events.push_back({now, EventKind::walker_ring, w, v, moved ? 1 : 0});
    }
    return true;
}

}  // namespace

void advance(System& sys, double t_end, EventLog* log) {
    sys.params.validate();
    if (t_end < sys.env.clock()) throw std::invalid_argument("advance: t_end before current clock");
    while (one_event(sys, t_end, log)) {
    }
}

void Predicate::validate(const System& sys) const {
    switch (kind) {
        case Kind::walker_isolated:
        case Kind::walker_in_giant:
        case Kind::walker_out_of_giant:
            if (walker < 0 || walker >= static_cast<int>(sys.walkers.size()))
                throw std::invalid_argument("predicate arity mismatch: walker index out of range");
            break;
        case Kind::both_isolated:
            if (sys.walkers.size() != 2)
                throw std::invalid_argument("predicate arity mismatch: both_isolated needs two walkers");
            break;
        case Kind::environments_equal:
            if (!other)
                throw std::invalid_argument("environments_equal predicate needs a reference environment");
            break;
        case Kind::custom:
            if (!custom_fn) throw std::invalid_argument("custom predicate missing function");
            break;
    }
}

bool Predicate::evaluate(System& sys) const {
    switch (kind) {
        case Kind::walker_isolated:
            return sys.env.degree(sys.walkers[walker].position) == 0;
        case Kind::both_isolated:
            return sys.env.degree(sys.walkers[0].position) == 0 &&
                   sys.env.degree(sys.walkers[1].position) == 0;
        case Kind::walker_in_giant:
            return sys.in_giant(sys.walkers[walker].position);
        case Kind::walker_out_of_giant:
            return !sys.in_giant(sys.walkers[walker].position);
        case Kind::environments_equal:
            return sys.env == *other;
        case Kind::custom:
            return custom_fn(sys);
    }
    return false;
}

RunResult run_until(System& sys, const Predicate& pred, double t_cap, EventLog* log) {
    sys.params.validate();
    pred.validate(sys);
    if (t_cap < sys.env.clock()) throw std::invalid_argument("run_until: t_cap before current clock");
    if (pred.evaluate(sys)) return {sys.env.clock(), false};
    while (one_event(sys, t_cap, log)) {
        if (pred.evaluate(sys)) return {sys.env.clock(), false};
    }
    return {t_cap, true};
}

System replay(System initial, const EventLog& log) {
    for (const auto& e : log.events) {
        assert(e.time >= initial.env.clock());
        initial.env.set_clock(e.time);
        if (e.kind == EventKind::edge_refresh) {
            initial.env.set_edge(e.a, e.b, e.c != 0);
        } else {
            assert(initial.env.is_open(initial.walkers[e.a].position, e.b) == (e.c != 0));
            if (e.c) initial.walkers[e.a].position = e.b;
        }
    }
    return initial;
}

std::string EventLog::to_csv() const {
    std::string out = "time,event_kind,arg1,arg2,arg3\n";
    for (const auto& e : events) {
        out += format_double(e.time);
        out += e.kind == EventKind::edge_refresh ? ",edge_refresh," : ",walker_ring,";
        out += std::to_string(e.a);
        out += ',';
        out += std::to_string(e.b);
        out += ',';
        out += std::to_string(e.c);
        out += '\n';
    }
    return out;
}

EventLog EventLog::from_csv(std::istream& in) {
    EventLog log;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;   // metadata
        if (line.rfind("time,", 0) == 0) continue;      // header
        std::istringstream ls(line);
        std::string time_s, kind_s, a_s, b_s, c_s;
        std::getline(ls, time_s, ',');
        std::getline(ls, kind_s, ',');
        std::getline(ls, a_s, ',');
        std::getline(ls, b_s, ',');
        std::getline(ls, c_s, ',');
        Event e;
        e.time = std::stod(time_s);
        if (kind_s == "edge_refresh")
            e.kind = EventKind::edge_refresh;
        else if (kind_s == "walker_ring")
            e.kind = EventKind::walker_ring;
        else
            throw std::invalid_argument("EventLog::from_csv: unknown event kind " + kind_s);
        e.a = std::stoi(a_s);
        e.b = std::stoi(b_s);
        e.c = std::stoi(c_s);
        log.events.push_back(e);
    }
    return log;
}

}  // namespace dynperc
