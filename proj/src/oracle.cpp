#include "dynperc/oracle.hpp"

#include <bit>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "dynperc/stats.hpp"

namespace dynperc {

GeneratorSpec make_generator(const Params& params) {
    params.validate();
    if (params.n > 5) throw std::invalid_argument("oracle: n > 5 rejected (state blowup)");
    GeneratorSpec spec;
    spec.params = params;
    spec.N = static_cast<int>(params.N());
    spec.states = static_cast<long>(params.n) << spec.N;
    return spec;
}

std::vector<double> point_distribution(const GeneratorSpec& spec, int x, unsigned mask) {
    if (x < 0 || x >= spec.params.n || mask >= (1u << spec.N))
        throw std::invalid_argument("point_distribution: state out of range");
    std::vector<double> v(spec.states, 0.0);
    v[spec.index(x, mask)] = 1.0;
    return v;
}

namespace {

// One uniformized step: out = in * (I + Q/Lambda), distributions as row vectors.
void apply_step(const GeneratorSpec& spec, double lambda_u, const std::vector<double>& in,
                std::vector<double>& out) {
    const int n = spec.params.n;
    const int N = spec.N;
    const double p = spec.params.p();
    const double mu = spec.params.mu;
    const double walk_rate = 1.0 / static_cast<double>(n - 1);
    out.assign(spec.states, 0.0);
    for (long s = 0; s < spec.states; ++s) {
        double w = in[s];
        if (w == 0.0) continue;
        int x = spec.walker_of(s);
        unsigned mask = spec.mask_of(s);
        double out_rate = 0.0;
        for (int e = 0; e < N; ++e) {
            bool open = (mask >> e) & 1u;
            double rate = mu * (open ? 1.0 - p : p);  // rate of an actual flip
            if (rate == 0.0) continue;
            out_rate += rate;
            out[spec.index(x, mask ^ (1u << e))] += w * rate / lambda_u;
        }
        for (int v = 0; v < n; ++v) {
            if (v == x) continue;
            if ((mask >> edge_index(x, v, n)) & 1u) {
                out_rate += walk_rate;
                out[spec.index(v, mask)] += w * walk_rate / lambda_u;
            }
        }
        assert(out_rate <= lambda_u * (1.0 + 1e-12));
        out[s] += w * (1.0 - out_rate / lambda_u);
    }
}

}  // namespace

std::vector<double> transient_distribution(const GeneratorSpec& spec,
                                           const std::vector<double>& initial, double t) {
    if (static_cast<long>(initial.size()) != spec.states)
        throw std::invalid_argument("transient_distribution: initial size mismatch");
    if (t < 0.0) throw std::invalid_argument("transient_distribution: negative time");
    const double lambda_u = spec.params.mu * static_cast<double>(spec.N) + 1.0;
    const double lt = lambda_u * t;

    std::vector<double> result(spec.states, 0.0);
    std::vector<double> nu = initial, next(spec.states);
    double cum = 0.0;
    long k_max = static_cast<long>(lt + 40.0 * std::sqrt(lt + 1.0) + 100.0);
    for (long k = 0; k <= k_max; ++k) {
        double w = std::exp(log_poisson_pmf(k, lt));
        if (w > 0.0) {
            for (long s = 0; s < spec.states; ++s) result[s] += w * nu[s];
            cum += w;
        }
        if (cum >= 1.0 - 1e-12 && static_cast<double>(k) >= lt) break;
        apply_step(spec, lambda_u, nu, next);
        nu.swap(next);
    }
    // Renormalization is NOT applied; the truncation bound keeps the defect
    // below 1e-12 and tests assert the sum directly.
    double total = 0.0;
    for (double v : result) total += v;
    assert(std::fabs(total - 1.0) <= 1e-9);
    (void)total;
    return result;
}

std::vector<double> stationary_distribution(const GeneratorSpec& spec) {
    const int n = spec.params.n;
    const double p = spec.params.p();
    std::vector<double> pi(spec.states);
    for (unsigned mask = 0; mask < (1u << spec.N); ++mask) {
        int ones = std::popcount(mask);
        double env_p = std::pow(p, ones) * std::pow(1.0 - p, spec.N - ones);
        for (int x = 0; x < n; ++x) pi[spec.index(x, mask)] = env_p / static_cast<double>(n);
    }
    return pi;
}

double tv_distance(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("tv_distance: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::fabs(a[i] - b[i]);
    return 0.5 * s;
}

double stationarity_residual_of(const GeneratorSpec& spec, const std::vector<double>& pi) {
    if (static_cast<long>(pi.size()) != spec.states)
        throw std::invalid_argument("stationarity_residual_of: size mismatch");
    const int n = spec.params.n;
    const int N = spec.N;
    const double p = spec.params.p();
    const double mu = spec.params.mu;
    const double walk_rate = 1.0 / static_cast<double>(n - 1);
    std::vector<double> res(spec.states, 0.0);
    for (long s = 0; s < spec.states; ++s) {
        int x = spec.walker_of(s);
        unsigned mask = spec.mask_of(s);
        double out_rate = 0.0;
        for (int e = 0; e < N; ++e) {
            bool open = (mask >> e) & 1u;
            double rate = mu * (open ? 1.0 - p : p);
            if (rate == 0.0) continue;
            out_rate += rate;
            res[spec.index(x, mask ^ (1u << e))] += pi[s] * rate;
        }
        for (int v = 0; v < n; ++v) {
            if (v == x) continue;
            if ((mask >> edge_index(x, v, n)) & 1u) {
                out_rate += walk_rate;
                res[spec.index(v, mask)] += pi[s] * walk_rate;
            }
        }
        res[s] -= pi[s] * out_rate;
    }
    double worst = 0.0;
    for (double r : res) worst = std::max(worst, std::fabs(r));
    return worst;
}

ResidualReport stationarity_residual(const GeneratorSpec& spec) {
    auto pi = stationary_distribution(spec);
    ResidualReport rep;
    rep.max_residual = stationarity_residual_of(spec, pi);

    const int n = spec.params.n;
    const int N = spec.N;
    const double p = spec.params.p();
    const double mu = spec.params.mu;
    const double walk_rate = 1.0 / static_cast<double>(n - 1);
    for (long s = 0; s < spec.states; ++s) {
        int x = spec.walker_of(s);
        unsigned mask = spec.mask_of(s);
        for (int e = 0; e < N; ++e) {
            bool open = (mask >> e) & 1u;
            double fwd = mu * (open ? 1.0 - p : p);
            double bwd = mu * (open ? p : 1.0 - p);  // flipping back
            long s2 = spec.index(x, mask ^ (1u << e));
            rep.max_detailed_balance =
                std::max(rep.max_detailed_balance, std::fabs(pi[s] * fwd - pi[s2] * bwd));
        }
        for (int v = 0; v < n; ++v) {
            if (v == x) continue;
            if ((mask >> edge_index(x, v, n)) & 1u) {
                long s2 = spec.index(v, mask);
                // reverse move v -> x runs along the same open edge at the same rate
                rep.max_detailed_balance = std::max(
                    rep.max_detailed_balance, std::fabs(pi[s] * walk_rate - pi[s2] * walk_rate));
            }
        }
    }
    return rep;
}

namespace {

double log_binom_count_pmf(long long k, long long N, double q, double log_q, double log_1q,
                           double log_choose) {
    if (q <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (q >= 1.0) return k == N ? 0.0 : -std::numeric_limits<double>::infinity();
    return log_choose + static_cast<double>(k) * log_q + static_cast<double>(N - k) * log_1q;
}

}  // namespace

double exact_env_tv(long long N, double p, double a) {
    if (p < 0.0 || p > 1.0 || a < 0.0 || a > 1.0)
        throw std::invalid_argument("exact_env_tv: probabilities outside [0,1]");
    if (N < 0 || N > 1000000) throw std::invalid_argument("exact_env_tv: N outside [0, 1e6]");
    double log_a = a > 0.0 ? std::log(a) : 0.0;
    double log_1a = a < 1.0 ? std::log1p(-a) : 0.0;
    double log_p = p > 0.0 ? std::log(p) : 0.0;
    double log_1p = p < 1.0 ? std::log1p(-p) : 0.0;
    double log_choose = 0.0;  // log C(N,0)
    double pos = 0.0;         // TV = sum of the positive part of (pmf_a - pmf_p)
    for (long long k = 0; k <= N; ++k) {
        if (k > 0)
            log_choose += std::log(static_cast<double>(N - k + 1) / static_cast<double>(k));
        double pa = std::exp(log_binom_count_pmf(k, N, a, log_a, log_1a, log_choose));
        double pp = std::exp(log_binom_count_pmf(k, N, p, log_p, log_1p, log_choose));
        if (pa > pp) pos += pa - pp;
    }
    return pos;
}

EnvTvEvent env_tv_event_set(long long N, double p, double a) {
    if (!(a > p)) throw std::invalid_argument("env_tv_event_set: requires a > p");
    if (N <= 0 || N > 1000000) throw std::invalid_argument("env_tv_event_set: N outside (0, 1e6]");
    double log_a = std::log(a);
    double log_1a = a < 1.0 ? std::log1p(-a) : 0.0;
    double log_p = p > 0.0 ? std::log(p) : 0.0;
    double log_1p = std::log1p(-p);
    double log_choose = 0.0;
    EnvTvEvent ev;
    ev.k_star = -1;
    for (long long k = 0; k <= N; ++k) {
        if (k > 0)
            log_choose += std::log(static_cast<double>(N - k + 1) / static_cast<double>(k));
        double la = log_binom_count_pmf(k, N, a, log_a, log_1a, log_choose);
        double lp = log_binom_count_pmf(k, N, p, log_p, log_1p, log_choose);
        double pa = std::exp(la), pp = std::exp(lp);
        // The likelihood ratio (a/p)^k ((1-a)/(1-p))^(N-k) is strictly
        // increasing in k, so {pmf_a > pmf_p} is the upper tail {k >= k_star}.
        if (pa > pp) {
            if (ev.k_star < 0) ev.k_star = k;
            ev.tv += pa - pp;
        }
    }
    return ev;
}

}  // namespace dynperc
