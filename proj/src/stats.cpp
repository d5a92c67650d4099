#include "dynperc/stats.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace dynperc {

Estimate mean_estimate(const std::vector<double>& xs, std::uint64_t seed) {
    Estimate e;
    e.replicas = static_cast<long>(xs.size());
    e.master_seed = seed;
    if (xs.empty()) return e;
    double s = 0.0;
    for (double x : xs) s += x;
    e.value = s / static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - e.value) * (x - e.value);
        e.std_error = std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0) / static_cast<double>(xs.size()));
    }
    return e;
}

Estimate proportion_estimate(long hits, long total, std::uint64_t seed) {
    Estimate e;
    e.replicas = total;
    e.master_seed = seed;
    if (total <= 0) return e;
    double p = static_cast<double>(hits) / static_cast<double>(total);
    e.value = p;
    e.std_error = std::sqrt(p * (1.0 - p) / static_cast<double>(total));
    return e;
}

namespace {

// Series expansion of P(a,x), valid for x < a+1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 10000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::fabs(del) < std::fabs(sum) * 1e-15)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Continued fraction for Q(a,x), valid for x >= a+1 (modified Lentz).
double gamma_q_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_p(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_p: need a > 0, x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cf(a, x);
}

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_q: need a > 0, x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_sf(double x, int dof) {
    if (dof <= 0) throw std::invalid_argument("chi_square_sf: dof must be positive");
    if (x <= 0.0) return 1.0;
    return gamma_q(0.5 * dof, 0.5 * x);
}

double chi_square_pvalue(const std::vector<long>& observed, const std::vector<double>& expected_probs) {
    if (observed.size() != expected_probs.size())
        throw std::invalid_argument("chi_square_pvalue: size mismatch");
    long total = 0;
    for (long o : observed) total += o;
    if (total <= 0) throw std::invalid_argument("chi_square_pvalue: no observations");
    double stat = 0.0;
    int dof = -1;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        double exp_count = expected_probs[i] * static_cast<double>(total);
        if (exp_count <= 0.0) {
            if (observed[i] != 0)
                throw std::invalid_argument("chi_square_pvalue: observation in zero-probability cell");
            continue;
        }
        double d = static_cast<double>(observed[i]) - exp_count;
        stat += d * d / exp_count;
        ++dof;
    }
    if (dof <= 0) return 1.0;
    return chi_square_sf(stat, dof);
}

double log_factorial(long k) {
    assert(k >= 0);
    return std::lgamma(static_cast<double>(k) + 1.0);
}

double log_binomial_pmf(long k, long n, double p) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    if (p <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return k == n ? 0.0 : -std::numeric_limits<double>::infinity();
    double lc = log_factorial(n) - log_factorial(k) - log_factorial(n - k);
    return lc + static_cast<double>(k) * std::log(p) + static_cast<double>(n - k) * std::log1p(-p);
}

double log_poisson_pmf(long k, double lambda) {
    if (k < 0) return -std::numeric_limits<double>::infinity();
    if (lambda <= 0.0) return k == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
    return -lambda + static_cast<double>(k) * std::log(lambda) - log_factorial(k);
}

}  // namespace dynperc
