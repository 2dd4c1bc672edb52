#include "ht/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ht/errors.hpp"
#include "ht/numeric.hpp"

namespace ht {
namespace {

constexpr double kSeriesRadius = 0.05;

// phi(t) = t log t - t + 1 >= 0, accurate near t = 1.
double phi(double t) {
    if (t == 0.0) return 1.0;
    const double u = t - 1.0;
    if (std::fabs(u) < kSeriesRadius) {
        // sum_{k>=2} (-1)^k u^k / (k (k-1))
        double term = u * u;
        double sum = 0.0;
        for (int k = 2; k < 40; ++k) {
            const double add = term / (static_cast<double>(k) * (k - 1));
            sum += add;
            if (std::fabs(add) <= 1e-18 * std::fabs(sum)) break;
            term *= -u;
        }
        return sum;
    }
    return std::max(0.0, t * std::log(t) - u);
}

// psi(t) = lambda t + (1 - lambda) - t^lambda >= 0, accurate near t = 1.
double psi(double t, double lambda) {
    const double u = t - 1.0;
    if (std::fabs(u) < kSeriesRadius) {
        // t^lambda = sum_k C(lambda, k) u^k, so psi = -sum_{k>=2} C(lambda, k) u^k.
        double binom = lambda * (lambda - 1.0) / 2.0;
        double power = u * u;
        double sum = 0.0;
        for (int k = 2; k < 60; ++k) {
            const double add = binom * power;
            sum -= add;
            if (std::fabs(add) <= 1e-18 * std::fabs(sum)) break;
            binom *= (lambda - k) / (k + 1.0);
            power *= u;
        }
        return std::max(0.0, sum);
    }
    return std::max(0.0, lambda * u - std::expm1(lambda * std::log(t)));
}

void check_open_unit(double x, const char* name) {
    if (!(x > 0.0 && x < 1.0)) throw DomainError(std::string(name) + " must lie in (0, 1)");
}

}  // namespace

namespace kernel {

double h_lambda_term(double p, double q, double lambda) {
    if (p == 0.0) return (1.0 - lambda) * q;
    if (q == 0.0) return lambda * p;
    return q * psi(p / q, lambda);
}

double js_alpha_term(double p, double q, double alpha) {
    const double m = alpha * p + (1.0 - alpha) * q;
    if (m == 0.0) return 0.0;
    return m * (alpha * phi(p / m) + (1.0 - alpha) * phi(q / m));
}

double total_variation(std::span<const double> p, std::span<const double> q) {
    CompensatedSum s;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::fabs(p[i] - q[i]);
    return std::clamp(0.5 * s.value(), 0.0, 1.0);
}

double hellinger_sq(std::span<const double> p, std::span<const double> q) {
    CompensatedSum s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double d = std::sqrt(p[i]) - std::sqrt(q[i]);
        s += d * d;
    }
    return std::clamp(0.5 * s.value(), 0.0, 1.0);
}

double kl(std::span<const double> p, std::span<const double> q) {
    // sum q phi(p/q) equals sum p log(p/q) because the masses agree.
    CompensatedSum s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] == 0.0) {
            s += q[i];
            continue;
        }
        if (q[i] == 0.0) return kInf;
        s += q[i] * phi(p[i] / q[i]);
    }
    return std::max(0.0, s.value());
}

double h_lambda(std::span<const double> p, std::span<const double> q, double lambda) {
    CompensatedSum s;
    for (std::size_t i = 0; i < p.size(); ++i) s += h_lambda_term(p[i], q[i], lambda);
    return std::clamp(s.value(), 0.0, 1.0);
}

double js_alpha(std::span<const double> p, std::span<const double> q, double alpha) {
    CompensatedSum s;
    for (std::size_t i = 0; i < p.size(); ++i) s += js_alpha_term(p[i], q[i], alpha);
    return std::max(0.0, s.value());
}

double e_gamma(std::span<const double> p, std::span<const double> q, double gamma) {
    CompensatedSum s;
    for (std::size_t i = 0; i < p.size(); ++i) s += std::max(0.0, p[i] - gamma * q[i]);
    return std::clamp(s.value(), 0.0, 1.0);
}

}  // namespace kernel

ClassicDivergences classic_divergences(const Distribution& p, const Distribution& q) {
    require_same_support(p, q);
    return {kernel::total_variation(p.probs(), q.probs()), kernel::hellinger_sq(p.probs(), q.probs()),
            kernel::kl(p.probs(), q.probs())};
}

double h_lambda(const Distribution& p, const Distribution& q, double lambda) {
    require_same_support(p, q);
    check_open_unit(lambda, "lambda");
    return kernel::h_lambda(p.probs(), q.probs(), lambda);
}

double js_alpha(const Distribution& p, const Distribution& q, double alpha) {
    require_same_support(p, q);
    check_open_unit(alpha, "alpha");
    return kernel::js_alpha(p.probs(), q.probs(), alpha);
}

double e_gamma(const Distribution& p, const Distribution& q, double gamma) {
    require_same_support(p, q);
    if (!(gamma >= 1.0)) throw DomainError("E_gamma needs gamma >= 1");
    return kernel::e_gamma(p.probs(), q.probs(), gamma);
}

double kl(const Distribution& p, const Distribution& q) {
    require_same_support(p, q);
    return kernel::kl(p.probs(), q.probs());
}

double entropy(const Distribution& p) {
    CompensatedSum s;
    for (double x : p.probs()) {
        if (x > 0.0) s += -x * std::log(x);
    }
    return std::max(0.0, s.value());
}

double mutual_info_binary(const Distribution& p, const Distribution& q, double alpha) {
    require_same_support(p, q);
    check_open_unit(alpha, "alpha");
    const double beta = 1.0 - alpha;
    CompensatedSum s;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = alpha * p[i] + beta * q[i];
        if (m > 0.0) s += -m * std::log(m);
        if (p[i] > 0.0) s += alpha * p[i] * std::log(p[i]);
        if (q[i] > 0.0) s += beta * q[i] * std::log(q[i]);
    }
    return std::max(0.0, s.value());
}

double tensorize_h_lambda(double h_val, std::size_t n) {
    if (!(h_val >= 0.0 && h_val <= 1.0)) throw DomainError("H_lambda value must lie in [0, 1]");
    if (n == 0 || h_val == 0.0) return 0.0;
    if (h_val == 1.0) return 1.0;
    return -std::expm1(static_cast<double>(n) * std::log1p(-h_val));
}

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw DomainError("binary entropy argument must lie in [0, 1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log(x) - (1.0 - x) * std::log1p(-x);
}

}  // namespace ht
