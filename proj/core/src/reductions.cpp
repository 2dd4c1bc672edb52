#include "ht/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <boost/math/special_functions/beta.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "ht/errors.hpp"

namespace ht {
namespace {

using boost::multiprecision::cpp_int;

std::uint64_t pf_exact(const Distribution& p, const Distribution& q, double a, double b, std::uint64_t n_cap) {
    const auto r = n_star_pf_exact(TestingInstance::prior_free(p, q, a, b), n_cap);
    if (r.exceeds_cap()) throw CapacityError("prior-free sample complexity exceeds the cap of " + std::to_string(n_cap));
    return *r.n_star;
}

std::uint64_t bayes_exact(const Distribution& p, const Distribution& q, double a, double d, std::uint64_t n_cap) {
    const auto r = n_star_bayes_exact(TestingInstance::bayesian(p, q, a, d), n_cap);
    if (r.exceeds_cap()) throw CapacityError("Bayesian sample complexity exceeds the cap of " + std::to_string(n_cap));
    return *r.n_star;
}

cpp_int ipow(const cpp_int& base, std::uint64_t e) {
    cpp_int result = 1;
    cpp_int b = base;
    while (e > 0) {
        if (e & 1U) result *= b;
        e >>= 1U;
        if (e > 0) b *= b;
    }
    return result;
}

}  // namespace

ReductionPlan plan_self_reduction(double alpha, double delta) {
    if (!(alpha > 0.0 && alpha <= 0.5)) throw DomainError("alpha must lie in (0, 1/2]");
    if (!(delta > 0.0 && delta < alpha / 8.0)) throw DomainError("self-reduction needs delta in (0, alpha/8)");
    if (alpha < 0.125 && delta <= alpha * alpha) {
        throw DomainError("delta <= alpha^2 is the polynomial regime; no self-reduction applies");
    }
    ReductionPlan plan;
    plan.T = static_cast<std::uint64_t>(std::floor(std::log(alpha / delta) / std::log(8.0)));
    const double T = static_cast<double>(plan.T);
    plan.alpha_prime = std::pow(alpha, 1.0 / T);
    plan.delta_prime = std::pow(delta, 1.0 / T);
    plan.direction = ReductionDirection::success_amplification;
    const double ratio = plan.delta_prime / plan.alpha_prime;
    constexpr double slack = 1e-12;
    if (plan.alpha_prime > 0.5 + slack) {
        throw DomainError("reduced prior alpha^(1/T) = " + std::to_string(plan.alpha_prime) + " exceeds 1/2");
    }
    if (ratio < 1.0 / 64.0 - slack || ratio > 1.0 / 8.0 + slack) {
        throw DomainError("reduced error ratio " + std::to_string(ratio) + " leaves [1/64, 1/8]");
    }
    return plan;
}

double binomial_upper_tail(std::uint64_t T, double tau, std::uint64_t k) {
    if (k == 0) return 1.0;
    if (k > T) return 0.0;
    if (tau <= 0.0) return 0.0;
    if (tau >= 1.0) return 1.0;
    // P(Bin(T, tau) >= k) = I_tau(k, T - k + 1)
    return boost::math::ibeta(static_cast<double>(k), static_cast<double>(T - k + 1), tau);
}

BoostBound boost_error_bound(double tau, std::uint64_t T) {
    if (!(tau >= 0.0 && tau <= 0.25)) throw DomainError("boosting needs base error tau in [0, 1/4]");
    if (T == 0) throw DomainError("boosting needs T >= 1");
    BoostBound b;
    b.bound = std::pow(tau, static_cast<double>(T) / 32.0);
    b.majority_failure = binomial_upper_tail(T, tau, (T + 1) / 2);
    return b;
}

bool boost_bound_holds_exact(std::uint64_t num, std::uint64_t den, std::uint64_t T) {
    if (den == 0 || num > den) throw DomainError("tau = num/den must lie in [0, 1]");
    if (T == 0) throw DomainError("boosting needs T >= 1");
    const std::uint64_t m = (T + 1) / 2;
    const cpp_int a = num;
    const cpp_int b = den - num;
    // N = sum_{j >= m} C(T, j) a^j b^(T - j), so the tail is N / den^T.
    cpp_int tail_num = 0;
    cpp_int binom = 1;  // C(T, j)
    std::vector<cpp_int> a_pow(T + 1), b_pow(T + 1);
    a_pow[0] = 1;
    b_pow[0] = 1;
    for (std::uint64_t j = 1; j <= T; ++j) {
        a_pow[j] = a_pow[j - 1] * a;
        b_pow[j] = b_pow[j - 1] * b;
    }
    for (std::uint64_t j = 0; j <= T; ++j) {
        if (j >= m) tail_num += binom * a_pow[j] * b_pow[T - j];
        binom = binom * (T - j) / (j + 1);
    }
    // tail <= tau^(T/32)  <=>  N^32 <= num^T den^(31 T)
    const cpp_int lhs = ipow(tail_num, 32);
    const cpp_int rhs = a_pow[T] * ipow(cpp_int(den), 31 * T);
    return lhs <= rhs;
}

ErrorAmplificationCheck verify_error_amplification(const Distribution& p, const Distribution& q, double alpha,
                                                   double beta, std::uint64_t T, std::uint64_t n_cap) {
    if (T == 0) throw DomainError("T must be >= 1");
    ErrorAmplificationCheck c;
    const double a2 = std::pow(2.0 * alpha, 1.0 / static_cast<double>(T));
    const double b2 = std::pow(2.0 * beta, 1.0 / static_cast<double>(T));
    if (a2 > 0.25 || b2 > 0.25) {
        c.skipped = true;
        c.note = "amplified levels (2 alpha)^(1/T), (2 beta)^(1/T) exceed 1/4";
        return c;
    }
    c.lhs = static_cast<std::int64_t>(pf_exact(p, q, alpha, beta, n_cap));
    const auto inner = static_cast<std::int64_t>(pf_exact(p, q, a2, b2, n_cap));
    c.rhs = static_cast<std::int64_t>(T) * (inner - 1);
    c.holds = c.lhs >= c.rhs;
    return c;
}

SuccessAmplificationCheck verify_success_amplification(const Distribution& p, const Distribution& q, double alpha,
                                                       double beta, std::uint64_t T, std::uint64_t n_cap) {
    if (T == 0) throw DomainError("T must be >= 1");
    const double a1 = std::pow(alpha, 1.0 / static_cast<double>(T));
    const double b1 = std::pow(beta, 1.0 / static_cast<double>(T));
    if (a1 > 0.25 || b1 > 0.25) throw DomainError("success amplification needs alpha^(1/T), beta^(1/T) <= 1/4");
    SuccessAmplificationCheck c;
    c.lhs = static_cast<std::int64_t>(pf_exact(p, q, alpha, beta, n_cap));
    c.rhs = static_cast<std::int64_t>(pf_exact(p, q, a1, b1, n_cap));
    c.ratio = c.rhs > 0 ? static_cast<double>(c.lhs) / (static_cast<double>(T) * static_cast<double>(c.rhs))
                        : std::numeric_limits<double>::infinity();
    return c;
}

PriorFreeSandwich verify_prior_free_sandwich(const Distribution& p, const Distribution& q, double alpha, double beta,
                                             std::uint64_t n_cap) {
    const double prior = beta / (alpha + beta);
    const double d = alpha * beta / (alpha + beta);
    PriorFreeSandwich s;
    s.bayes_lower = bayes_exact(p, q, prior, 2.0 * d, n_cap);
    s.prior_free = pf_exact(p, q, alpha, beta, n_cap);
    s.bayes_upper = bayes_exact(p, q, prior, d, n_cap);
    s.holds = s.bayes_lower <= s.prior_free && s.prior_free <= s.bayes_upper;
    return s;
}

StabilityCheck prior_change_stability(const Distribution& p, const Distribution& q, double alpha1, double delta1,
                                      double alpha2, double delta2, std::uint64_t n_cap) {
    StabilityCheck c;
    c.n1 = bayes_exact(p, q, alpha1, delta1, n_cap);
    c.n2 = bayes_exact(p, q, alpha2, delta2, n_cap);
    c.ratio = static_cast<double>(c.n1) / static_cast<double>(c.n2);
    c.bound_expression = std::max({1.0, std::log(alpha1 / delta1) / std::log(alpha2 / delta2),
                                   std::log(1.0 / delta1) / std::log(1.0 / delta2)});
    c.fitted_constant = c.ratio / c.bound_expression;
    return c;
}

}  // namespace ht
