#pragma once

#include <cstdint>
#include <string>

#include "ht/distribution.hpp"
#include "ht/exact_oracle.hpp"

namespace ht {

enum class ReductionDirection { success_amplification, error_amplification };

/// Parameters of a T-fold self-reduction.
struct ReductionPlan {
    std::uint64_t T = 1;
    double alpha_prime = 0.0;
    double delta_prime = 0.0;
    ReductionDirection direction = ReductionDirection::success_amplification;
};

/**
 * T = floor(log(alpha/delta) / log 8), alpha' = alpha^(1/T), delta' = delta^(1/T).
 *
 * For alpha < 1/8 the input must satisfy alpha^2 < delta < alpha/8. For
 * alpha >= 1/8 that interval is empty, and any delta < alpha/8 is accepted
 * whose plan satisfies alpha' <= 1/2 and delta'/alpha' in [1/64, 1/8].
 */
ReductionPlan plan_self_reduction(double alpha, double delta);

struct BoostBound {
    /// tau^(T/32)
    double bound = 0.0;
    /// P(Bin(T, tau) >= ceil(T/2)): at least half the buckets wrong, ties counted as failures.
    double majority_failure = 0.0;
};

/// Majority-of-T boosting for a base test with error tau <= 1/4.
BoostBound boost_error_bound(double tau, std::uint64_t T);

/// P(Bin(T, tau) >= k), summed from the upper tail.
double binomial_upper_tail(std::uint64_t T, double tau, std::uint64_t k);

/// Exact check of P(Bin(T, num/den) >= ceil(T/2)) <= (num/den)^(T/32), compared as
/// tail^32 <= tau^T in integer arithmetic.
bool boost_bound_holds_exact(std::uint64_t num, std::uint64_t den, std::uint64_t T);

struct ErrorAmplificationCheck {
    std::int64_t lhs = 0;
    std::int64_t rhs = 0;
    bool holds = true;
    bool skipped = false;
    std::string note;
};

/// n*_PF(alpha, beta) >= T (n*_PF((2 alpha)^(1/T), (2 beta)^(1/T)) - 1), both sides from the exact oracle.
/// Skipped (holds = true, skipped = true) when an amplified level exceeds 1/4.
ErrorAmplificationCheck verify_error_amplification(const Distribution& p, const Distribution& q, double alpha,
                                                   double beta, std::uint64_t T,
                                                   std::uint64_t n_cap = kDefaultSampleCap);

struct SuccessAmplificationCheck {
    std::int64_t lhs = 0;
    std::int64_t rhs = 0;
    /// lhs / (T rhs)
    double ratio = 0.0;
};

/// Compares n*_PF(alpha, beta) with T n*_PF(alpha^(1/T), beta^(1/T)); needs alpha^(1/T), beta^(1/T) <= 1/4.
SuccessAmplificationCheck verify_success_amplification(const Distribution& p, const Distribution& q, double alpha,
                                                       double beta, std::uint64_t T,
                                                       std::uint64_t n_cap = kDefaultSampleCap);

struct PriorFreeSandwich {
    std::uint64_t bayes_lower = 0;  // n*_B(b/(a+b), 2ab/(a+b))
    std::uint64_t prior_free = 0;   // n*_PF(a, b)
    std::uint64_t bayes_upper = 0;  // n*_B(b/(a+b), ab/(a+b))
    bool holds = true;
};

/// Exact oracle values on both sides of the Bayesian / prior-free sandwich.
PriorFreeSandwich verify_prior_free_sandwich(const Distribution& p, const Distribution& q, double alpha, double beta,
                                             std::uint64_t n_cap = kDefaultSampleCap);

struct StabilityCheck {
    std::uint64_t n1 = 0;
    std::uint64_t n2 = 0;
    /// n1 / n2
    double ratio = 0.0;
    /// max(1, log(alpha1/delta1) / log(alpha2/delta2), log(1/delta1) / log(1/delta2))
    double bound_expression = 0.0;
    /// ratio / bound_expression: the constant this instance needs.
    double fitted_constant = 0.0;
};

/// Exact n*_B at (alpha1, delta1) and (alpha2, delta2) against the mild-change expression.
StabilityCheck prior_change_stability(const Distribution& p, const Distribution& q, double alpha1, double delta1,
                                      double alpha2, double delta2, std::uint64_t n_cap = kDefaultSampleCap);

}  // namespace ht
