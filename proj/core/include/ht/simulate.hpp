#pragma once

#include <cstdint>
#include <optional>

#include "ht/distribution.hpp"

namespace ht {

struct SimConfig {
    std::uint64_t trials = 10000;
    std::uint64_t seed = 0;
    /// LLR threshold; defaults to log((1 - alpha)/alpha). Sums within 1e-9 of it count as ties and decide q.
    std::optional<double> threshold;
    unsigned threads = 1;
};

struct SimResult {
    double err_hat = 0.0;
    /// Clopper-Pearson 95% interval
    double ci_lo = 0.0;
    double ci_hi = 1.0;
    std::uint64_t errors = 0;
    std::uint64_t trials = 0;
    [[nodiscard]] bool contains(double v) const { return ci_lo <= v && v <= ci_hi; }
};

/// Counter-based SplitMix64: draw i of stream (seed, trial) is a pure function of the three values.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept;
    std::uint64_t next() noexcept;
    /// uniform in [0, 1) with 53 random bits
    double uniform() noexcept;

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Exact two-sided 95% interval for `errors` out of `trials`.
SimResult binomial_estimate(std::uint64_t errors, std::uint64_t trials);

/// Bayes error of the likelihood-ratio test: the truth is p with probability alpha, then n samples are drawn.
SimResult simulate_lrt(const Distribution& p, const Distribution& q, double alpha, std::uint64_t n, const SimConfig& cfg);

/// Conditional errors of the n-sample likelihood-ratio test, from the exact oracle.
struct LrtErrors {
    double type_one = 0.0;  // decide q under p
    double type_two = 0.0;  // decide p under q
};
LrtErrors lrt_errors_exact(const Distribution& p, const Distribution& q, double alpha, std::uint64_t n,
                           std::optional<double> threshold = std::nullopt);

struct BoostedResult {
    SimResult sim;
    std::uint64_t bucket_size = 0;
    LrtErrors bucket_errors;
    /// exact Bayes error of the T-bucket majority vote
    double exact_error = 0.0;
    /// tau^(T/32) with tau the larger bucket error
    double bound = 0.0;
};

/// Majority vote over T buckets of ceil(n/T) samples; p wins only with more than T/2 votes.
/// Throws DomainError when a bucket error exceeds 1/4.
BoostedResult simulate_boosted(const Distribution& p, const Distribution& q, double alpha, std::uint64_t n,
                               std::uint64_t T, const SimConfig& cfg);

}  // namespace ht
