#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "ht/distribution.hpp"

namespace ht {

enum class Regime { linear, sublinear, polynomial, vacuous, weak_detection };

std::string_view to_string(Regime r);

struct NamedValue {
    std::string name;
    double value = 0.0;
};

/**
 * Formula-based sample complexity.
 *
 * `lower` and `upper` are certified: every inequality behind them is proven
 * with explicit constants. `point` is the geometric mean of the two, rounded
 * up. Diagnostics carry the regime's characterizing expression and the
 * intermediate divergence values. kUnbounded marks a zero divergence.
 */
struct ComplexityEstimate {
    std::uint64_t lower = 0;
    std::uint64_t upper = 0;
    std::uint64_t point = 0;
    Regime regime = Regime::vacuous;
    std::string formula_trace;
    std::vector<NamedValue> diagnostics;
    std::vector<std::string> warnings;

    /// Value of a named diagnostic; throws std::out_of_range if absent.
    [[nodiscard]] double diagnostic(std::string_view name) const;
};

struct BoundPair {
    std::uint64_t lower = 0;
    std::uint64_t upper = 0;
};

/// lambda = 0.5 log 2 / log(1/alpha), which is 0.5 at alpha = 1/2.
double default_lambda(double alpha);

/// Regime of (alpha, delta): vacuous for delta >= alpha, weak_detection for delta in (alpha/4, alpha),
/// then linear on (alpha/100, alpha/4], sublinear on (alpha^2, alpha/100], polynomial below.
Regime bayes_regime(double alpha, double delta);

/// Bayesian estimate for prior alpha in (0, 1/2] and delta in (0, alpha/4]; delta >= alpha is vacuous.
ComplexityEstimate n_star_bayes_estimate(const Distribution& p, const Distribution& q, double alpha, double delta);

/// Prior-free estimate for type-I alpha_t1 and type-II beta_t2, both in (0, 1/8]. Bounds come from the
/// Bayesian problems at prior beta/(alpha+beta) with errors 2ab/(a+b) (lower) and ab/(a+b) (upper),
/// relabelled so the prior on the first argument is min(a, b)/(a + b).
ComplexityEstimate n_star_pf_estimate(const Distribution& p, const Distribution& q, double alpha_t1, double beta_t2);

/// Weak detection: target delta = alpha (1 - gamma), gamma in (0, 1).
ComplexityEstimate weak_detection_bounds(const Distribution& p, const Distribution& q, double alpha, double gamma);

/// Fano lower bound ceil((a g log((1-a)/a) + a^2 g^2) / JS_a) and Chernoff upper bound
/// ceil((lam log((1-a)/a) + log(1/(1-g))) / H_{1-lam}) at delta = a (1 - g).
BoundPair general_bayes_bounds(const Distribution& p, const Distribution& q, double alpha, double gamma, double lambda);

/// Total variation between the n-fold products of N(mu1, 1) and N(mu2, 1): 2 Phi(sqrt(n) |mu1 - mu2| / 2) - 1.
double gaussian_tv(double mu1, double mu2, std::uint64_t n);

/// ceil(sqrt(lower * upper)) clamped to [lower, upper].
std::uint64_t geometric_point(std::uint64_t lower, std::uint64_t upper);

}  // namespace ht
