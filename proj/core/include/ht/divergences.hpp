#pragma once

#include <cstddef>
#include <span>

#include "ht/distribution.hpp"

namespace ht {

// All logarithms are natural. Zero-mass conventions: 0 * f(0/0) = 0 in every
// kernel, 0^lambda * x = 0, and KL(p, q) = +inf as soon as p_i > 0 = q_i.
//
// Hellinger normalization: h^2(p, q) = 0.5 * sum (sqrt(p_i) - sqrt(q_i))^2
// = 1 - sum sqrt(p_i q_i), which is H_{1/2}(p, q). Note the factor 1/2: some
// texts define the squared Hellinger distance without it.

struct ClassicDivergences {
    double tv = 0.0;
    double hellinger_sq = 0.0;
    double kl_pq = 0.0;
};

ClassicDivergences classic_divergences(const Distribution& p, const Distribution& q);

/// H_lambda(p, q) = 1 - sum p_i^lambda q_i^(1-lambda), lambda in (0, 1).
double h_lambda(const Distribution& p, const Distribution& q, double lambda);

/// Skewed Jensen-Shannon divergence alpha KL(p, m) + (1-alpha) KL(q, m), m = alpha p + (1-alpha) q.
double js_alpha(const Distribution& p, const Distribution& q, double alpha);

/// Hockey-stick divergence sum (p_i - gamma q_i)_+, gamma >= 1.
double e_gamma(const Distribution& p, const Distribution& q, double gamma);

/// I(Theta; X) for Theta ~ Ber(alpha) choosing p, via H(m) - alpha H(p) - (1-alpha) H(q).
double mutual_info_binary(const Distribution& p, const Distribution& q, double alpha);

double kl(const Distribution& p, const Distribution& q);

/// Shannon entropy in nats.
double entropy(const Distribution& p);

/// H_lambda of the n-fold product given the single-sample value: 1 - (1 - h)^n.
double tensorize_h_lambda(double h_val, std::size_t n);

/// Entropy of Ber(x) in nats.
double binary_entropy(double x);

/// Span kernels without validation, for hot loops. Inputs must have equal length.
namespace kernel {
double total_variation(std::span<const double> p, std::span<const double> q);
double hellinger_sq(std::span<const double> p, std::span<const double> q);
double kl(std::span<const double> p, std::span<const double> q);
double h_lambda(std::span<const double> p, std::span<const double> q, double lambda);
double js_alpha(std::span<const double> p, std::span<const double> q, double alpha);
double e_gamma(std::span<const double> p, std::span<const double> q, double gamma);

/// Single-symbol contribution q * psi(p/q) >= 0 of H_lambda.
double h_lambda_term(double p, double q, double lambda);
/// Single-symbol contribution >= 0 of JS_alpha.
double js_alpha_term(double p, double q, double alpha);
}  // namespace kernel

}  // namespace ht
