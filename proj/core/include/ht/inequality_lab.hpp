#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "ht/distribution.hpp"

namespace ht {

// Numerical checks of the inequality
//     JS_alpha(p, q) <= (32 e^{2 lambda log(1/alpha)} alpha / lambda) H_{1-lambda}(p, q)
// and its supporting facts. Grid evidence only: floating-point evaluation, not interval arithmetic.

/// A pair Ber(p_bias), Ber(q_bias) with the prior alpha and the exponent lambda of H_{1-lambda}.
struct BernoulliPair {
    double p_bias = 0.0;
    double q_bias = 0.0;
    double alpha = 0.5;
    double lambda = 0.5;
};

/// A Bernoulli law stored as both masses, so biases near 1 keep an exact complement.
struct BernoulliMass {
    double one = 0.0;   // P(X = 1)
    double zero = 1.0;  // P(X = 0)
};

/// Uniform biases i/(resolution-1) plus `corner_points` log-spaced values in [corner_min, 1e-2] and their mirrors.
std::vector<BernoulliMass> bernoulli_grid(std::size_t resolution, std::size_t corner_points, double corner_min);

/// alpha in {2^-1, ..., 2^-count}.
std::vector<double> dyadic_alphas(int count);

/// The constant 32 e^{2 lambda log(1/alpha)} alpha / lambda.
double js_h_constant(double alpha, double lambda);

double js_bernoulli(BernoulliMass p, BernoulliMass q, double alpha);
/// H_{1-lambda}(Ber p, Ber q).
double h_bar_bernoulli(BernoulliMass p, BernoulliMass q, double lambda);

struct InequalityGrid {
    std::size_t resolution = 400;
    std::size_t corner_points = 40;
    double corner_min = 1e-12;
    std::vector<double> alphas = dyadic_alphas(20);
    /// lambda per alpha; empty means 0.5 log 2 / log(1/alpha).
    std::vector<double> lambdas;
    double tolerance = 1e-12;
    unsigned threads = 1;
};

struct AlphaSummary {
    double alpha = 0.0;
    double lambda = 0.0;
    std::uint64_t violations = 0;
    double max_ratio = 0.0;
};

struct InequalityReport {
    std::uint64_t points = 0;
    std::uint64_t violations = 0;
    /// max over the grid of LHS - RHS (negative when the inequality holds everywhere with room).
    double max_violation = 0.0;
    /// max of LHS / RHS over points with RHS > 0
    double max_ratio = 0.0;
    BernoulliPair worst;
    /// Points where ceil(3/16 a log(1/a)/JS) <= ceil(2/H) <= ceil(256/log 2 a log(1/a)/JS) fails.
    std::uint64_t chain_violations = 0;
    std::uint64_t chain_points = 0;
    std::vector<AlphaSummary> per_alpha;
};

InequalityReport check_js_h_inequality(const InequalityGrid& grid);

/// d/dq and d^2/dq^2 of JS_alpha(Ber p, Ber q) and H_{1-lambda}(Ber p, Ber q).
double js_dq(double p, double q, double alpha);
double js_d2q(double p, double q, double alpha);
double h_bar_dq(double p, double q, double lambda);
double h_bar_d2q(double p, double q, double lambda);

struct DerivativeReport {
    double js_d1 = 0.0, js_d1_fd = 0.0;
    double js_d2 = 0.0, js_d2_fd = 0.0;
    double h_d1 = 0.0, h_d1_fd = 0.0;
    double h_d2 = 0.0, h_d2_fd = 0.0;
    /// Largest |analytic - fd| / max(|analytic|, |fd|) over the four derivatives (absolute below 1e-11).
    double max_rel_error = 0.0;
    bool ok = true;
};

/// Compares the analytic derivatives in q with five-point central differences in extended precision.
/// q must satisfy 2 step < q < 1 - 2 step.
DerivativeReport derivative_check(const BernoulliPair& pair, double step = 1e-5, double rel_tol = 1e-6);

struct HessianGrid {
    std::size_t p_points = 101;   // over [0, 1/2]
    std::size_t q_points = 400;   // interior, plus log-spaced corners
    std::vector<double> alphas = dyadic_alphas(20);
    /// Extra lambda values in (0, 1/2] checked besides the default 0.5 log 2 / log(1/alpha).
    std::vector<double> extra_lambdas{0.05, 0.25, 0.5};
};

struct RegionReport {
    std::string region;
    std::uint64_t points = 0;
    std::uint64_t violations = 0;
    /// min over the region of (RHS - LHS) / RHS
    double worst_relative_slack = 1.0;
};

struct HessianReport {
    RegionReport low;   // q <= p <= 1/2
    RegionReport high;  // q >= 1/2
    RegionReport mid;   // p <= q <= 1/2
    /// Points where relabelling (p, q) -> (1 - p, 1 - q) changes a second derivative beyond 1e-9 relative.
    std::uint64_t symmetry_mismatches = 0;
    [[nodiscard]] std::uint64_t violations() const { return low.violations + high.violations + mid.violations; }
};

/// d^2 JS / dq^2 <= (32 e^{2r} alpha / lambda) d^2 H_{1-lambda} / dq^2 with r = lambda log(1/alpha).
HessianReport check_hessian_inequality(const HessianGrid& grid);

struct ConvexityReport {
    std::uint64_t points = 0;
    std::uint64_t violations = 0;
    /// most negative normalized second difference observed
    double min_second_difference = 0.0;
};

/// Second differences of 32 h(q) - j(q), h = (alpha e^{2r}/r) log(1/alpha) H_{1-lambda}, j = JS_alpha, on q grids.
ConvexityReport check_convexity(const HessianGrid& grid, std::size_t dense_q = 2000);

struct ClaimReport {
    std::uint64_t points = 0;
    std::uint64_t violations = 0;
    /// max of LHS / RHS
    double max_ratio = 0.0;
    /// Bounds of the two proof branches evaluated at x = 1/alpha.
    double small_x_branch_at_pivot = 0.0;
    double large_x_branch_at_pivot = 0.0;
};

/// Log-spaced grid of `count` points in [lo, hi].
std::vector<double> log_grid(double lo, double hi, std::size_t count);

/// 1 + x/(1 + alpha x) <= e^{2r} (1 + x)^{1 - lambda_star} with r = lambda_star log(1/alpha), on x_grid plus x = 0 and
/// x = 1/alpha.
ClaimReport check_linear_vs_nearly_linear(std::span<const double> x_grid, double alpha, double lambda_star);

struct JointRangeInstance {
    Distribution p;
    Distribution q;
    double alpha = 0.5;
};

/// Random pairs with support sizes in [3, max_k] and alpha drawn from the dyadic set.
std::vector<JointRangeInstance> random_joint_range_instances(std::size_t count, std::size_t max_k, std::uint64_t seed);

struct JointRangeReport {
    std::uint64_t instances = 0;
    std::uint64_t violations = 0;
    double max_ratio = 0.0;
    /// Binary coarsenings that increased a divergence or broke the inequality.
    std::uint64_t coarsening_violations = 0;
};

/// The inequality on general finite pairs, plus a binary coarsening of each pair.
JointRangeReport joint_range_transfer_check(std::span<const JointRangeInstance> instances);

struct SlopeSeries {
    std::vector<double> gammas;
    std::vector<std::uint64_t> n_star;
    /// least-squares slope of log n* against log gamma
    double slope = 0.0;
};

struct ClosedFormPoint {
    double alpha = 0.0;
    double gamma = 0.0;
    double epsilon = 0.0;
    std::uint64_t closed_form = 0;
    std::uint64_t oracle = 0;
};

struct WeakDetectionReport {
    SlopeSeries gaussian;
    SlopeSeries bernoulli;
    /// max |TV from the exact oracle - (1 - (1 - eps)^n)| over the checked n
    double bernoulli_tv_error = 0.0;
    std::vector<ClosedFormPoint> closed_form;
    [[nodiscard]] std::size_t closed_form_matches() const;
};

struct WeakDetectionConfig {
    double gaussian_separation = 2e-5;
    double bernoulli_epsilon = 1e-5;
    double gamma_lo = 1.0 / 1024.0;
    double gamma_hi = 1.0 / 16.0;
    std::size_t gamma_points = 25;
};

/// Slopes for the Gaussian and Ber(1)/Ber(1-eps) families and the Ber(0)/Ber(eps) closed form on 20 points.
WeakDetectionReport weak_detection_examples(const WeakDetectionConfig& cfg = {});

/// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace ht
