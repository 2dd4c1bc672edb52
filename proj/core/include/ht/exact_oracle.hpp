#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "ht/distribution.hpp"

namespace ht {

/// One value of the n-sample log-likelihood ratio log(p(x^n)/q(x^n)) with its mass under each hypothesis.
/// `llr` is +inf exactly when q_mass == 0 and -inf exactly when p_mass == 0.
struct LlrAtom {
    double llr = 0.0;
    double p_mass = 0.0;
    double q_mass = 0.0;
};

enum class TableStrategy { type_classes, convolution };

/// Exact law of the n-sample LLR under p and under q, atoms sorted by increasing llr.
struct LlrAtomTable {
    std::size_t n = 0;
    TableStrategy strategy = TableStrategy::type_classes;
    std::vector<LlrAtom> atoms;
};

struct OracleLimits {
    /// Largest number of type classes C(n+k-1, k-1) enumerated exactly.
    std::uint64_t max_type_classes = 2'000'000;
    /// Largest atom count the convolution path may hold after merging.
    std::size_t max_atoms = 2'000'000;
    /// Atoms whose llr differ by at most this much are merged on the convolution path.
    double merge_tolerance = 1e-9;
};

/// Number of type classes C(n+k-1, k-1), saturating at UINT64_MAX.
std::uint64_t type_class_count(std::size_t k, std::size_t n);

/// Enumerates type classes when feasible, else convolves single-sample tables; throws CapacityError if neither fits.
LlrAtomTable build_llr_table(const Distribution& p, const Distribution& q, std::size_t n, const OracleLimits& limits = {});

/// Forces one strategy (used to cross-check the two paths).
LlrAtomTable build_llr_table_with(const Distribution& p, const Distribution& q, std::size_t n, TableStrategy strategy,
                                  const OracleLimits& limits = {});

/// Minimum Bayes error alpha * P_p(err) + (1 - alpha) * P_q(err) with n samples; n = 0 gives min(alpha, 1 - alpha).
double bayes_error_exact(const Distribution& p, const Distribution& q, double alpha, std::size_t n,
                         const OracleLimits& limits = {});
double bayes_error(const LlrAtomTable& table, double alpha);

/// Minimum type-II error (accepting p under q) subject to type-I error (rejecting p under p) <= alpha_t1,
/// with randomization on the boundary atom.
double np_curve_point(const Distribution& p, const Distribution& q, std::size_t n, double alpha_t1,
                      const OracleLimits& limits = {});
double np_curve_point(const LlrAtomTable& table, double alpha_t1);

/// I(Theta; X^n) for Theta ~ Ber(alpha) choosing p; equals JS_alpha between the product laws.
double mutual_info_product(const Distribution& p, const Distribution& q, double alpha, std::size_t n,
                           const OracleLimits& limits = {});

enum class InstanceKind { bayesian, prior_free };

/// A testing problem: Bayesian (prior alpha on p, target error delta) or prior-free (type-I alpha, type-II beta).
struct TestingInstance {
    Distribution p;
    Distribution q;
    InstanceKind kind = InstanceKind::bayesian;
    double alpha = 0.5;
    double delta = 0.0;
    double beta = 0.0;

    /// alpha in (0, 1), delta > 0.
    static TestingInstance bayesian(Distribution p, Distribution q, double alpha, double delta);
    /// Both errors in (0, 1).
    static TestingInstance prior_free(Distribution p, Distribution q, double type1, double type2);
};

struct TracePoint {
    std::uint64_t n = 0;
    double error = 0.0;
};

struct NStarResult {
    /// Empty when the target is not met by the cap.
    std::optional<std::uint64_t> n_star;
    /// Every n evaluated by the search, sorted by n.
    std::vector<TracePoint> trace;

    [[nodiscard]] bool exceeds_cap() const noexcept { return !n_star.has_value(); }
};

inline constexpr std::uint64_t kDefaultSampleCap = 100'000;

/// Relative slack in the comparison error <= target, absorbing last-digit rounding.
inline constexpr double kTargetSlack = 1e-12;

/// Smallest n whose Bayes error is <= delta (doubling, then bisection; relies on monotonicity in n).
NStarResult n_star_bayes_exact(const TestingInstance& inst, std::uint64_t n_cap = kDefaultSampleCap,
                               const OracleLimits& limits = {});

/// Smallest n whose optimal type-II error at type-I <= alpha is <= beta.
NStarResult n_star_pf_exact(const TestingInstance& inst, std::uint64_t n_cap = kDefaultSampleCap,
                            const OracleLimits& limits = {});

}  // namespace ht
