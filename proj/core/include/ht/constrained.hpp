#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ht/distribution.hpp"
#include "ht/exact_oracle.hpp"

namespace ht {

/// Row-stochastic matrix: rows are input symbols, columns output symbols.
struct Channel {
    std::vector<std::vector<double>> matrix;
    std::optional<double> epsilon_ldp;

    [[nodiscard]] std::size_t inputs() const noexcept { return matrix.size(); }
    [[nodiscard]] std::size_t outputs() const noexcept { return matrix.empty() ? 0 : matrix.front().size(); }
    /// Throws StructuralError on ragged rows, DomainError on negative entries or rows not summing to 1 (1e-12).
    void validate() const;
};

/// Output law of `p` pushed through `ch`.
Distribution push_forward(const Channel& ch, const Distribution& p);

/// Objective maximized by a quantizer: H_lambda or JS_alpha of the output pair.
struct Objective {
    enum class Kind { h_lambda, js_alpha };
    Kind kind = Kind::h_lambda;
    double param = 0.5;

    static Objective hellinger(double lambda) { return {Kind::h_lambda, lambda}; }
    static Objective jensen_shannon(double alpha) { return {Kind::js_alpha, alpha}; }

    /// Contribution of one output symbol with masses (p, q).
    [[nodiscard]] double term(double p, double q) const;
    [[nodiscard]] double operator()(const Distribution& p, const Distribution& q) const;
    [[nodiscard]] std::string name() const;
};

struct Quantizer {
    /// cell_of[x] is the output symbol for input x
    std::vector<std::size_t> cell_of;
    std::size_t outputs = 0;
    double objective = 0.0;
    [[nodiscard]] Channel channel() const;
};

/// Best deterministic quantizer with at most `outputs` cells, each cell a contiguous run of the
/// LLR-sorted support. Uses min(outputs, |X|) nonempty cells numbered in LLR order; ties go to the
/// lexicographically smallest cell boundaries. outputs > |X| pads with unused outputs.
Quantizer optimal_quantizer_dp(const Distribution& p, const Distribution& q, std::size_t outputs, const Objective& obj);

struct ConstrainedReport {
    std::optional<std::uint64_t> n_star;
    std::optional<std::uint64_t> n_quantized;
    std::string objective_used;
    double ratio = 0.0;
    /// max(1, log(n*/alpha)/D) and the sharper max(1, log(n*)/D)
    double factor_alpha = 0.0;
    double factor_plain = 0.0;
    /// n* max(1, log(n*/alpha)/D)
    double ceiling = 0.0;
    bool data_processing_holds = true;
};

/// Exact n* for the pair and for the better of its H- and JS-optimal quantizers at D outputs.
ConstrainedReport constrained_complexity_check(const Distribution& p, const Distribution& q, double alpha, double delta,
                                               std::size_t outputs, std::uint64_t n_cap = kDefaultSampleCap);

/// max_x P(y|x) <= e^epsilon min_x P(y|x) + 1e-12 for every output y. Infinite epsilon is always feasible.
bool ldp_feasible(const Channel& ch, double epsilon);

struct LdpSearchResult {
    Channel channel;
    double objective = 0.0;
    /// best value on the 1/64 grid before refinement
    double grid_objective = 0.0;
};

/// Approximate best epsilon-LDP channel with two outputs for |X| <= 4: 1/64 grid, coordinate refinement down to
/// step 2^-20, then the two-level randomized-response channels as extra candidates.
LdpSearchResult ldp_brute_optimize(const Distribution& p, const Distribution& q, double epsilon, std::size_t outputs,
                                   const Objective& obj);

struct LfdPair {
    Distribution p_prime;
    Distribution q_prime;
    double epsilon = 0.0;
    /// likelihood-ratio clip thresholds (p/q), clip_lo < 1 < clip_hi
    double clip_lo = 0.0;
    double clip_hi = 0.0;
    double tv_p = 0.0;
    double tv_q = 0.0;
};

/// Huber least-favorable pair for TV contamination of radius epsilon; requires 0 < epsilon < TV(p, q)/2.
LfdPair huber_lfd(const Distribution& p, const Distribution& q, double epsilon);

}  // namespace ht
