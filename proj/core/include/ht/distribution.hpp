#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ht {

/**
 * Finite probability vector over an ordered, labelled support.
 *
 * Construction validates the input: entries must be finite and nonnegative,
 * labels unique, and the total mass within 1e-9 of one. Accepted inputs are
 * renormalized so the stored mass is 1 up to rounding.
 */
class Distribution {
public:
    /// Mass deviation from 1 that is silently renormalized.
    static constexpr double kNormalizationSlack = 1e-9;

    Distribution() = default;

    /// Labels default to "0", "1", ... when omitted.
    explicit Distribution(std::vector<double> probs, std::vector<std::string> labels = {});

    /// Two-point distribution (1 - bias, bias) on labels {"0", "1"}.
    static Distribution bernoulli(double bias);

    /// Uniform distribution on k symbols.
    static Distribution uniform(std::size_t k);

    [[nodiscard]] std::size_t size() const noexcept { return probs_.size(); }
    [[nodiscard]] double operator[](std::size_t i) const { return probs_[i]; }
    [[nodiscard]] std::span<const double> probs() const noexcept { return probs_; }
    [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }

    /// Push forward through a deterministic map symbol -> cell, with `cells` output symbols.
    [[nodiscard]] Distribution coarsen(std::span<const std::size_t> cell_of, std::size_t cells) const;

private:
    std::vector<double> probs_;
    std::vector<std::string> labels_;
};

/// Product distribution on the pair support, row-major in (a, b); labels joined by ",".
Distribution product(const Distribution& a, const Distribution& b);

/// n-fold product; power(p, 0) is the point mass on the empty sequence.
Distribution power(const Distribution& p, std::size_t n);

/// Throws StructuralError when the supports differ in length.
void require_same_support(const Distribution& p, const Distribution& q);

}  // namespace ht
