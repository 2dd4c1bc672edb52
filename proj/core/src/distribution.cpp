#include "ht/distribution.hpp"

#include <cmath>
#include <string>
#include <unordered_set>
#include <utility>

#include "ht/errors.hpp"
#include "ht/numeric.hpp"

namespace ht {

Distribution::Distribution(std::vector<double> probs, std::vector<std::string> labels)
    : probs_(std::move(probs)), labels_(std::move(labels)) {
    if (probs_.empty()) throw StructuralError("distribution has empty support");
    if (labels_.empty()) {
        labels_.reserve(probs_.size());
        for (std::size_t i = 0; i < probs_.size(); ++i) labels_.push_back(std::to_string(i));
    }
    if (labels_.size() != probs_.size()) {
        throw StructuralError("distribution has " + std::to_string(probs_.size()) + " probabilities but " +
                              std::to_string(labels_.size()) + " labels");
    }
    std::unordered_set<std::string> seen;
    for (const auto& l : labels_) {
        if (!seen.insert(l).second) throw StructuralError("duplicate support label '" + l + "'");
    }
    CompensatedSum total;
    for (double x : probs_) {
        if (!std::isfinite(x) || x < 0.0) throw DomainError("probabilities must be finite and nonnegative");
        total += x;
    }
    const double mass = total.value();
    if (std::fabs(mass - 1.0) > kNormalizationSlack) {
        throw DomainError("total mass " + std::to_string(mass) + " deviates from 1 by more than 1e-9");
    }
    // Sums already within rounding of 1 are kept as given so serialized values round-trip bit for bit.
    if (std::fabs(mass - 1.0) > 1e-14) {
        for (double& x : probs_) x /= mass;
    }
}

Distribution Distribution::bernoulli(double bias) {
    if (!(bias >= 0.0 && bias <= 1.0)) throw DomainError("Bernoulli bias must lie in [0, 1]");
    return Distribution({1.0 - bias, bias}, {"0", "1"});
}

Distribution Distribution::uniform(std::size_t k) {
    if (k == 0) throw StructuralError("uniform distribution needs k >= 1");
    return Distribution(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

Distribution Distribution::coarsen(std::span<const std::size_t> cell_of, std::size_t cells) const {
    if (cell_of.size() != size()) throw StructuralError("coarsening map length differs from support size");
    if (cells == 0) throw StructuralError("coarsening needs at least one cell");
    std::vector<CompensatedSum> acc(cells);
    for (std::size_t i = 0; i < size(); ++i) {
        if (cell_of[i] >= cells) throw StructuralError("coarsening map sends a symbol outside the cell range");
        acc[cell_of[i]] += probs_[i];
    }
    std::vector<double> out(cells);
    for (std::size_t c = 0; c < cells; ++c) out[c] = acc[c].value();
    return Distribution(std::move(out));
}

Distribution product(const Distribution& a, const Distribution& b) {
    std::vector<double> probs;
    std::vector<std::string> labels;
    probs.reserve(a.size() * b.size());
    labels.reserve(a.size() * b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            probs.push_back(a[i] * b[j]);
            const auto& la = a.labels()[i];
            labels.push_back(la.empty() ? b.labels()[j] : la + "," + b.labels()[j]);
        }
    }
    return Distribution(std::move(probs), std::move(labels));
}

Distribution power(const Distribution& p, std::size_t n) {
    Distribution out({1.0}, {""});
    for (std::size_t i = 0; i < n; ++i) out = product(out, p);
    return out;
}

void require_same_support(const Distribution& p, const Distribution& q) {
    if (p.size() != q.size()) {
        throw StructuralError("supports differ in size (" + std::to_string(p.size()) + " vs " +
                              std::to_string(q.size()) + ")");
    }
}

}  // namespace ht
