#pragma once

#include <string>
#include <string_view>

#include "ht/distribution.hpp"

namespace ht {

// JSON form: {"labels": ["a", "b"], "probs": [0.25, 0.75]}. Numeric labels are
// accepted and converted to their decimal text.
// CSV form: one "label,prob" record per line; blank lines and lines starting
// with '#' are skipped. Doubles are written in shortest round-trip form.

std::string to_json(const Distribution& d);
Distribution distribution_from_json(std::string_view text);

std::string to_csv(const Distribution& d);
Distribution distribution_from_csv(std::string_view text);

/// Reads a distribution file, choosing the format by extension (.csv, otherwise JSON).
Distribution load_distribution(const std::string& path);

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

}  // namespace ht
