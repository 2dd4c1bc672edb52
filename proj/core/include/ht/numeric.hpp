#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace ht {

/// Sample-count sentinel for "no finite n" (zero divergence, or search cap exceeded).
inline constexpr std::uint64_t kUnbounded = std::numeric_limits<std::uint64_t>::max();

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }
    [[nodiscard]] double value() const noexcept { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Ceiling of a nonnegative real as a sample count; +inf and overflow map to kUnbounded.
inline std::uint64_t ceil_count(double x) noexcept {
    if (!(x > 0.0)) return 0;
    if (!std::isfinite(x) || x >= 1.8e19) return kUnbounded;
    return static_cast<std::uint64_t>(std::ceil(x));
}

}  // namespace ht
