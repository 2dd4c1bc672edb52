#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "ht/distribution.hpp"
#include "ht/errors.hpp"

namespace ht {
namespace {

TEST(Distribution, RenormalizesSmallDeviation) {
    const Distribution d({0.5, 0.5 + 5e-10});
    double s = 0.0;
    for (double x : d.probs()) s += x;
    EXPECT_NEAR(s, 1.0, 1e-15);
}

TEST(Distribution, RejectsLargeDeviation) { EXPECT_THROW(Distribution({0.5, 0.6}), DomainError); }

TEST(Distribution, RejectsNegativeAndNonFinite) {
    EXPECT_THROW(Distribution({-0.1, 1.1}), DomainError);
    EXPECT_THROW(Distribution({std::numeric_limits<double>::quiet_NaN(), 1.0}), Error);
}

TEST(Distribution, RejectsBadLabels) {
    EXPECT_THROW(Distribution({0.5, 0.5}, {"a", "a"}), StructuralError);
    EXPECT_THROW(Distribution({0.5, 0.5}, {"a"}), StructuralError);
    EXPECT_THROW(Distribution(std::vector<double>{}), StructuralError);
}

TEST(Distribution, BernoulliPutsBiasOnOne) {
    const auto b = Distribution::bernoulli(0.2);
    ASSERT_EQ(b.size(), 2u);
    EXPECT_DOUBLE_EQ(b[0], 0.8);
    EXPECT_DOUBLE_EQ(b[1], 0.2);
    EXPECT_EQ(b.labels()[1], "1");
}

TEST(Distribution, CoarsenSumsCells) {
    const Distribution d({0.1, 0.2, 0.3, 0.4});
    const std::vector<std::size_t> cell{1, 0, 1, 0};
    const auto c = d.coarsen(cell, 2);
    EXPECT_NEAR(c[0], 0.6, 1e-15);
    EXPECT_NEAR(c[1], 0.4, 1e-15);
}

TEST(Distribution, ProductAndPower) {
    const auto b = Distribution::bernoulli(0.3);
    const auto pp = product(b, b);
    ASSERT_EQ(pp.size(), 4u);
    EXPECT_NEAR(pp[3], 0.09, 1e-15);
    EXPECT_EQ(pp.labels()[1], "0,1");
    EXPECT_EQ(power(b, 0).size(), 1u);
    EXPECT_EQ(power(b, 3).size(), 8u);
}

TEST(Distribution, SupportMismatchIsStructural) {
    EXPECT_THROW(require_same_support(Distribution::uniform(2), Distribution::uniform(3)), StructuralError);
}

}  // namespace
}  // namespace ht
