#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "brute_force.hpp"
#include "ht/divergences.hpp"
#include "ht/errors.hpp"

namespace ht {
namespace {

using testing::random_distribution;

const double kLn2 = std::log(2.0);

TEST(ClassicDivergences, IdenticalPairIsZero) {
    const Distribution p({0.2, 0.3, 0.5});
    const auto c = classic_divergences(p, p);
    EXPECT_EQ(c.tv, 0.0);
    EXPECT_NEAR(c.hellinger_sq, 0.0, 1e-15);
    EXPECT_EQ(c.kl_pq, 0.0);
}

TEST(ClassicDivergences, DisjointSupports) {
    const auto c = classic_divergences(Distribution({1.0, 0.0}), Distribution({0.0, 1.0}));
    EXPECT_EQ(c.tv, 1.0);
    EXPECT_EQ(c.hellinger_sq, 1.0);
    EXPECT_TRUE(std::isinf(c.kl_pq));
}

TEST(ClassicDivergences, PointMassAgainstBernoulli) {
    for (double eps : {1e-6, 0.01, 0.1, 0.5}) {
        const auto c = classic_divergences(Distribution::bernoulli(0.0), Distribution::bernoulli(eps));
        const double expected = 0.5 * (eps + std::pow(1.0 - std::sqrt(1.0 - eps), 2.0));
        EXPECT_NEAR(c.hellinger_sq, expected, 1e-15) << eps;
    }
}

TEST(ClassicDivergences, MismatchedSupportThrows) {
    EXPECT_THROW(classic_divergences(Distribution::uniform(2), Distribution::uniform(3)), StructuralError);
}

TEST(HLambda, Basics) {
    const Distribution p({0.3, 0.7});
    EXPECT_NEAR(h_lambda(p, p, 0.3), 0.0, 1e-15);
    EXPECT_EQ(h_lambda(Distribution({1.0, 0.0}), Distribution({0.0, 1.0}), 0.4), 1.0);
    const double expected = 1.0 - (std::sqrt(0.05) + std::sqrt(0.45));
    EXPECT_NEAR(h_lambda(Distribution::bernoulli(0.5), Distribution::bernoulli(0.9), 0.5), expected, 1e-15);
    EXPECT_THROW(h_lambda(p, p, 0.0), DomainError);
    EXPECT_THROW(h_lambda(p, p, 1.0), DomainError);
}

TEST(HLambda, HalfMatchesHellingerUnderAffinityNormalization) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const auto p = random_distribution(rng, 6, 0.2);
        const auto q = random_distribution(rng, 6, 0.2);
        double affinity = 0.0;
        for (std::size_t j = 0; j < 6; ++j) affinity += std::sqrt(p[j] * q[j]);
        EXPECT_NEAR(h_lambda(p, q, 0.5), 1.0 - affinity, 1e-12);
        EXPECT_NEAR(classic_divergences(p, q).hellinger_sq, h_lambda(p, q, 0.5), 1e-12);
    }
}

TEST(JsAlpha, Basics) {
    const Distribution p({0.25, 0.75});
    EXPECT_NEAR(js_alpha(p, p, 0.3), 0.0, 1e-15);
    EXPECT_NEAR(js_alpha(Distribution({1.0, 0.0}), Distribution({0.0, 1.0}), 0.5), kLn2, 1e-15);
    EXPECT_THROW(js_alpha(p, p, 1.0), DomainError);
}

TEST(JsAlpha, PointMassClosedForm) {
    for (double a : {0.01, 0.1, 0.5, 0.9}) {
        for (double eps : {1e-4, 0.05, 0.3, 1.0}) {
            const double ab = 1.0 - a;
            double expected = a * std::log(1.0 / (1.0 - ab * eps)) + ab * eps * std::log(1.0 / ab);
            if (eps < 1.0) expected += ab * (1.0 - eps) * std::log((1.0 - eps) / (1.0 - ab * eps));
            const double got = js_alpha(Distribution::bernoulli(0.0), Distribution::bernoulli(eps), a);
            EXPECT_NEAR(got, expected, 1e-12 * std::max(1.0, expected)) << a << " " << eps;
        }
    }
}

TEST(JsAlpha, MatchesEntropyDecomposition) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> u(0.001, 0.999);
    for (int i = 0; i < 500; ++i) {
        const auto p = random_distribution(rng, 2 + i % 7, 0.15);
        const auto q = random_distribution(rng, 2 + i % 7, 0.15);
        const double a = u(rng);
        EXPECT_NEAR(js_alpha(p, q, a), mutual_info_binary(p, q, a), 1e-10);
    }
    EXPECT_NEAR(mutual_info_binary(Distribution({1.0, 0.0}), Distribution({0.0, 1.0}), 0.5), kLn2, 1e-15);
}

TEST(JsAlpha, TinyDivergenceKeepsRelativeAccuracy) {
    // For q = p + d the divergence is about a(1-a)/2 * sum d^2/p; naive subtraction loses every digit here.
    const double d = 1e-9;
    const Distribution p({0.5, 0.5});
    const Distribution q({0.5 + d, 0.5 - d});
    const double a = 0.25;
    const double expected = a * (1.0 - a) / 2.0 * (d * d / 0.5 + d * d / 0.5);
    EXPECT_NEAR(js_alpha(p, q, a) / expected, 1.0, 1e-6);
}

TEST(EGamma, Basics) {
    const Distribution p = Distribution::bernoulli(0.9), q = Distribution::bernoulli(0.3);
    EXPECT_NEAR(e_gamma(p, q, 2.0), 0.3, 1e-15);
    EXPECT_NEAR(e_gamma(p, q, 1.0), classic_divergences(p, q).tv, 1e-15);
    EXPECT_EQ(e_gamma(p, p, 3.0), 0.0);
    EXPECT_THROW(e_gamma(p, q, 0.99), DomainError);
}

TEST(EGamma, VariationalCharacterization) {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> g(1.0, 20.0);
    for (int i = 0; i < 300; ++i) {
        const std::size_t k = 1 + i % 10;
        const auto p = random_distribution(rng, k, 0.2);
        const auto q = random_distribution(rng, k, 0.2);
        const double gamma = g(rng);
        EXPECT_NEAR(e_gamma(p, q, gamma), testing::brute_e_gamma(p, q, gamma), 1e-12);
    }
}

TEST(Tensorization, MatchesExplicitProduct) {
    EXPECT_EQ(tensorize_h_lambda(0.3, 0), 0.0);
    EXPECT_DOUBLE_EQ(tensorize_h_lambda(0.3, 1), 0.3);
    std::mt19937_64 rng(14);
    for (int i = 0; i < 50; ++i) {
        const auto p = random_distribution(rng, 4, 0.1);
        const auto q = random_distribution(rng, 4, 0.1);
        for (double lam : {0.1, 0.5, 0.8}) {
            const double h = h_lambda(p, q, lam);
            EXPECT_NEAR(tensorize_h_lambda(h, 2), h_lambda(product(p, p), product(q, q), lam), 1e-12);
            EXPECT_NEAR(tensorize_h_lambda(h, 3), h_lambda(power(p, 3), power(q, 3), lam), 1e-12);
        }
    }
}

TEST(BinaryEntropy, Values) {
    EXPECT_EQ(binary_entropy(0.0), 0.0);
    EXPECT_EQ(binary_entropy(1.0), 0.0);
    EXPECT_NEAR(binary_entropy(0.5), kLn2, 1e-15);
    EXPECT_NEAR(binary_entropy(0.25), -0.25 * std::log(0.25) - 0.75 * std::log(0.75), 1e-15);
    EXPECT_THROW(binary_entropy(1.5), DomainError);
}

TEST(DataProcessing, CoarseningNeverIncreases) {
    std::mt19937_64 rng(15);
    for (int i = 0; i < 300; ++i) {
        const std::size_t k = 2 + i % 8;
        const auto p = random_distribution(rng, k, 0.2);
        const auto q = random_distribution(rng, k, 0.2);
        std::uniform_int_distribution<std::size_t> cell(0, 2);
        std::vector<std::size_t> f(k);
        for (auto& c : f) c = cell(rng);
        const auto pc = p.coarsen(f, 3), qc = q.coarsen(f, 3);
        const auto full = classic_divergences(p, q), coarse = classic_divergences(pc, qc);
        EXPECT_LE(coarse.tv, full.tv + 1e-12);
        EXPECT_LE(coarse.hellinger_sq, full.hellinger_sq + 1e-12);
        if (std::isfinite(full.kl_pq)) {
            EXPECT_LE(coarse.kl_pq, full.kl_pq + 1e-12);
        }
        EXPECT_LE(h_lambda(pc, qc, 0.3), h_lambda(p, q, 0.3) + 1e-12);
        EXPECT_LE(js_alpha(pc, qc, 0.2), js_alpha(p, q, 0.2) + 1e-12);
        EXPECT_LE(e_gamma(pc, qc, 2.5), e_gamma(p, q, 2.5) + 1e-12);
    }
}

TEST(JointConvexity, MixturesOfPairs) {
    std::mt19937_64 rng(16);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 200; ++i) {
        const auto p1 = random_distribution(rng, 5), q1 = random_distribution(rng, 5);
        const auto p2 = random_distribution(rng, 5), q2 = random_distribution(rng, 5);
        const double t = u(rng);
        std::vector<double> pm(5), qm(5);
        for (std::size_t j = 0; j < 5; ++j) {
            pm[j] = t * p1[j] + (1 - t) * p2[j];
            qm[j] = t * q1[j] + (1 - t) * q2[j];
        }
        const Distribution pmix(pm), qmix(qm);
        EXPECT_LE(h_lambda(pmix, qmix, 0.35), t * h_lambda(p1, q1, 0.35) + (1 - t) * h_lambda(p2, q2, 0.35) + 1e-12);
        EXPECT_LE(js_alpha(pmix, qmix, 0.1), t * js_alpha(p1, q1, 0.1) + (1 - t) * js_alpha(p2, q2, 0.1) + 1e-12);
    }
}

}  // namespace
}  // namespace ht
