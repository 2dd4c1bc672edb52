#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "brute_force.hpp"
#include "ht/divergences.hpp"
#include "ht/errors.hpp"
#include "ht/exact_oracle.hpp"

namespace ht {
namespace {

using testing::random_distribution;

void expect_table_invariants(const LlrAtomTable& t) {
    long double sp = 0.0L, sq = 0.0L;
    for (std::size_t i = 0; i < t.atoms.size(); ++i) {
        const auto& a = t.atoms[i];
        sp += a.p_mass;
        sq += a.q_mass;
        if (i > 0) {
            EXPECT_LT(t.atoms[i - 1].llr, a.llr);
        }
        if (a.llr == INFINITY) {
            EXPECT_EQ(a.q_mass, 0.0);
        } else if (a.llr == -INFINITY) {
            EXPECT_EQ(a.p_mass, 0.0);
        } else {
            EXPECT_NEAR(std::exp(a.llr) * a.q_mass, a.p_mass, 1e-9 * a.p_mass);
        }
    }
    EXPECT_NEAR(static_cast<double>(sp), 1.0, 1e-12);
    EXPECT_NEAR(static_cast<double>(sq), 1.0, 1e-12);
}

TEST(LlrTable, SingleSampleAtoms) {
    const Distribution p({0.5, 0.3, 0.2}), q({0.1, 0.3, 0.6});
    const auto t = build_llr_table(p, q, 1);
    ASSERT_EQ(t.atoms.size(), 3u);
    EXPECT_NEAR(t.atoms[0].llr, std::log(0.2 / 0.6), 1e-15);
    EXPECT_NEAR(t.atoms[1].llr, 0.0, 1e-15);
    EXPECT_NEAR(t.atoms[2].llr, std::log(5.0), 1e-15);
    EXPECT_DOUBLE_EQ(t.atoms[2].p_mass, 0.5);
    EXPECT_DOUBLE_EQ(t.atoms[2].q_mass, 0.1);
    expect_table_invariants(t);
}

TEST(LlrTable, PointMassFamilyHasInfiniteAtom) {
    for (double eps : {0.01, 0.2, 0.5}) {
        for (std::size_t n : {1u, 5u, 40u}) {
            const auto t = build_llr_table(Distribution::bernoulli(0.0), Distribution::bernoulli(eps), n);
            ASSERT_EQ(t.atoms.size(), 2u);
            EXPECT_EQ(t.atoms[0].llr, -INFINITY);
            EXPECT_NEAR(t.atoms[1].q_mass, std::pow(1.0 - eps, static_cast<double>(n)), 1e-14);
            EXPECT_EQ(t.atoms[1].p_mass, 1.0);
            expect_table_invariants(t);
        }
    }
}

TEST(LlrTable, MatchesSequenceEnumeration) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_distribution(rng, 3), q = random_distribution(rng, 3);
        const auto t = build_llr_table(p, q, 3);
        expect_table_invariants(t);
        const auto seqs = testing::enumerate_sequences(p, q, 3);
        std::vector<long double> pm(t.atoms.size()), qm(t.atoms.size());
        for (std::size_t s = 0; s < seqs.p.size(); ++s) {
            const double l = std::log(seqs.p[s] / seqs.q[s]);
            std::size_t best = 0;
            for (std::size_t a = 1; a < t.atoms.size(); ++a) {
                if (std::fabs(t.atoms[a].llr - l) < std::fabs(t.atoms[best].llr - l)) best = a;
            }
            ASSERT_NEAR(t.atoms[best].llr, l, 1e-9);
            pm[best] += seqs.p[s];
            qm[best] += seqs.q[s];
        }
        for (std::size_t a = 0; a < t.atoms.size(); ++a) {
            EXPECT_NEAR(t.atoms[a].p_mass, static_cast<double>(pm[a]), 1e-14);
            EXPECT_NEAR(t.atoms[a].q_mass, static_cast<double>(qm[a]), 1e-14);
        }
    }
}

TEST(LlrTable, StrategiesAgree) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_distribution(rng, 3, 0.2), q = random_distribution(rng, 3, 0.2);
        for (std::size_t n : {1u, 4u, 12u}) {
            const auto a = build_llr_table_with(p, q, n, TableStrategy::type_classes);
            const auto b = build_llr_table_with(p, q, n, TableStrategy::convolution);
            expect_table_invariants(b);
            for (double alpha : {0.05, 0.3, 0.5}) EXPECT_NEAR(bayes_error(a, alpha), bayes_error(b, alpha), 1e-8);
            for (double t1 : {0.0, 0.01, 0.2}) EXPECT_NEAR(np_curve_point(a, t1), np_curve_point(b, t1), 1e-8);
        }
    }
}

TEST(LlrTable, CapacityErrorWhenBothPathsTooLarge) {
    OracleLimits tiny;
    tiny.max_type_classes = 10;
    tiny.max_atoms = 10;
    std::mt19937_64 rng(33);
    const auto p = random_distribution(rng, 4), q = random_distribution(rng, 4);
    EXPECT_THROW(build_llr_table(p, q, 20, tiny), CapacityError);
}

TEST(BayesError, HandValues) {
    EXPECT_NEAR(bayes_error_exact(Distribution::bernoulli(0.3), Distribution::bernoulli(0.7), 0.5, 1), 0.3, 1e-15);
    const Distribution p({0.2, 0.8});
    for (std::size_t n : {0u, 1u, 7u}) EXPECT_NEAR(bayes_error_exact(p, p, 0.3, n), 0.3, 1e-15);
    EXPECT_NEAR(bayes_error_exact(p, Distribution({0.6, 0.4}), 0.8, 0), 0.2, 1e-15);
}

TEST(BayesError, PointMassClosedForm) {
    for (double eps : {0.01, 0.1, 0.5}) {
        for (double alpha : {0.05, 0.5, 0.9}) {
            for (std::size_t n : {0u, 1u, 10u, 100u}) {
                const double expected = std::min(alpha, (1 - alpha) * std::pow(1 - eps, static_cast<double>(n)));
                EXPECT_NEAR(bayes_error_exact(Distribution::bernoulli(0.0), Distribution::bernoulli(eps), alpha, n),
                            expected, 1e-14);
            }
        }
    }
}

TEST(BayesError, MatchesBruteForceAndHockeyStick) {
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t k = 2 + trial % 2;
        const auto p = random_distribution(rng, k, 0.15), q = random_distribution(rng, k, 0.15);
        const double alpha = u(rng);
        for (std::size_t n = 0; n <= 5; ++n) {
            const double got = bayes_error_exact(p, q, alpha, n);
            EXPECT_NEAR(got, testing::brute_bayes_error(p, q, alpha, n), 1e-12);
            if (n >= 1) {
                const double via_e = alpha * (1.0 - e_gamma(power(p, n), power(q, n), std::max(1.0, (1 - alpha) / alpha)));
                if (alpha <= 0.5) {
                    EXPECT_NEAR(got, via_e, 1e-10);
                }
            }
        }
    }
}

TEST(BayesError, NonIncreasingAndFanoConsistent) {
    std::mt19937_64 rng(35);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = random_distribution(rng, 3, 0.1), q = random_distribution(rng, 3, 0.1);
        const double alpha = 0.1 + 0.02 * trial;
        const double js = js_alpha(p, q, alpha);
        double prev = bayes_error_exact(p, q, alpha, 0);
        for (std::size_t n = 1; n <= 40; ++n) {
            const double cur = bayes_error_exact(p, q, alpha, n);
            EXPECT_LE(cur, prev + 1e-12);
            EXPECT_GE(binary_entropy(cur), binary_entropy(alpha) - static_cast<double>(n) * js - 1e-9);
            prev = cur;
        }
    }
}

TEST(NpCurve, EdgeValues) {
    const auto p = Distribution::bernoulli(0.0), q = Distribution::bernoulli(0.1);
    EXPECT_NEAR(np_curve_point(p, q, 1, 0.0), 0.9, 1e-15);
    EXPECT_EQ(np_curve_point(p, q, 3, 1.0), 0.0);
}

TEST(NpCurve, MatchesRandomizedTestOracles) {
    std::mt19937_64 rng(36);
    for (int trial = 0; trial < 15; ++trial) {
        const auto p = random_distribution(rng, 2, 0.1), q = random_distribution(rng, 2, 0.1);
        for (std::size_t n = 1; n <= 3; ++n) {
            double prev = 1.0;
            for (double t1 = 0.0; t1 <= 1.0; t1 += 0.05) {
                const double got = np_curve_point(p, q, n, t1);
                EXPECT_NEAR(got, testing::brute_np_point(p, q, n, t1), 1e-12);
                EXPECT_NEAR(got, testing::hull_np_point(p, q, n, t1), 1e-12);
                EXPECT_LE(got, prev + 1e-15);
                prev = got;
            }
        }
    }
}

TEST(MutualInformation, ProductBoundAndBaseCase) {
    std::mt19937_64 rng(37);
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = random_distribution(rng, 2, 0.1), q = random_distribution(rng, 2, 0.1);
        const double alpha = 0.05 + 0.04 * trial;
        const double js = js_alpha(p, q, alpha);
        EXPECT_NEAR(mutual_info_product(p, q, alpha, 1), js, 1e-12);
        EXPECT_LE(mutual_info_product(p, q, alpha, 3), 3 * js + 1e-9);
        EXPECT_NEAR(mutual_info_product(p, q, alpha, 3), js_alpha(power(p, 3), power(q, 3), alpha), 1e-10);
    }
    const Distribution p({0.4, 0.6});
    EXPECT_NEAR(mutual_info_product(p, p, 0.3, 5), 0.0, 1e-15);
}

TEST(NStarBayes, VacuousAndUnsolvable) {
    const Distribution p({0.4, 0.6}), q({0.7, 0.3});
    EXPECT_EQ(n_star_bayes_exact(TestingInstance::bayesian(p, q, 0.2, 0.2)).n_star, 0u);
    EXPECT_EQ(n_star_bayes_exact(TestingInstance::bayesian(p, q, 0.9, 0.1)).n_star, 0u);
    const auto r = n_star_bayes_exact(TestingInstance::bayesian(p, p, 0.2, 0.1), 1000);
    EXPECT_TRUE(r.exceeds_cap());
}

TEST(NStarBayes, PointMassClosedFormBothOrders) {
    // Only the all-zeros sequence is ambiguous. With p the point mass the error is min(a, (1-a) 0.9^n);
    // with the roles swapped it is min(a 0.9^n, 1 - a).
    const auto point = Distribution::bernoulli(0.0), noisy = Distribution::bernoulli(0.1);
    const auto direct = n_star_bayes_exact(TestingInstance::bayesian(point, noisy, 0.25, 0.05));
    ASSERT_TRUE(direct.n_star.has_value());
    EXPECT_EQ(*direct.n_star, static_cast<std::uint64_t>(std::ceil(std::log(0.75 / 0.05) / std::log(1 / 0.9))));
    EXPECT_EQ(*direct.n_star, 26u);
    const auto swapped = n_star_bayes_exact(TestingInstance::bayesian(noisy, point, 0.25, 0.05));
    ASSERT_TRUE(swapped.n_star.has_value());
    EXPECT_EQ(*swapped.n_star, static_cast<std::uint64_t>(std::ceil(std::log(0.25 / 0.05) / std::log(1 / 0.9))));
}

TEST(NStarBayes, MatchesLinearScan) {
    std::mt19937_64 rng(38);
    for (int trial = 0; trial < 25; ++trial) {
        const auto p = random_distribution(rng, 3, 0.1), q = random_distribution(rng, 3, 0.1);
        const double alpha = 0.1 + 0.015 * trial, delta = alpha / 4;
        const auto r = n_star_bayes_exact(TestingInstance::bayesian(p, q, alpha, delta));
        std::size_t n = 0;
        while (bayes_error_exact(p, q, alpha, n) > delta * (1 + kTargetSlack) && n < 5000) ++n;
        ASSERT_TRUE(r.n_star.has_value());
        EXPECT_EQ(*r.n_star, n);
        EXPECT_FALSE(r.trace.empty());
        for (std::size_t i = 1; i < r.trace.size(); ++i) EXPECT_LT(r.trace[i - 1].n, r.trace[i].n);
    }
}

TEST(NStarPriorFree, VacuousAndSandwich) {
    const Distribution p({0.4, 0.6}), q({0.7, 0.3});
    EXPECT_EQ(n_star_pf_exact(TestingInstance::prior_free(p, q, 0.6, 0.4)).n_star, 0u);
    std::mt19937_64 rng(39);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = random_distribution(rng, 3, 0.1), b = random_distribution(rng, 3, 0.1);
        const double t1 = 0.01 + 0.004 * trial, t2 = 0.05;
        const auto pf = n_star_pf_exact(TestingInstance::prior_free(a, b, t1, t2));
        const double prior = t2 / (t1 + t2);
        const auto lo = n_star_bayes_exact(TestingInstance::bayesian(a, b, prior, 2 * t1 * t2 / (t1 + t2)));
        const auto hi = n_star_bayes_exact(TestingInstance::bayesian(a, b, prior, t1 * t2 / (t1 + t2)));
        ASSERT_TRUE(pf.n_star && lo.n_star && hi.n_star);
        EXPECT_LE(*lo.n_star, *pf.n_star);
        EXPECT_LE(*pf.n_star, *hi.n_star);
    }
}

TEST(NStarPriorFree, MatchesBruteForceOnTinyInstances) {
    std::mt19937_64 rng(40);
    for (int trial = 0; trial < 10; ++trial) {
        const auto p = random_distribution(rng, 2), q = random_distribution(rng, 2);
        const double t1 = 0.2, t2 = 0.3;
        const auto r = n_star_pf_exact(TestingInstance::prior_free(p, q, t1, t2), 6);
        std::size_t n = 0;
        while (n <= 6 && testing::brute_np_point(p, q, n, t1) > t2 * (1 + 1e-12)) ++n;
        if (n <= 6) {
            ASSERT_TRUE(r.n_star.has_value());
            EXPECT_EQ(*r.n_star, n);
        } else {
            EXPECT_TRUE(r.exceeds_cap());
        }
    }
}

TEST(TestingInstance, ValidatesParameters) {
    const Distribution p({0.4, 0.6});
    EXPECT_THROW(TestingInstance::bayesian(p, p, 0.0, 0.1), DomainError);
    EXPECT_THROW(TestingInstance::bayesian(p, p, 0.3, 0.0), DomainError);
    EXPECT_THROW(TestingInstance::prior_free(p, p, 1.0, 0.1), DomainError);
    EXPECT_THROW(TestingInstance::bayesian(p, Distribution::uniform(3), 0.3, 0.1), StructuralError);
}

}  // namespace
}  // namespace ht
