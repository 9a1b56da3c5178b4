#include <gtest/gtest.h>

#include <cmath>

#include "oracles.hpp"
#include "smm/error.hpp"
#include "smm/rng.hpp"
#include "smm/stats.hpp"

using namespace smm;

TEST(Quantile, LinearInterpolation) {
    const std::vector<double> v{4, 1, 3, 2};
    EXPECT_EQ(quantile(v, 0.0), 1.0);
    EXPECT_EQ(quantile(v, 1.0), 4.0);
    EXPECT_EQ(quantile(v, 0.5), 2.5);
    EXPECT_EQ(quantile(v, 0.25), 1.75);
    EXPECT_THROW(quantile(std::vector<double>{}, 0.5), ContractViolation);
    EXPECT_THROW(quantile(v, 1.5), ContractViolation);
}

TEST(Summarize, SingleValueIsDegenerate) {
    const auto s = summarize(std::vector<double>{0.7});
    EXPECT_EQ(s.median, 0.7);
    EXPECT_EQ(s.q1, 0.7);
    EXPECT_EQ(s.q3, 0.7);
    EXPECT_TRUE(s.outliers.empty());
}

TEST(Summarize, FlagsOutliers) {
    const std::vector<double> v{1, 2, 3, 4, 5, 6, 7, 8, 9, 100, -50};
    const auto s = summarize(v);
    EXPECT_EQ(s.outliers, (std::vector<double>{100, -50}));
    EXPECT_EQ(s.min, -50);
    EXPECT_EQ(s.max, 100);
    EXPECT_EQ(s.median, 5);
}

TEST(Wilcoxon, IdenticalSamples) {
    const std::vector<double> a{1, 2, 3, 4, 5, 6};
    EXPECT_EQ(wilcoxon_paired(a, a), 1.0);
}

TEST(Wilcoxon, FullDominationOver21Pairs) {
    std::vector<double> a, b;
    for (int i = 0; i < 21; ++i) {
        a.push_back(i * 0.1);
        b.push_back(i * 0.1 + 0.01 * (i + 1));
    }
    const double p = wilcoxon_paired(a, b);
    EXPECT_DOUBLE_EQ(p, 2.0 / std::pow(2.0, 21));
    EXPECT_LT(p, 1e-3);
}

TEST(Wilcoxon, AlternatingEqualMagnitudes) {
    const std::vector<double> a{1, -1, 1, -1, 1}, b{0, 0, 0, 0, 0};
    // All ranks are 3; W+ = 9. Enumeration of the 2^5 sign patterns.
    EXPECT_DOUBLE_EQ(wilcoxon_paired(a, b), oracle::wilcoxon_enumerate(a, b));
    EXPECT_DOUBLE_EQ(wilcoxon_paired(a, b), 1.0);
}

TEST(Wilcoxon, ZerosAreExcluded) {
    const std::vector<double> a{1, 2, 3, 4, 5, 6, 7}, b{1, 2, 2, 3, 4, 5, 6};
    EXPECT_DOUBLE_EQ(wilcoxon_paired(a, b), 2.0 / 32.0);
}

TEST(Wilcoxon, RequiresFivePairs) {
    const std::vector<double> a{1, 2, 3, 4};
    EXPECT_THROW(wilcoxon_paired(a, a), ContractViolation);
    EXPECT_THROW(wilcoxon_paired(std::vector<double>{1, 2, 3, 4, 5}, a), ContractViolation);
}

TEST(Wilcoxon, AgreesWithEnumerationWithTies) {
    RngStream rng(1, 0);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 5 + rng.below(6);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = static_cast<double>(rng.below(7));
            b[i] = static_cast<double>(rng.below(7));
        }
        ASSERT_NEAR(wilcoxon_paired(a, b), oracle::wilcoxon_enumerate(a, b), 1e-12);
    }
}

TEST(Wilcoxon, LargeSampleNormalApproximation) {
    // n = 40 with a strong shift: approximation must report a tiny p; with no
    // shift and symmetric noise it must not.
    RngStream rng(2, 0);
    std::vector<double> a(40), b(40), c(40);
    for (std::size_t i = 0; i < 40; ++i) {
        a[i] = rng.normal();
        b[i] = a[i] + 1.0 + 0.1 * rng.normal();
        c[i] = a[i] + (i % 2 ? 1.0 : -1.0) * (1.0 + 0.01 * i);
    }
    EXPECT_LT(wilcoxon_paired(a, b), 1e-6);
    EXPECT_GT(wilcoxon_paired(a, c), 0.5);
}
