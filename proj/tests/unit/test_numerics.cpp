#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "smm/error.hpp"
#include "smm/numerics.hpp"
#include "smm/rng.hpp"

using namespace smm;

TEST(LseScaled, SingleElementIsIdentity) {
    const std::vector<double> v{5.0};
    EXPECT_EQ(lse_scaled(v, 3.7), 5.0);
}

TEST(LseScaled, EqualInputsAddLogN) {
    const std::vector<double> v{0.0, 0.0};
    EXPECT_DOUBLE_EQ(lse_scaled(v, 1.0), 0.6931471805599453);
}

TEST(LseScaled, MatchesMultiprecisionOracle) {
    const std::vector<double> v{0.3, -1.2, 0.7};
    const double got = lse_scaled(v, 2.5);
    EXPECT_GT(got, 0.7);
    EXPECT_LE(got, 0.7 + std::log(3.0) / 2.5);
    EXPECT_NEAR(got, oracle::lse_multiprecision(v, 2.5), 1e-15);
}

TEST(LseScaledNeg, Examples) {
    EXPECT_EQ(lse_scaled_neg(std::vector<double>{2.0}, 1.0), 2.0);
    EXPECT_DOUBLE_EQ(lse_scaled_neg(std::vector<double>{1.0, 1.0, 1.0, 1.0}, 2.0), 1.0 - std::log(4.0) / 2.0);
    const std::vector<double> v{0.3, -1.2, 0.7};
    const double got = lse_scaled_neg(v, 2.5);
    EXPECT_LT(got, -1.2);
    EXPECT_GE(got, -1.2 - std::log(3.0) / 2.5);
    EXPECT_NEAR(got, oracle::lse_multiprecision(v, -2.5), 1e-15);
}

TEST(LseScaled, RejectsBadInput) {
    EXPECT_THROW(lse_scaled(std::vector<double>{}, 1.0), ContractViolation);
    EXPECT_THROW(lse_scaled(std::vector<double>{1.0}, 0.0), ContractViolation);
    EXPECT_THROW(lse_scaled(std::vector<double>{NAN}, 1.0), ContractViolation);
    EXPECT_THROW(lse_scaled_neg(std::vector<double>{INFINITY}, 1.0), ContractViolation);
}

TEST(LseScaled, LargeInputsDoNotOverflow) {
    const std::vector<double> v{1e4, 1e4 - 1.0};
    EXPECT_NEAR(lse_scaled(v, 10.0), 1e4 + std::log1p(std::exp(-10.0)) / 10.0, 1e-9);
}

TEST(LseScaled, StableFormAgreesWithNaiveFormula) {
    RngStream rng(11, 0);
    for (int t = 0; t < 2000; ++t) {
        const std::size_t n = 1 + rng.below(16);
        const double beta = std::exp(rng.uniform(-3.0, 3.0));
        std::vector<double> v(n);
        for (double& x : v) x = rng.uniform(-5.0, 5.0);
        double naive = 0.0;
        for (double x : v) naive += std::exp(beta * x);
        naive = std::log(naive) / beta;
        const double got = lse_scaled(v, beta);
        EXPECT_LE(std::abs(got - naive), 1e-12 * std::max(1.0, std::abs(naive)));
    }
}

TEST(LseScaled, PermutationInvariantAndStrictlyIncreasing) {
    RngStream rng(12, 0);
    for (int t = 0; t < 500; ++t) {
        std::vector<double> v(2 + rng.below(8));
        for (double& x : v) x = rng.uniform(-2.0, 2.0);
        const double beta = std::exp(rng.uniform(-2.0, 2.0));
        const double base = lse_scaled(v, beta);
        std::vector<double> r(v.rbegin(), v.rend());
        EXPECT_NEAR(lse_scaled(r, beta), base, 1e-14);
        v[rng.below(v.size())] += 0.01;
        EXPECT_GT(lse_scaled(v, beta), base);
    }
}

TEST(LseWithWeights, WeightsAreSoftmax) {
    const std::vector<double> v{0.1, 0.4, -0.3};
    std::vector<double> w(3);
    const double beta = 1.7;
    const double y = lse_with_weights(v, beta, w);
    EXPECT_DOUBLE_EQ(y, lse_scaled(v, beta));
    double z = 0.0;
    for (double x : v) z += std::exp(beta * x);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(w[i], std::exp(beta * v[i]) / z, 1e-15);

    std::vector<double> wn(3);
    const double yn = lse_neg_with_weights(v, beta, wn);
    EXPECT_DOUBLE_EQ(yn, lse_scaled_neg(v, beta));
    double zn = 0.0;
    for (double x : v) zn += std::exp(-beta * x);
    for (std::size_t i = 0; i < v.size(); ++i) EXPECT_NEAR(wn[i], std::exp(-beta * v[i]) / zn, 1e-15);
}

TEST(Sigmoid, MidpointAndSaturation) {
    EXPECT_EQ(sigmoid(0.0), 0.5);
    const double hi = sigmoid(500.0);
    EXPECT_GT(hi, 1.0 - 1e-12);
    EXPECT_LE(hi, 1.0);
    const double lo = sigmoid(-500.0);
    EXPECT_GE(lo, 0.0);
    EXPECT_LT(lo, 1e-12);
    EXPECT_FALSE(std::isnan(sigmoid(-1e308)));
    EXPECT_NEAR(sigmoid(1.0) + sigmoid(-1.0), 1.0, 1e-15);
}

TEST(TruncatedGaussian, StaysInInterval) {
    RngStream rng(3, 0);
    for (int i = 0; i < 10000; ++i) {
        const double v = sample_truncated_gaussian(rng, -2.0, 2.0);
        ASSERT_GE(v, -2.0);
        ASSERT_LE(v, 2.0);
    }
    const double eps = 1e-9;
    for (int i = 0; i < 1000; ++i) {
        const double v = sample_truncated_gaussian(rng, 0.0, eps);
        ASSERT_GE(v, 0.0);
        ASSERT_LE(v, eps);
    }
    for (int i = 0; i < 1000; ++i) {
        const double v = sample_truncated_gaussian(rng, 6.0, 7.0);
        ASSERT_GE(v, 6.0);
        ASSERT_LE(v, 7.0);
        const double w = sample_truncated_gaussian(rng, -9.0, -8.5);
        ASSERT_GE(w, -9.0);
        ASSERT_LE(w, -8.5);
    }
    EXPECT_THROW(sample_truncated_gaussian(rng, 1.0, 1.0), ContractViolation);
}

TEST(TruncatedGaussian, MeanOfSymmetricIntervalIsZero) {
    RngStream rng(4, 0);
    double s = 0.0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) s += sample_truncated_gaussian(rng, -2.0, 2.0);
    EXPECT_NEAR(s / n, 0.0, 0.005);
}

TEST(TruncatedGaussian, TailMeanMatchesAnalytic) {
    // E[Z | Z > a] = phi(a) / (1 - Phi(a)).
    RngStream rng(5, 0);
    const double a = 3.0;
    double s = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) s += sample_truncated_gaussian(rng, a, 1e300);
    const double phi = std::exp(-a * a / 2) / std::sqrt(2 * M_PI);
    const double tail = 0.5 * std::erfc(a / std::sqrt(2.0));
    EXPECT_NEAR(s / n, phi / tail, 0.01);
}
