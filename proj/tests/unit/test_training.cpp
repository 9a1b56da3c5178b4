#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "fixtures.hpp"
#include "smm/error.hpp"
#include "smm/gradients.hpp"
#include "smm/training.hpp"

using namespace smm;
using smm::testing::make_arch;

TEST(Rprop, ZeroGradientLeavesEverythingUnchanged) {
    RpropConfig cfg;
    RpropState s(3, cfg);
    std::vector<double> p{1.0, -2.0, 0.5};
    const std::vector<double> g(3, 0.0);
    rprop_step(p, g, s);
    rprop_step(p, g, s);
    EXPECT_EQ(p, (std::vector<double>{1.0, -2.0, 0.5}));
    for (double d : s.step_sizes) EXPECT_EQ(d, cfg.delta0);
}

TEST(Rprop, StepsAgainstGradientSign) {
    RpropState s(2, RpropConfig{});
    std::vector<double> p{0.0, 0.0};
    rprop_step(p, std::vector<double>{2.0, -0.1}, s);
    EXPECT_EQ(p[0], -0.0125);
    EXPECT_EQ(p[1], 0.0125);
    rprop_step(p, std::vector<double>{1.0, -5.0}, s);
    EXPECT_DOUBLE_EQ(p[0], -0.0125 - 0.0125 * 1.2);
    EXPECT_DOUBLE_EQ(s.step_sizes[1], 0.0125 * 1.2);
}

TEST(Rprop, SignFlipShrinksByEtaMinus) {
    RpropConfig cfg;
    RpropState s(1, cfg);
    std::vector<double> p{0.0};
    rprop_step(p, std::vector<double>{1.0}, s);
    const double before = s.step_sizes[0];
    rprop_step(p, std::vector<double>{-1.0}, s);
    EXPECT_EQ(s.step_sizes[0], before * cfg.eta_minus);
}

TEST(Rprop, ScalarQuadraticConverges) {
    // Loss (p - 3)^2 from p = 0.
    RpropState s(1, RpropConfig{});
    std::vector<double> p{0.0};
    double prev_loss = 9.0;
    int prev_sign = 0;
    int steps = 0;
    for (; steps < 200 && std::abs(p[0] - 3.0) >= 1e-3; ++steps) {
        const double g = 2.0 * (p[0] - 3.0);
        const int sign = (g > 0) - (g < 0);
        const double before = p[0];
        rprop_step(p, std::vector<double>{g}, s);
        const double loss = (p[0] - 3.0) * (p[0] - 3.0);
        const bool crossed = (before - 3.0) * (p[0] - 3.0) < 0.0;
        if (sign == prev_sign && !crossed) EXPECT_LT(loss, prev_loss);
        prev_loss = loss;
        prev_sign = sign;
    }
    EXPECT_LT(std::abs(p[0] - 3.0), 1e-3);
    EXPECT_LE(steps, 200);
}

TEST(Rprop, StepSizesStayInBounds) {
    RpropConfig cfg;
    cfg.delta_max = 0.5;
    cfg.delta_min = 1e-4;
    RpropState s(8, cfg);
    RngStream rng(1, 0);
    std::vector<double> p(8, 0.0), g(8);
    for (int t = 0; t < 2000; ++t) {
        for (double& v : g) v = static_cast<double>(rng.below(3)) - 1.0;
        if (t % 500 < 250)
            for (double& v : g) v = 1.0;  // long runs of agreement
        rprop_step(p, g, s);
        for (double d : s.step_sizes) {
            ASSERT_GE(d, cfg.delta_min);
            ASSERT_LE(d, cfg.delta_max);
        }
    }
}

TEST(Rprop, ConfigValidation) {
    RpropConfig bad;
    bad.eta_plus = 0.9;
    EXPECT_THROW(bad.validate(), ContractViolation);
    RpropConfig bad2;
    bad2.delta_min = 100.0;
    EXPECT_THROW(bad2.validate(), ContractViolation);
    RpropState s(2, RpropConfig{});
    std::vector<double> p(2);
    EXPECT_THROW(rprop_step(p, std::vector<double>(3), s), ContractViolation);
}

TEST(Progress, Examples) {
    EXPECT_EQ(progress(std::vector<double>{0.3, 0.3, 0.3, 0.3, 0.3}), 0.0);
    EXPECT_DOUBLE_EQ(progress(std::vector<double>{2, 2, 2, 2, 1}), 800.0);
    EXPECT_GT(progress(std::vector<double>{5, 4, 3, 2, 1}), 0.0);
}

TEST(StopRules, Validation) {
    ProgressStrip p;
    p.k = 0;
    EXPECT_THROW(validate(StopRule{p}), ContractViolation);
    ValidationStop v;
    v.patience = 0;
    EXPECT_THROW(validate(StopRule{v}), ContractViolation);
}

namespace {

Dataset linear_data(std::size_t n) {
    Dataset d;
    d.dim = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = static_cast<double>(i) / static_cast<double>(n - 1);
        d.push_back(std::vector<double>{x}, 0.8 * x + 0.1);
    }
    return d;
}

Dataset noisy_square(std::size_t n, std::uint64_t seed) {
    RngStream rng(seed, 0);
    Dataset d;
    d.dim = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = rng.uniform();
        d.push_back(std::vector<double>{x}, x * x + 0.01 * rng.normal());
    }
    return d;
}

}  // namespace

TEST(Fit, RealizableLinearTarget) {
    TrainConfig cfg;
    cfg.seed = 3;
    const auto r = fit(make_arch(Variant::SMM, 1, GroupShape({1})), linear_data(20), std::nullopt, cfg);
    EXPECT_LT(r.trace.rows.back().train_mse, 1e-8);
}

TEST(Fit, ProgressRuleHaltsAndTraceIsConsistent) {
    TrainConfig cfg;
    cfg.seed = 4;
    const auto data = noisy_square(60, 1);
    const auto r = fit(make_arch(Variant::SMM, 1), data, std::nullopt, cfg);
    ASSERT_FALSE(r.trace.rows.empty());
    EXPECT_LE(r.trace.rows.size(), 10000u);
    EXPECT_TRUE(r.trace.reason == StopReason::Progress || r.trace.reason == StopReason::MaxEpochs);
    EXPECT_EQ(r.trace.rows.back().train_mse, mse_loss(r.params, data));
    EXPECT_LT(r.trace.rows.back().train_mse, r.trace.rows.front().train_mse);
    for (std::size_t i = 0; i < r.trace.rows.size(); ++i) EXPECT_EQ(r.trace.rows[i].epoch, static_cast<int>(i) + 1);
    if (r.trace.reason == StopReason::Progress) {
        std::vector<double> last;
        for (std::size_t i = r.trace.rows.size() - 5; i < r.trace.rows.size(); ++i)
            last.push_back(r.trace.rows[i].train_mse);
        EXPECT_LT(progress(last), 1e-3);
    }
}

TEST(Fit, MaxEpochsCap) {
    TrainConfig cfg;
    ProgressStrip rule;
    rule.tau = 1e-300;  // never satisfied
    rule.max_epochs = 37;
    cfg.stop = rule;
    const auto r = fit(make_arch(Variant::MM, 1), noisy_square(30, 2), std::nullopt, cfg);
    EXPECT_EQ(r.trace.rows.size(), 37u);
    EXPECT_EQ(r.trace.reason, StopReason::MaxEpochs);
}

TEST(Fit, SameSeedSameTrace) {
    TrainConfig cfg;
    cfg.seed = 9;
    const auto data = noisy_square(40, 3);
    const auto a = fit(make_arch(Variant::SMM, 1), data, std::nullopt, cfg);
    const auto b = fit(make_arch(Variant::SMM, 1), data, std::nullopt, cfg);
    EXPECT_EQ(a.trace.to_csv(), b.trace.to_csv());
    EXPECT_EQ(a.params, b.params);
}

TEST(Fit, ValidationStopReturnsBestModel) {
    TrainConfig cfg;
    cfg.seed = 5;
    ValidationStop rule;
    rule.patience = 20;
    rule.max_epochs = 800;
    cfg.stop = rule;
    const auto train = noisy_square(30, 4);
    const auto val = noisy_square(30, 5);
    const auto r = fit(make_arch(Variant::SMM, 1), train, val, cfg);
    double best = INFINITY;
    int best_epoch = 0;
    for (const auto& row : r.trace.rows)
        if (*row.val_mse < best) {
            best = *row.val_mse;
            best_epoch = row.epoch;
        }
    EXPECT_EQ(mse_loss(r.params, val), best);
    EXPECT_EQ(r.trace.selected_epoch, best_epoch);
    if (r.trace.reason == StopReason::Patience)
        EXPECT_EQ(r.trace.rows.back().epoch - best_epoch, rule.patience);
}

TEST(Fit, ValidationSetRequiredExactlyForValidationRule) {
    TrainConfig cfg;
    const auto data = noisy_square(10, 6);
    EXPECT_THROW(fit(make_arch(Variant::SMM, 1), data, data, cfg), ContractViolation);
    cfg.stop = ValidationStop{};
    EXPECT_THROW(fit(make_arch(Variant::SMM, 1), data, std::nullopt, cfg), ContractViolation);
}

TEST(Fit, DivergenceCarriesTrace) {
    TrainConfig cfg;
    RpropConfig r;
    r.delta0 = 40.0;
    r.delta_max = 1e300;
    r.eta_plus = 10.0;
    cfg.rprop = r;
    ProgressStrip rule;
    rule.tau = 1e-300;
    rule.max_epochs = 1000;
    cfg.stop = rule;
    try {
        fit(make_arch(Variant::SMM, 1), noisy_square(20, 7), std::nullopt, cfg);
        GTEST_SKIP() << "did not diverge";
    } catch (const TrainingDiverged& e) {
        EXPECT_FALSE(e.block().empty());
        EXPECT_FALSE(e.trace().rows.empty());
    }
}

TEST(TrainTrace, CsvLayout) {
    TrainTrace t;
    t.rows.push_back({1, 0.5, std::nullopt, 0.25});
    t.rows.push_back({2, 0.125, 0.75, 0.5});
    t.reason = StopReason::Patience;
    EXPECT_EQ(t.to_csv(), "epoch,train_mse,val_mse,beta,stopped_reason\n1,0.5,,0.25,\n2,0.125,0.75,0.5,patience\n");
}
