#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "smm/error.hpp"
#include "smm/experiments.hpp"
#include "smm/io.hpp"

using namespace smm;
namespace fs = std::filesystem;

namespace {

SuiteConfig quick_suite(int trials) {
    SuiteConfig cfg = table1_config(5);
    cfg.trials = trials;
    cfg.stop.max_epochs = 150;
    cfg.shape = GroupShape::uniform(3, 3);
    return cfg;
}

}  // namespace

TEST(Method, Names) {
    for (auto m : {Method::SMM, Method::MM, Method::Iso, Method::SMM64}) EXPECT_EQ(parse_method(to_string(m)), m);
    EXPECT_THROW(parse_method("xgb"), ContractViolation);
}

TEST(RunSuite, SingleTrialHasDegenerateQuartiles) {
    const auto rep = run_suite(quick_suite(1));
    ASSERT_EQ(rep.cells.size(), 9u);
    for (const auto& c : rep.cells) {
        EXPECT_TRUE(c.complete);
        EXPECT_EQ(c.test.q1, c.test.median);
        EXPECT_EQ(c.test.q3, c.test.median);
        EXPECT_FALSE(c.p_value.has_value());
    }
}

TEST(RunSuite, DeterministicAndRecomputable) {
    const auto cfg = quick_suite(5);
    const auto a = run_suite(cfg);
    const auto b = run_suite(cfg);
    EXPECT_EQ(a.to_csv(), b.to_csv());
    EXPECT_EQ(a.to_json(), b.to_json());
    EXPECT_EQ(a.to_long_csv(), b.to_long_csv());
    const auto again = build_report(cfg, a.results);
    EXPECT_EQ(again.to_json(), a.to_json());

    const auto& mm = a.cell("f_sqrt", "mm");
    EXPECT_TRUE(mm.p_value.has_value());
    EXPECT_TRUE(mm.active_neurons.has_value());
    EXPECT_FALSE(a.cell("f_sqrt", "smm").p_value.has_value());
    EXPECT_NE(a.to_csv().find("# config_hash=" + cfg.config_hash()), std::string::npos);
}

TEST(RunSuite, JobsDoNotChangeResults) {
    auto cfg = quick_suite(3);
    const auto serial = run_suite(cfg);
    cfg.jobs = 3;
    EXPECT_EQ(run_suite(cfg).to_json(), serial.to_json());
}

TEST(RunSuite, ConfigHashTracksResultAffectingFields) {
    auto a = quick_suite(3), b = quick_suite(3);
    b.jobs = 4;
    b.quiet = false;
    EXPECT_EQ(a.config_hash(), b.config_hash());
    b.root_seed = 6;
    EXPECT_NE(a.config_hash(), b.config_hash());
}

TEST(RunSuite, ResumeMatchesUninterruptedRun) {
    const auto dir = fs::temp_directory_path() / "smm_resume_test";
    fs::remove_all(dir);
    auto cfg = quick_suite(3);
    cfg.persist_path = dir / "trials.jsonl";
    const auto full = run_suite(cfg);

    // Keep the first few lines plus a torn one, as if the process died.
    std::ifstream in(*cfg.persist_path);
    std::string line, kept;
    for (int i = 0; i < 10 && std::getline(in, line); ++i) kept += line + "\n";
    in.close();
    kept += "{\"task\":\"f_s";
    write_file_atomic(*cfg.persist_path, kept);

    const auto resumed = run_suite(cfg);
    EXPECT_EQ(resumed.to_json(), full.to_json());
    EXPECT_EQ(resumed.to_csv(), full.to_csv());
    fs::remove_all(dir);
}

TEST(RunSuite, FailedTrialsAreRecorded) {
    auto cfg = quick_suite(2);
    cfg.rprop.delta0 = 40.0;
    cfg.rprop.eta_plus = 10.0;
    cfg.rprop.delta_max = 1e300;
    cfg.stop.tau = 1e-300;
    cfg.stop.max_epochs = 2000;
    const auto rep = run_suite(cfg);
    const auto& smm = rep.cell("f_sq", "smm");
    EXPECT_GT(smm.failed, 0u);
    EXPECT_FALSE(smm.complete);
    EXPECT_TRUE(rep.cell("f_sq", "iso").complete);
    for (const auto& r : rep.results)
        if (!r.ok()) EXPECT_FALSE(r.error->empty());
}

TEST(RunSuite, Validation) {
    auto cfg = quick_suite(0);
    EXPECT_THROW(run_suite(cfg), ContractViolation);
    auto multi = table2_config(1);
    multi.methods = {Method::Iso};
    EXPECT_THROW(run_suite(multi), ContractViolation);
}

TEST(TrialStreams, SharedAcrossMethods) {
    const auto cfg = quick_suite(1);
    const auto& task = cfg.tasks[0];
    const auto a = run_trial(cfg, task, Method::SMM, 0);
    const auto b = run_trial(cfg, task, Method::MM, 0);
    EXPECT_EQ(a.seed, b.seed);
    EXPECT_EQ(a.stream, b.stream);
    EXPECT_NE(run_trial(cfg, task, Method::SMM, 1).seed, a.seed);
}

TEST(Probe, TrainedModelsAreMonotone) {
    RngStream rng(1, 0);
    Architecture arch;
    arch.mask = MonotonicityMask({true, true, false});
    arch.variant = Variant::SMM64;
    arch.aux_hidden = 4;
    const auto p = init_params(arch, rng);
    const auto probe = probe_monotonicity(p, rng, 2000);
    EXPECT_EQ(probe.pairs, 2000u);
    EXPECT_EQ(probe.violations, 0u);
}

TEST(CrossValidate, SmallPipeline) {
    PartialMonotoneSpec spec;
    spec.n = 200;
    spec.seed = 3;
    const auto data = make_partial_monotone_dataset(spec);
    const MonotonicityMask mask({true, true, true, false, false, false, false, false});
    CvConfig cfg;
    cfg.seed = 1;
    cfg.stop.max_epochs = 60;
    cfg.stop.patience = 10;
    cfg.monotonicity_pairs = 200;
    const auto rep = cross_validate(data, mask, cfg);
    ASSERT_EQ(rep.folds.size(), 10u);
    for (const auto& f : rep.folds) {
        EXPECT_EQ(f.probe.violations, 0u);
        EXPECT_LE(f.epochs, 60);
        EXPECT_EQ(f.param_count, f.method == "smm64" ? 774u : 325u);
    }
    EXPECT_GT(rep.mean_constant_mse(), 0.0);
    EXPECT_EQ(rep.to_csv(), cross_validate(data, mask, cfg).to_csv());
}
