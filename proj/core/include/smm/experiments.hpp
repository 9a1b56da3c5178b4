#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "smm/benchgen.hpp"
#include "smm/model.hpp"
#include "smm/stats.hpp"
#include "smm/training.hpp"

namespace smm {

enum class Method { SMM, MM, Iso, SMM64 };

std::string_view to_string(Method m);
Method parse_method(std::string_view s);

struct MonotonicityProbe {
    std::size_t pairs = 0;
    std::size_t violations = 0;
    double worst_decrease = 0.0;
};

/// Draws x uniformly in [lo, hi]^d and x' = x plus nonnegative increments on
/// a random nonempty subset of the constrained features, and counts pairs
/// with predict(x') < predict(x).
MonotonicityProbe probe_monotonicity(const ModelParams& params, RngStream& rng, std::size_t pairs, double lo = 0.0,
                                     double hi = 1.0);

struct TrialResult {
    std::string task;
    std::string method;
    int trial = 0;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
    double train_mse = 0.0;
    double test_mse = 0.0;
    int epochs = 0;
    std::optional<std::size_t> active_neurons;  ///< MM only, over the test inputs
    double wall_time = 0.0;                     ///< seconds; never part of reports
    std::optional<std::string> error;

    bool ok() const noexcept { return !error.has_value(); }
};

struct SuiteConfig {
    std::vector<BenchmarkSpec> tasks;
    std::vector<Method> methods;
    int trials = 21;
    std::uint64_t root_seed = 0;
    RpropConfig rprop;
    ProgressStrip stop;
    GroupShape shape;
    WeightEncoding encoding = WeightEncoding::Exponential;
    Method reference = Method::SMM;
    std::size_t jobs = 1;
    /// Append-only JSON-lines log of finished trials; completed entries with
    /// a matching config hash are reused instead of rerun.
    std::optional<std::filesystem::path> persist_path;
    bool quiet = true;

    /// Digest of every field that affects results (not jobs, paths, quiet).
    std::string config_hash() const;
    void validate() const;
};

struct CellReport {
    std::string task;
    std::string method;
    std::size_t completed = 0;
    std::size_t failed = 0;
    bool complete = false;
    Summary train;
    Summary test;
    /// Paired two-sided Wilcoxon on test MSE against the reference method.
    std::optional<double> p_value;
    std::optional<Summary> active_neurons;
};

struct ExperimentReport {
    std::string config_hash;
    std::uint64_t root_seed = 0;
    int trials = 0;
    std::string reference;
    std::vector<TrialResult> results;  ///< sorted by (task, method, trial)
    std::vector<CellReport> cells;     ///< task-major, methods in suite order

    const CellReport& cell(std::string_view task, std::string_view method) const;

    /// One row per (task, method); MSE columns scaled by 1e3.
    std::string to_csv() const;
    /// Full structure including per-trial rows (without wall times).
    std::string to_json() const;
    /// Long format: task, method, trial, split, mse.
    std::string to_long_csv() const;
};

/// Seed layout: trial t of a task draws its data from
/// RngStream(root_seed, t).split(hash(task id)); every method of that trial
/// shares the data and the initialization stream, so comparisons are
/// paired.
RngStream trial_data_stream(std::uint64_t root_seed, int trial, std::string_view task_id);
RngStream trial_init_stream(std::uint64_t root_seed, int trial, std::string_view task_id);

TrialResult run_trial(const SuiteConfig& cfg, const BenchmarkSpec& task, Method method, int trial);

ExperimentReport run_suite(const SuiteConfig& cfg);

/// Aggregates trial rows into a report. Pure function of its inputs.
ExperimentReport build_report(const SuiteConfig& cfg, std::vector<TrialResult> results);

/// SMM, MM and Iso on f_sq, f_sqrt, f_sig (100 noisy training points, 1000
/// grid test points).
SuiteConfig table1_config(std::uint64_t root_seed);
/// SMM on random degree-2 polynomials with d = 2, 4, 6 (500/1000 points).
SuiteConfig table2_config(std::uint64_t root_seed);

ExperimentReport replicate_table1(std::uint64_t root_seed, std::size_t jobs = 1);
ExperimentReport replicate_table2(std::uint64_t root_seed, std::size_t jobs = 1);

// --- cross-validation on tabular data -----------------------------------------

struct CvConfig {
    std::vector<Method> methods{Method::SMM64, Method::SMM};
    std::size_t folds = 5;
    double val_fraction = 0.25;
    std::uint64_t seed = 0;
    RpropConfig rprop;
    ValidationStop stop;
    GroupShape shape;
    WeightEncoding encoding = WeightEncoding::Exponential;
    int aux_hidden = 64;
    AuxActivation aux_activation = AuxActivation::Tanh;
    std::size_t monotonicity_pairs = 1000;
    std::size_t jobs = 1;
};

struct CvFoldResult {
    std::string method;
    int fold = 0;
    std::size_t param_count = 0;
    double train_mse = 0.0;
    double val_mse = 0.0;
    double test_mse = 0.0;
    double constant_test_mse = 0.0;  ///< predicting the training-target mean
    int epochs = 0;
    int selected_epoch = 0;
    MonotonicityProbe probe;
};

struct CvReport {
    std::vector<CvFoldResult> folds;
    std::string config_hash;

    /// Mean test MSE over folds for a method (normalized target scale).
    double mean_test_mse(std::string_view method) const;
    double mean_constant_mse() const;
    std::string to_csv() const;
    std::string to_json() const;
};

/// k-fold CV with a validation split inside each training portion, per-fold
/// [0,1] normalization fitted on the training rows, validation early
/// stopping and best-model selection. MSE is reported on the normalized
/// scale.
CvReport cross_validate(const Dataset& data, const MonotonicityMask& mask, const CvConfig& cfg);

}  // namespace smm
