#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "smm/error.hpp"
#include "smm/training.hpp"

namespace smm::cli {

/// Malformed or missing configuration; the message names the field or line.
class ConfigError : public ContractViolation {
public:
    using ContractViolation::ContractViolation;
};

struct DataSection {
    std::string task = "f_sq";  ///< f_sq, f_sqrt, f_sig, poly, partial_monotone
    std::optional<std::size_t> dim;
    std::optional<std::size_t> n_train;
    std::optional<std::size_t> n_test;
    double noise_sigma = 0.01;
    std::optional<std::string> train_path;
    std::optional<std::string> val_path;
    std::optional<std::string> test_path;
    std::optional<std::string> mask_path;
    bool normalize = false;
    double val_fraction = 0.25;  ///< held out of train when no val_path is given
};

struct ModelSection {
    std::string variant = "smm";
    int groups = 6;
    int neurons_per_group = 6;
    std::optional<std::vector<int>> shape;  ///< overrides groups x neurons_per_group
    std::string encoding = "exponential";
    int aux_hidden = 64;
    std::string aux_activation = "tanh";
};

struct TrainSection {
    RpropConfig rprop;
    std::string stop = "progress";  ///< progress or validation
    int k = 5;
    double tau = 1e-3;
    int patience = 100;
    std::optional<int> max_epochs;  ///< 10000 for progress, 5000 for validation
};

struct SuiteSection {
    std::string name = "table1";  ///< table1, table2, uci
    int trials = 21;
    std::optional<std::vector<std::string>> methods;
    std::size_t folds = 5;
    double val_fraction = 0.25;
    std::size_t monotonicity_pairs = 1000;
};

struct RunConfig {
    std::uint64_t seed = 0;
    DataSection data;
    ModelSection model;
    TrainSection train;
    SuiteSection suite;

    /// Fully resolved configuration, keys sorted.
    std::string canonical_json() const;
    std::string hash() const;
};

/// Parses a JSON document; unknown keys and type mismatches are errors.
RunConfig parse_config(const std::string& text, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

}  // namespace smm::cli
