#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "smm/dataset.hpp"
#include "smm/error.hpp"
#include "smm/model.hpp"

namespace smm {

/// Rprop constants. Defaults are the usual literature values.
struct RpropConfig {
    double eta_plus = 1.2;
    double eta_minus = 0.5;
    double delta0 = 0.0125;
    double delta_min = 1e-9;
    double delta_max = 50.0;

    void validate() const;
};

struct RpropState {
    RpropConfig config;
    std::vector<double> step_sizes;
    std::vector<std::int8_t> prev_signs;

    RpropState(std::size_t n, const RpropConfig& cfg);
};

/// One Rprop- update (no weight backtracking). Per coordinate:
///   same sign as last time  -> step *= eta_plus  (capped at delta_max)
///   sign flipped            -> step *= eta_minus (floored at delta_min),
///                              remembered sign cleared
///   then param -= sign(g) * step.
void rprop_step(std::span<double> params, std::span<const double> grad, RpropState& state);

/// Stop once the training progress over the last k epochs drops below tau.
struct ProgressStrip {
    int k = 5;
    double tau = 1e-3;
    int max_epochs = 10000;
};

/// Stop once validation MSE has not improved for `patience` epochs; the
/// best-validation parameters are returned.
struct ValidationStop {
    int patience = 100;
    int max_epochs = 5000;
};

using StopRule = std::variant<ProgressStrip, ValidationStop>;

void validate(const StopRule& rule);

/// Training progress over a strip of k epochs:
///   1000 * (sum(E) / (k * min(E)) - 1).
/// Zero when the strip is flat. Throws on empty input or nonpositive losses.
double progress(std::span<const double> history);

enum class StopReason { Progress, ZeroLoss, Patience, MaxEpochs };
std::string_view to_string(StopReason r);

struct TrainTrace {
    struct Row {
        int epoch = 0;
        double train_mse = 0.0;
        std::optional<double> val_mse;
        std::optional<double> beta;
    };

    std::vector<Row> rows;
    StopReason reason = StopReason::MaxEpochs;
    /// Epoch whose parameters were returned.
    int selected_epoch = 0;

    /// Columns: epoch, train_mse, val_mse, beta, stopped_reason. val_mse and
    /// beta are empty when absent; stopped_reason is set on the last row only.
    std::string to_csv() const;
};

class TrainingDiverged : public NumericError {
public:
    TrainingDiverged(std::string block, const std::string& what, TrainTrace trace)
        : NumericError(std::move(block), what), trace_(std::move(trace)) {}
    const TrainTrace& trace() const noexcept { return trace_; }

private:
    TrainTrace trace_;
};

struct TrainConfig {
    RpropConfig rprop;
    StopRule stop = ProgressStrip{};
    /// Initialization stream.
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

struct FitResult {
    ModelParams params;
    TrainTrace trace;
};

/// init_params from (config.seed, config.stream), then full-batch Rprop
/// until the stop rule fires. `val` must be present iff the rule is
/// ValidationStop.
FitResult fit(const Architecture& arch, const Dataset& train, const std::optional<Dataset>& val,
              const TrainConfig& config);

/// Same loop, starting from the given parameters.
FitResult fit_from(ModelParams init, const Dataset& train, const std::optional<Dataset>& val,
                   const TrainConfig& config);

}  // namespace smm
