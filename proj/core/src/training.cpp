#include "smm/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "smm/gradients.hpp"
#include "smm/io.hpp"

namespace smm {

void RpropConfig::validate() const {
    detail::require(eta_minus > 0.0 && eta_minus < 1.0 && eta_plus > 1.0, "rprop: need 0 < eta_minus < 1 < eta_plus");
    detail::require(delta_min > 0.0 && delta_min <= delta0 && delta0 <= delta_max,
                    "rprop: need 0 < delta_min <= delta0 <= delta_max");
}

RpropState::RpropState(std::size_t n, const RpropConfig& cfg)
    : config(cfg), step_sizes(n, cfg.delta0), prev_signs(n, 0) {
    config.validate();
}

void rprop_step(std::span<double> params, std::span<const double> grad, RpropState& state) {
    detail::require(params.size() == grad.size() && grad.size() == state.step_sizes.size(),
                    "rprop_step: size mismatch");
    const auto& cfg = state.config;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const std::int8_t s = grad[i] > 0.0 ? 1 : (grad[i] < 0.0 ? -1 : 0);
        const int agreement = s * state.prev_signs[i];
        double& step = state.step_sizes[i];
        if (agreement > 0) {
            step = std::min(step * cfg.eta_plus, cfg.delta_max);
        } else if (agreement < 0) {
            step = std::max(step * cfg.eta_minus, cfg.delta_min);
            state.prev_signs[i] = 0;
            params[i] -= s * step;
            continue;
        }
        params[i] -= s * step;
        state.prev_signs[i] = s;
    }
}

void validate(const StopRule& rule) {
    if (const auto* p = std::get_if<ProgressStrip>(&rule)) {
        detail::require(p->k >= 1, "progress strip: k must be at least 1");
        detail::require(p->tau > 0.0, "progress strip: tau must be positive");
        detail::require(p->max_epochs >= 1, "progress strip: max_epochs must be positive");
    } else {
        const auto& v = std::get<ValidationStop>(rule);
        detail::require(v.patience >= 1, "validation stop: patience must be at least 1");
        detail::require(v.max_epochs >= 1, "validation stop: max_epochs must be positive");
    }
}

double progress(std::span<const double> history) {
    detail::require(!history.empty(), "progress: empty history");
    double sum = 0.0;
    double lo = history.front();
    for (double e : history) {
        detail::require(e > 0.0, "progress: losses must be positive");
        sum += e;
        lo = std::min(lo, e);
    }
    return 1000.0 * (sum / (static_cast<double>(history.size()) * lo) - 1.0);
}

std::string_view to_string(StopReason r) {
    switch (r) {
        case StopReason::Progress: return "progress";
        case StopReason::ZeroLoss: return "zero_loss";
        case StopReason::Patience: return "patience";
        case StopReason::MaxEpochs: return "max_epochs";
    }
    return "?";
}

std::string TrainTrace::to_csv() const {
    std::string out = "epoch,train_mse,val_mse,beta,stopped_reason\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        out += std::to_string(r.epoch);
        out += ',';
        out += format_double(r.train_mse);
        out += ',';
        if (r.val_mse) out += format_double(*r.val_mse);
        out += ',';
        if (r.beta) out += format_double(*r.beta);
        out += ',';
        if (i + 1 == rows.size()) out += to_string(reason);
        out += '\n';
    }
    return out;
}

namespace {

void assert_monotone_weights(const ModelParams& p) {
    // Constrained weights are decoded, so this only fails on non-finite z.
    const auto& mask = p.architecture().mask;
    for (std::size_t n = 0; n < p.layout().neurons; ++n)
        for (std::size_t m : mask.constrained_indices())
            if (!(p.weight(n, m) >= 0.0)) throw NumericError("z", "fit: constrained weight left the nonnegative range");
}

}  // namespace

FitResult fit_from(ModelParams init, const Dataset& train, const std::optional<Dataset>& val,
                   const TrainConfig& config) {
    validate(config.stop);
    const bool use_val = std::holds_alternative<ValidationStop>(config.stop);
    detail::require(use_val == val.has_value(), "fit: a validation set is required iff the stop rule is validation-based");
    detail::require(!train.empty(), "fit: empty training set");

    ModelParams params = std::move(init);
    RpropState state(params.size(), config.rprop);
    TrainTrace trace;
    std::vector<double> strip;

    const int max_epochs = use_val ? std::get<ValidationStop>(config.stop).max_epochs
                                   : std::get<ProgressStrip>(config.stop).max_epochs;
    std::optional<ModelParams> best;
    double best_val = INFINITY;
    int best_epoch = 0;

    for (int epoch = 1;; ++epoch) {
        LossAndGradient lg;
        try {
            lg = loss_and_gradient(params, train);
        } catch (const NumericError& e) {
            throw TrainingDiverged(e.block(), std::string("fit: training diverged: ") + e.what(), trace);
        }
        TrainTrace::Row row;
        row.epoch = epoch;
        row.train_mse = lg.loss;
        if (params.architecture().has_beta()) row.beta = params.beta();
        if (use_val) {
            const double v = mse_loss(params, *val);
            if (!std::isfinite(v)) throw TrainingDiverged("loss", "fit: validation loss is not finite", trace);
            row.val_mse = v;
            if (v < best_val) {
                best_val = v;
                best_epoch = epoch;
                best = params;
            }
        }
        trace.rows.push_back(row);

        std::optional<StopReason> stop;
        if (lg.loss == 0.0) {
            stop = StopReason::ZeroLoss;
        } else if (use_val) {
            if (epoch - best_epoch >= std::get<ValidationStop>(config.stop).patience) stop = StopReason::Patience;
        } else {
            const auto& rule = std::get<ProgressStrip>(config.stop);
            strip.push_back(lg.loss);
            if (strip.size() > static_cast<std::size_t>(rule.k)) strip.erase(strip.begin());
            if (strip.size() == static_cast<std::size_t>(rule.k) && progress(strip) < rule.tau)
                stop = StopReason::Progress;
        }
        if (!stop && epoch >= max_epochs) stop = StopReason::MaxEpochs;

        if (stop) {
            trace.reason = *stop;
            if (use_val) {
                params = std::move(*best);
                trace.selected_epoch = best_epoch;
            } else {
                trace.selected_epoch = epoch;
            }
            break;
        }
        rprop_step(params.values(), lg.grad, state);
    }

    assert_monotone_weights(params);
    return {std::move(params), std::move(trace)};
}

FitResult fit(const Architecture& arch, const Dataset& train, const std::optional<Dataset>& val,
              const TrainConfig& config) {
    RngStream rng(config.seed, config.stream);
    return fit_from(init_params(arch, rng), train, val, config);
}

}  // namespace smm
