#pragma once

#include <vector>

#include "smm/dataset.hpp"
#include "smm/model.hpp"

namespace smm {

/// d(MSE)/d(param), laid out like ModelParams::values().
using GradVector = std::vector<double>;

/// (1/n) * sum_i (predict(x_i) - y_i)^2. Throws on an empty dataset.
double mse_loss(const ModelParams& params, const Dataset& data);

struct LossAndGradient {
    double loss = 0.0;
    GradVector grad;
};

/// Exact full-batch gradient of mse_loss by hand-derived reverse mode.
///
/// Smooth variants route the output derivative through the softmax weights
/// of both LogSumExp layers (d LSE_b / d x_i = softmax(b x)_i) and include
/// d/d ln(beta) = sum_kj p_k q_kj a_kj - y. MM routes it through the active
/// neuron only (lowest index on ties, matching active_neuron_stats).
///
/// Per-sample contributions are summed in dataset order, so results are
/// bit-reproducible. Throws NumericError naming the first parameter block
/// with a non-finite entry.
LossAndGradient loss_and_gradient(const ModelParams& params, const Dataset& data);

GradVector backward(const ModelParams& params, const Dataset& data);

}  // namespace smm
