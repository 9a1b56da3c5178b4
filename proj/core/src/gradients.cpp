#include "smm/gradients.hpp"

#include <cmath>
#include <string>

#include "kernel.hpp"
#include "smm/error.hpp"

namespace smm {

namespace {

void check_inputs(const ModelParams& params, const Dataset& data, const char* who) {
    if (data.empty()) throw ContractViolation(std::string(who) + ": empty dataset");
    if (data.dim != params.architecture().input_dim())
        throw ContractViolation(std::string(who) + ": dataset dimension does not match the model");
}

}  // namespace

double mse_loss(const ModelParams& params, const Dataset& data) {
    check_inputs(params, data, "mse_loss");
    Kernel k(params);
    ForwardCache c(k);
    double sum = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double r = k.forward(data.row(i), c) - data.targets[i];
        sum += r * r;
    }
    return sum / static_cast<double>(data.size());
}

LossAndGradient loss_and_gradient(const ModelParams& params, const Dataset& data) {
    check_inputs(params, data, "backward");
    Kernel k(params);
    ForwardCache c(k);
    LossAndGradient out;
    out.grad.assign(params.size(), 0.0);
    const double scale = 2.0 / static_cast<double>(data.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const auto x = data.row(i);
        const double r = k.forward(x, c) - data.targets[i];
        sum += r * r;
        k.accumulate(x, c, scale * r, out.grad);
    }
    k.finish_gradient(out.grad);
    out.loss = sum / static_cast<double>(data.size());

    if (!std::isfinite(out.loss)) throw NumericError("loss", "backward: loss is not finite");
    const auto& L = params.layout();
    for (std::size_t i = 0; i < out.grad.size(); ++i) {
        if (!std::isfinite(out.grad[i])) {
            const std::string block(L.block_of(i));
            throw NumericError(block, "backward: non-finite gradient in parameter block '" + block +
                                          "' (index " + std::to_string(i) + ")");
        }
    }
    return out;
}

GradVector backward(const ModelParams& params, const Dataset& data) {
    return loss_and_gradient(params, data).grad;
}

}  // namespace smm
