#pragma once

#include <span>

#include "smm/rng.hpp"

namespace smm {

/// Scaled LogSumExp, a smooth strict upper bound of max(values):
///   (1/beta) * log(sum_i exp(beta * x_i)),
/// stabilized by shifting with c = beta * max(values).
/// Throws ContractViolation on empty input, non-finite input or beta <= 0.
double lse_scaled(std::span<const double> values, double beta);

/// Scaled LogSumExp with scaling -beta, a smooth strict lower bound of
/// min(values). Stabilized with c = -beta * min(values).
double lse_scaled_neg(std::span<const double> values, double beta);

/// Same as lse_scaled, but also writes the softmax weights
/// d(lse)/d(values_i) into `weights` (same length as values). No contract
/// checks; this is the hot-path form used by the models.
double lse_with_weights(std::span<const double> values, double beta, std::span<double> weights);

/// lse_scaled_neg counterpart of lse_with_weights.
double lse_neg_with_weights(std::span<const double> values, double beta,
                            std::span<double> weights);

/// Logistic function 1/(1+exp(-x)), evaluated without overflow for any
/// finite x.
double sigmoid(double x) noexcept;

/// Standard normal conditioned on [lo, hi], by rejection sampling.
/// Requires lo < hi.
double sample_truncated_gaussian(RngStream& rng, double lo, double hi);

}  // namespace smm
