#pragma once

// Independent reference implementations used only by tests.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "smm/dataset.hpp"
#include "smm/model.hpp"

namespace smm::oracle {

/// (1/beta) log sum exp(beta x_i) in 50-digit arithmetic, no shifting.
double lse_multiprecision(std::span<const double> values, double beta);

/// Central differences of f at p, one coordinate at a time.
std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                       std::vector<double> p, double h);

/// Loss of a model evaluated directly from neuron_activation, with its own
/// min/max/LSE code path.
double reference_mse(const ModelParams& params, const Dataset& data);

/// Hard min-max selection margin at x: how far every activation is from
/// changing which neuron is selected. 0 at an exact tie.
double mm_tie_margin(const ModelParams& params, std::span<const double> x);

/// Least-squares nondecreasing fit by enumerating every partition of the
/// (x-pooled) sequence into contiguous blocks. Returns one level per
/// distinct sorted x.
std::vector<double> isotonic_exhaustive(std::span<const double> xs, std::span<const double> ys);

/// Two-sided signed-rank p-value by enumerating all 2^n sign assignments.
double wilcoxon_enumerate(std::span<const double> a, std::span<const double> b);

}  // namespace smm::oracle
