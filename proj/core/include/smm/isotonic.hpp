#pragma once

#include <span>
#include <utility>
#include <vector>

namespace smm {

/// Isotonic regression fit: nondecreasing levels at the distinct training x.
struct IsotonicFit {
    std::vector<double> breakpoints;  ///< distinct sorted x values
    std::vector<double> levels;       ///< nondecreasing fitted values, one per breakpoint
    std::pair<double, double> y_range{0.0, 1.0};
};

/// Least-squares nondecreasing fit by pool-adjacent-violators. Samples are
/// sorted by x; equal x values are pooled into one weighted point first.
/// Levels are clamped to y_range afterwards (clamping an isotonic solution
/// to a box is still the box-constrained least-squares solution).
IsotonicFit pava_fit(std::span<const double> xs, std::span<const double> ys, std::pair<double, double> y_range);

/// Weighted PAVA on already-ordered values. Returns one level per input.
std::vector<double> pava(std::span<const double> values, std::span<const double> weights);

enum class IsoInterpolation {
    Linear,  ///< straight lines between breakpoints
    Step,    ///< level of the rightmost breakpoint <= x
};

/// Prediction between breakpoints per `mode`; constant outside the first
/// and last breakpoint in both modes.
double iso_predict(const IsotonicFit& fit, double x, IsoInterpolation mode = IsoInterpolation::Linear);

}  // namespace smm
