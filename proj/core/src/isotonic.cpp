#include "smm/isotonic.hpp"

#include <algorithm>
#include <numeric>

#include "smm/error.hpp"

namespace smm {

std::vector<double> pava(std::span<const double> values, std::span<const double> weights) {
    detail::require(values.size() == weights.size(), "pava: values and weights differ in length");
    struct Block {
        double sum;
        double weight;
        std::size_t count;
        double mean() const { return sum / weight; }
    };
    std::vector<Block> blocks;
    blocks.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        blocks.push_back({values[i] * weights[i], weights[i], 1});
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() > blocks.back().mean()) {
            const Block top = blocks.back();
            blocks.pop_back();
            blocks.back().sum += top.sum;
            blocks.back().weight += top.weight;
            blocks.back().count += top.count;
        }
    }
    std::vector<double> out;
    out.reserve(values.size());
    for (const auto& b : blocks) out.insert(out.end(), b.count, b.mean());
    return out;
}

IsotonicFit pava_fit(std::span<const double> xs, std::span<const double> ys, std::pair<double, double> y_range) {
    detail::require(xs.size() == ys.size(), "pava_fit: xs and ys differ in length");
    detail::require(!xs.empty(), "pava_fit: need at least one sample");
    detail::require(y_range.first <= y_range.second, "pava_fit: empty y_range");

    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });

    IsotonicFit fit;
    fit.y_range = y_range;
    std::vector<double> means;
    std::vector<double> weights;
    for (std::size_t i = 0; i < order.size();) {
        const double x = xs[order[i]];
        double sum = 0.0;
        std::size_t n = 0;
        for (; i < order.size() && xs[order[i]] == x; ++i, ++n) sum += ys[order[i]];
        fit.breakpoints.push_back(x);
        means.push_back(sum / static_cast<double>(n));
        weights.push_back(static_cast<double>(n));
    }
    fit.levels = pava(means, weights);
    for (double& v : fit.levels) v = std::clamp(v, y_range.first, y_range.second);
    return fit;
}

double iso_predict(const IsotonicFit& fit, double x, IsoInterpolation mode) {
    detail::require(!fit.levels.empty() && fit.levels.size() == fit.breakpoints.size(), "iso_predict: invalid fit");
    const auto& bp = fit.breakpoints;
    const auto it = std::upper_bound(bp.begin(), bp.end(), x);
    if (it == bp.begin()) return fit.levels.front();
    const auto i = static_cast<std::size_t>(it - bp.begin()) - 1;
    if (mode == IsoInterpolation::Step || it == bp.end()) return fit.levels[i];
    const double t = (x - bp[i]) / (bp[i + 1] - bp[i]);
    return fit.levels[i] + t * (fit.levels[i + 1] - fit.levels[i]);
}

}  // namespace smm
