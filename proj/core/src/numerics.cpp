#include "smm/numerics.hpp"

#include <algorithm>
#include <cmath>

#include "smm/error.hpp"

namespace smm {

namespace {

void check_lse_args(std::span<const double> values, double beta) {
    detail::require(!values.empty(), "lse: empty input sequence");
    detail::require(beta > 0.0 && std::isfinite(beta), "lse: beta must be positive and finite");
    for (double v : values) detail::require(std::isfinite(v), "lse: non-finite input value");
}

double standard_normal_mass(double lo, double hi) {
    return 0.5 * (std::erfc(-hi / std::sqrt(2.0)) - std::erfc(-lo / std::sqrt(2.0)));
}

}  // namespace

double lse_with_weights(std::span<const double> values, double beta, std::span<double> weights) {
    const double m = *std::max_element(values.begin(), values.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        weights[i] = std::exp(beta * (values[i] - m));
        sum += weights[i];
    }
    const double inv = 1.0 / sum;
    for (std::size_t i = 0; i < values.size(); ++i) weights[i] *= inv;
    return m + std::log(sum) / beta;
}

double lse_neg_with_weights(std::span<const double> values, double beta,
                            std::span<double> weights) {
    const double m = *std::min_element(values.begin(), values.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        weights[i] = std::exp(-beta * (values[i] - m));
        sum += weights[i];
    }
    const double inv = 1.0 / sum;
    for (std::size_t i = 0; i < values.size(); ++i) weights[i] *= inv;
    return m - std::log(sum) / beta;
}

double lse_scaled(std::span<const double> values, double beta) {
    check_lse_args(values, beta);
    const double m = *std::max_element(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += std::exp(beta * (v - m));
    return m + std::log(sum) / beta;
}

double lse_scaled_neg(std::span<const double> values, double beta) {
    check_lse_args(values, beta);
    const double m = *std::min_element(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values) sum += std::exp(-beta * (v - m));
    return m - std::log(sum) / beta;
}

double sigmoid(double x) noexcept {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double sample_truncated_gaussian(RngStream& rng, double lo, double hi) {
    detail::require(lo < hi, "sample_truncated_gaussian: requires lo < hi");

    // Plain rejection from N(0,1) when the interval holds enough mass
    // (about 0.954 for [-2, 2]).
    if (standard_normal_mass(lo, hi) >= 0.25) {
        for (;;) {
            const double z = rng.normal();
            if (z >= lo && z <= hi) return z;
        }
    }

    // Work on the nonnegative side; mirror back at the end.
    const bool mirrored = hi <= 0.0;
    const double a = mirrored ? -hi : lo;
    const double b = mirrored ? -lo : hi;

    // Uniform proposal against the density peak inside [a, b].
    const double peak = std::max(a, 0.0);
    const double alpha = 0.5 * (peak + std::sqrt(peak * peak + 4.0));
    if (a <= 0.0 || (b - a) * alpha < 1.0) {
        for (;;) {
            const double z = rng.uniform(a, b);
            const double u = rng.uniform();
            if (u <= std::exp(0.5 * (peak * peak - z * z))) return mirrored ? -z : z;
        }
    }

    // Far tail: translated exponential proposal with the optimal rate.
    for (;;) {
        const double z = a - std::log1p(-rng.uniform()) / alpha;
        if (z > b) continue;
        const double u = rng.uniform();
        if (u <= std::exp(-0.5 * (z - alpha) * (z - alpha))) return mirrored ? -z : z;
    }
}

}  // namespace smm
