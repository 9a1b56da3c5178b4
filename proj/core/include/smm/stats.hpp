#pragma once

#include <span>
#include <vector>

namespace smm {

/// Sample quantile with linear interpolation between order statistics
/// (h = (n-1)p; the same rule as numpy's default and R type 7).
double quantile(std::span<const double> values, double p);

struct Summary {
    double median = 0.0;
    double q1 = 0.0;
    double q3 = 0.0;
    double min = 0.0;
    double max = 0.0;
    /// Values beyond 1.5 interquartile ranges from the box, in input order.
    std::vector<double> outliers;
};

Summary summarize(std::span<const double> values);

/// Two-sided paired Wilcoxon signed-rank test on a - b.
///
/// Zero differences are dropped; tied magnitudes get midranks. With at most
/// 25 nonzero differences the p-value is exact, from the permutation
/// distribution of the positive rank sum (enumerated by dynamic
/// programming over doubled midranks, so ties stay exact). Above that, the
/// normal approximation with tie-corrected variance and no continuity
/// correction is used. p = min(1, 2 * min(P(W <= w), P(W >= w))).
/// Returns 1 when every difference is zero. Requires |a| = |b| >= 5.
double wilcoxon_paired(std::span<const double> a, std::span<const double> b);

}  // namespace smm
