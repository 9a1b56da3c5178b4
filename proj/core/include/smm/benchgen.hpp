#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smm/dataset.hpp"
#include "smm/rng.hpp"

namespace smm {

enum class TargetKind { FSq, FSqrt, FSig, RandomPoly };

std::string_view to_string(TargetKind k);
TargetKind parse_target_kind(std::string_view s);

/// Nonnegative weights over the degree-2 polynomial features of x in
/// [0,1]^d, normalized to sum to one. Feature order is fixed:
///   [1, x_1..x_d, x_1^2..x_d^2, x_i*x_j for i<j in row-major order].
struct RandomPolyTarget {
    std::size_t dim = 0;
    std::vector<double> weights;

    static std::size_t feature_count(std::size_t dim) { return 1 + 2 * dim + dim * (dim - 1) / 2; }
    /// Weights drawn i.i.d. U(0,1), then normalized.
    static RandomPolyTarget draw(std::size_t dim, RngStream& rng);
    double operator()(std::span<const double> x) const;
};

struct BenchmarkSpec {
    TargetKind kind = TargetKind::FSq;
    std::size_t dim = 1;       ///< only used by RandomPoly
    std::size_t n_train = 100;
    std::size_t n_test = 1000;
    double noise_sigma = 0.01;
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    static BenchmarkSpec univariate(TargetKind kind);
    static BenchmarkSpec multivariate(std::size_t dim);
    std::size_t input_dim() const noexcept { return kind == TargetKind::RandomPoly ? dim : 1; }
    /// Short id such as "f_sq" or "poly_d4".
    std::string task_id() const;
    void validate() const;
};

/// f_sq = x^2, f_sqrt = sqrt(x), f_sig = 1/(1+exp(-10(x-1/2))). Throws when
/// x is outside [0,1].
double eval_target(TargetKind kind, double x);
double eval_target(const RandomPolyTarget& target, std::span<const double> x);

struct BenchmarkData {
    Dataset train;
    Dataset test;
    /// Empty for the univariate targets.
    RandomPolyTarget poly;
};

/// Draw order from RngStream(seed, stream): poly weights (RandomPoly only),
/// then per training row the inputs followed by its noise draw, then the
/// multivariate test inputs. Univariate test data is the noise-free grid
/// 0, 1/(n-1), ..., 1.
BenchmarkData make_dataset(const BenchmarkSpec& spec);

struct FoldSplit {
    Dataset train;
    Dataset val;
    Dataset test;
};

/// Shuffled k-fold split where each training portion is split again into
/// train/val, e.g. 60:20:20 for folds=5, val_fraction=0.25. Fold sizes
/// differ by at most one; the assignment depends only on the seed.
std::vector<FoldSplit> kfold_with_validation(const Dataset& data, std::size_t folds, double val_fraction,
                                             std::uint64_t seed);

/// Synthetic partial-monotone regression data on [0,1]^dim: a RandomPoly
/// target over the constrained features (the first n_constrained columns)
/// plus a non-monotone nuisance term over the free ones, plus N(0, sigma^2)
/// noise. Column names are x1..xd, target y.
struct PartialMonotoneSpec {
    std::size_t dim = 8;
    std::size_t n_constrained = 3;
    std::size_t n = 768;
    double noise_sigma = 0.01;
    std::uint64_t seed = 0;
};

Dataset make_partial_monotone_dataset(const PartialMonotoneSpec& spec);

}  // namespace smm
