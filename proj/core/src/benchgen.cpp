#include "smm/benchgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "smm/error.hpp"

namespace smm {

std::string_view to_string(TargetKind k) {
    switch (k) {
        case TargetKind::FSq: return "f_sq";
        case TargetKind::FSqrt: return "f_sqrt";
        case TargetKind::FSig: return "f_sig";
        case TargetKind::RandomPoly: return "poly";
    }
    return "?";
}

TargetKind parse_target_kind(std::string_view s) {
    if (s == "f_sq") return TargetKind::FSq;
    if (s == "f_sqrt") return TargetKind::FSqrt;
    if (s == "f_sig") return TargetKind::FSig;
    if (s == "poly") return TargetKind::RandomPoly;
    throw ContractViolation("unknown target '" + std::string(s) + "' (expected f_sq, f_sqrt, f_sig or poly)");
}

RandomPolyTarget RandomPolyTarget::draw(std::size_t dim, RngStream& rng) {
    detail::require(dim >= 1, "random poly: dim must be at least 1");
    RandomPolyTarget t;
    t.dim = dim;
    t.weights.resize(feature_count(dim));
    for (double& w : t.weights) w = rng.uniform();
    const double sum = std::accumulate(t.weights.begin(), t.weights.end(), 0.0);
    for (double& w : t.weights) w /= sum;
    return t;
}

double RandomPolyTarget::operator()(std::span<const double> x) const {
    detail::require(x.size() == dim, "random poly: input dimension mismatch");
    std::size_t f = 0;
    double y = weights[f++];
    for (std::size_t i = 0; i < dim; ++i) y += weights[f++] * x[i];
    for (std::size_t i = 0; i < dim; ++i) y += weights[f++] * x[i] * x[i];
    for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = i + 1; j < dim; ++j) y += weights[f++] * x[i] * x[j];
    return std::clamp(y, 0.0, 1.0);
}

BenchmarkSpec BenchmarkSpec::univariate(TargetKind kind) {
    BenchmarkSpec s;
    s.kind = kind;
    s.dim = 1;
    s.n_train = 100;
    return s;
}

BenchmarkSpec BenchmarkSpec::multivariate(std::size_t dim) {
    BenchmarkSpec s;
    s.kind = TargetKind::RandomPoly;
    s.dim = dim;
    s.n_train = 500;
    return s;
}

std::string BenchmarkSpec::task_id() const {
    if (kind == TargetKind::RandomPoly) return "poly_d" + std::to_string(dim);
    return std::string(to_string(kind));
}

void BenchmarkSpec::validate() const {
    detail::require(n_train >= 1, "benchmark spec: n_train must be positive");
    detail::require(n_test >= 2, "benchmark spec: n_test must be at least 2");
    detail::require(noise_sigma >= 0.0, "benchmark spec: noise_sigma must be nonnegative");
    detail::require(kind != TargetKind::RandomPoly || dim >= 1, "benchmark spec: poly needs dim >= 1");
}

namespace {

void require_unit(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw ContractViolation("target: input outside [0, 1]");
}

}  // namespace

double eval_target(TargetKind kind, double x) {
    require_unit(x);
    switch (kind) {
        case TargetKind::FSq: return x * x;
        case TargetKind::FSqrt: return std::sqrt(x);
        case TargetKind::FSig: return 1.0 / (1.0 + std::exp(-10.0 * (x - 0.5)));
        case TargetKind::RandomPoly: break;
    }
    throw ContractViolation("eval_target: RandomPoly needs its drawn weights");
}

double eval_target(const RandomPolyTarget& target, std::span<const double> x) {
    for (double v : x) require_unit(v);
    return target(x);
}

BenchmarkData make_dataset(const BenchmarkSpec& spec) {
    spec.validate();
    RngStream rng(spec.seed, spec.stream);
    BenchmarkData out;
    const std::size_t d = spec.input_dim();
    if (spec.kind == TargetKind::RandomPoly) out.poly = RandomPolyTarget::draw(d, rng);

    auto f = [&](std::span<const double> x) {
        return spec.kind == TargetKind::RandomPoly ? eval_target(out.poly, x) : eval_target(spec.kind, x[0]);
    };
    auto init = [&](Dataset& ds, const std::string& part) {
        ds.dim = d;
        for (std::size_t m = 0; m < d; ++m) ds.feature_names.push_back("x" + std::to_string(m + 1));
        ds.provenance = "bench:" + spec.task_id() + ":" + part + ":seed=" + std::to_string(spec.seed) +
                        ":stream=" + std::to_string(spec.stream);
    };
    init(out.train, "train");
    init(out.test, "test");

    std::vector<double> x(d);
    for (std::size_t i = 0; i < spec.n_train; ++i) {
        for (double& v : x) v = rng.uniform();
        const double noise = spec.noise_sigma > 0.0 ? spec.noise_sigma * rng.normal() : 0.0;
        out.train.push_back(x, f(x) + noise);
    }
    if (d == 1) {
        for (std::size_t i = 0; i < spec.n_test; ++i) {
            x[0] = static_cast<double>(i) / static_cast<double>(spec.n_test - 1);
            out.test.push_back(x, f(x));
        }
    } else {
        for (std::size_t i = 0; i < spec.n_test; ++i) {
            for (double& v : x) v = rng.uniform();
            out.test.push_back(x, f(x));
        }
    }
    return out;
}

std::vector<FoldSplit> kfold_with_validation(const Dataset& data, std::size_t folds, double val_fraction,
                                             std::uint64_t seed) {
    detail::require(folds >= 2, "kfold: need at least two folds");
    detail::require(data.size() >= folds, "kfold: fewer rows than folds");
    detail::require(val_fraction >= 0.0 && val_fraction < 1.0, "kfold: val_fraction must be in [0, 1)");

    std::vector<std::size_t> perm(data.size());
    std::iota(perm.begin(), perm.end(), 0);
    RngStream rng(seed, 0);
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);

    const std::size_t base = data.size() / folds;
    const std::size_t extra = data.size() % folds;
    std::vector<FoldSplit> out;
    std::size_t start = 0;
    for (std::size_t f = 0; f < folds; ++f) {
        const std::size_t len = base + (f < extra ? 1 : 0);
        std::vector<std::size_t> test(perm.begin() + static_cast<std::ptrdiff_t>(start),
                                      perm.begin() + static_cast<std::ptrdiff_t>(start + len));
        std::vector<std::size_t> rest;
        rest.insert(rest.end(), perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(start));
        rest.insert(rest.end(), perm.begin() + static_cast<std::ptrdiff_t>(start + len), perm.end());
        const auto n_val = static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(rest.size())));
        std::span<const std::size_t> rest_view(rest);
        out.push_back({data.subset(rest_view.subspan(n_val)), data.subset(rest_view.first(n_val)), data.subset(test)});
        start += len;
    }
    return out;
}

Dataset make_partial_monotone_dataset(const PartialMonotoneSpec& spec) {
    detail::require(spec.n_constrained >= 1 && spec.n_constrained < spec.dim,
                    "partial monotone data: need 1 <= n_constrained < dim");
    RngStream rng(spec.seed, 0);
    const std::size_t free = spec.dim - spec.n_constrained;
    const RandomPolyTarget poly = RandomPolyTarget::draw(spec.n_constrained, rng);
    std::vector<double> phase(free);
    for (double& p : phase) p = rng.uniform(0.0, 2.0 * std::numbers::pi);

    Dataset data;
    data.dim = spec.dim;
    for (std::size_t m = 0; m < spec.dim; ++m) data.feature_names.push_back("x" + std::to_string(m + 1));
    data.provenance = "partial_monotone:seed=" + std::to_string(spec.seed);
    std::vector<double> x(spec.dim);
    for (std::size_t i = 0; i < spec.n; ++i) {
        for (double& v : x) v = rng.uniform();
        double nuisance = 0.0;
        for (std::size_t u = 0; u < free; ++u)
            nuisance += std::sin(2.0 * std::numbers::pi * x[spec.n_constrained + u] + phase[u]);
        nuisance = 0.5 + 0.5 * nuisance / static_cast<double>(free);
        const double y = 0.7 * poly(std::span<const double>(x).first(spec.n_constrained)) + 0.3 * nuisance;
        data.push_back(x, y + spec.noise_sigma * rng.normal());
    }
    return data;
}

}  // namespace smm
