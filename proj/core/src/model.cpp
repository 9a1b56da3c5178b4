#include "smm/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "kernel.hpp"
#include "smm/dataset.hpp"
#include "smm/error.hpp"
#include "smm/numerics.hpp"

namespace smm {

std::string_view to_string(Variant v) {
    switch (v) {
        case Variant::MM: return "mm";
        case Variant::SMM: return "smm";
        case Variant::SMM64: return "smm64";
    }
    return "?";
}

std::string_view to_string(WeightEncoding e) {
    switch (e) {
        case WeightEncoding::Exponential: return "exponential";
        case WeightEncoding::Squared: return "squared";
        case WeightEncoding::ExpLinear: return "exp_linear";
    }
    return "?";
}

std::string_view to_string(AuxActivation a) {
    switch (a) {
        case AuxActivation::Tanh: return "tanh";
        case AuxActivation::Logistic: return "logistic";
    }
    return "?";
}

Variant parse_variant(std::string_view s) {
    if (s == "mm") return Variant::MM;
    if (s == "smm") return Variant::SMM;
    if (s == "smm64") return Variant::SMM64;
    throw ContractViolation("unknown variant '" + std::string(s) + "' (expected mm, smm or smm64)");
}

WeightEncoding parse_encoding(std::string_view s) {
    if (s == "exponential") return WeightEncoding::Exponential;
    if (s == "squared") return WeightEncoding::Squared;
    if (s == "exp_linear") return WeightEncoding::ExpLinear;
    throw ContractViolation("unknown weight encoding '" + std::string(s) + "'");
}

AuxActivation parse_aux_activation(std::string_view s) {
    if (s == "tanh") return AuxActivation::Tanh;
    if (s == "logistic") return AuxActivation::Logistic;
    throw ContractViolation("unknown aux activation '" + std::string(s) + "'");
}

double decode_weight(WeightEncoding enc, double z) noexcept {
    switch (enc) {
        case WeightEncoding::Exponential: return std::exp(z);
        case WeightEncoding::Squared: return z * z;
        case WeightEncoding::ExpLinear: return z > 0.0 ? z + 1.0 : std::exp(z);
    }
    return 0.0;
}

double decode_weight_derivative(WeightEncoding enc, double z) noexcept {
    switch (enc) {
        case WeightEncoding::Exponential: return std::exp(z);
        case WeightEncoding::Squared: return 2.0 * z;
        case WeightEncoding::ExpLinear: return z > 0.0 ? 1.0 : std::exp(z);
    }
    return 0.0;
}

// --- GroupShape / mask / architecture ---------------------------------------

GroupShape GroupShape::uniform(int groups, int per_group) {
    return GroupShape(std::vector<int>(static_cast<std::size_t>(std::max(groups, 0)), per_group));
}

int GroupShape::total() const noexcept { return std::accumulate(neurons.begin(), neurons.end(), 0); }

int GroupShape::widest() const noexcept {
    return neurons.empty() ? 0 : *std::max_element(neurons.begin(), neurons.end());
}

void GroupShape::validate() const {
    detail::require(!neurons.empty(), "group shape: need at least one group");
    for (int h : neurons) detail::require(h >= 1, "group shape: every group needs at least one neuron");
}

std::size_t MonotonicityMask::constrained_count() const noexcept {
    return static_cast<std::size_t>(std::count(flags_.begin(), flags_.end(), true));
}

std::vector<std::size_t> MonotonicityMask::free_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t m = 0; m < flags_.size(); ++m)
        if (!flags_[m]) out.push_back(m);
    return out;
}

std::vector<std::size_t> MonotonicityMask::constrained_indices() const {
    std::vector<std::size_t> out;
    for (std::size_t m = 0; m < flags_.size(); ++m)
        if (flags_[m]) out.push_back(m);
    return out;
}

void Architecture::validate() const {
    shape.validate();
    detail::require(mask.size() >= 1, "architecture: input dimension must be at least 1");
    if (variant == Variant::SMM64) {
        detail::require(mask.free_count() >= 1,
                        "architecture: smm64 needs at least one unconstrained feature");
        detail::require(aux_hidden >= 1, "architecture: aux_hidden must be positive");
    }
}

ParamLayout::ParamLayout(const Architecture& arch) {
    neurons = static_cast<std::size_t>(arch.shape.total());
    dim = arch.input_dim();
    z = 0;
    bias = z + neurons * dim;
    ln_beta = bias + neurons;
    aux_w1 = ln_beta + (arch.has_beta() ? 1 : 0);
    if (arch.has_aux()) {
        const auto h = static_cast<std::size_t>(arch.aux_hidden);
        aux_b1 = aux_w1 + h * arch.mask.free_count();
        aux_w2 = aux_b1 + h;
        aux_b2 = aux_w2 + h;
        total = aux_b2 + 1;
    } else {
        aux_b1 = aux_w2 = aux_b2 = total = aux_w1;
    }
}

std::string_view ParamLayout::block_of(std::size_t i) const noexcept {
    if (i < bias) return "z";
    if (i < ln_beta) return "bias";
    if (i < aux_w1) return "ln_beta";
    if (i < aux_b1) return "aux_w1";
    if (i < aux_w2) return "aux_b1";
    if (i < aux_b2) return "aux_w2";
    if (i < total) return "aux_b2";
    return "out_of_range";
}

// --- ModelParams -------------------------------------------------------------

ModelParams::ModelParams(Architecture arch)
    : arch_((arch.validate(), std::move(arch))), layout_(arch_), values_(layout_.total, 0.0) {}

ModelParams::ModelParams(Architecture arch, std::vector<double> values)
    : arch_((arch.validate(), std::move(arch))), layout_(arch_), values_(std::move(values)) {
    detail::require(values_.size() == layout_.total, "model params: value count does not match architecture");
}

std::size_t ModelParams::neuron_index(int k, int j) const {
    const auto& h = arch_.shape.neurons;
    detail::require(k >= 0 && k < static_cast<int>(h.size()), "neuron index: group out of range");
    detail::require(j >= 0 && j < h[static_cast<std::size_t>(k)], "neuron index: neuron out of range");
    return static_cast<std::size_t>(std::accumulate(h.begin(), h.begin() + k, 0) + j);
}

double& ModelParams::ln_beta() {
    detail::require(arch_.has_beta(), "ln_beta: variant has no beta parameter");
    return values_[layout_.ln_beta];
}

double ModelParams::ln_beta() const {
    detail::require(arch_.has_beta(), "ln_beta: variant has no beta parameter");
    return values_[layout_.ln_beta];
}

double ModelParams::beta() const { return std::exp(ln_beta()); }

double ModelParams::weight(std::size_t neuron, std::size_t m) const {
    const double raw = z(neuron, m);
    return arch_.mask.constrained(m) ? decode_weight(arch_.encoding, raw) : raw;
}

std::size_t count_params(const Architecture& arch) {
    arch.validate();
    const auto d = arch.input_dim();
    std::size_t n = (d + 1) * static_cast<std::size_t>(arch.shape.total());
    if (arch.has_beta()) n += 1;
    if (arch.has_aux()) {
        const auto h = static_cast<std::size_t>(arch.aux_hidden);
        n += h * arch.mask.free_count() + 2 * h + 1;
    }
    return n;
}

ModelParams init_params(const Architecture& arch, RngStream& rng) {
    ModelParams p(arch);
    auto v = p.values();
    const auto& L = p.layout();
    for (std::size_t i = 0; i < L.total; ++i) {
        if (arch.has_beta() && i == L.ln_beta) {
            v[i] = -1.0;
            continue;
        }
        v[i] = sample_truncated_gaussian(rng, -2.0, 2.0);
    }
    return p;
}

ModelParams with_variant(const ModelParams& p, Variant v, double ln_beta) {
    Architecture arch = p.architecture();
    arch.variant = v;
    ModelParams out(arch);
    const auto& src = p.layout();
    const auto& dst = out.layout();
    std::copy_n(p.values().begin() + static_cast<std::ptrdiff_t>(src.z), src.ln_beta - src.z,
                out.values().begin() + static_cast<std::ptrdiff_t>(dst.z));
    if (arch.has_beta()) out.ln_beta() = ln_beta;
    return out;
}

// --- forward -----------------------------------------------------------------

double aux_output(const ModelParams& p, std::span<const double> x) {
    if (!p.architecture().has_aux()) return 0.0;
    detail::require(x.size() == p.architecture().input_dim(), "aux_output: input dimension mismatch");
    Kernel k(p);
    return k.aux(x, nullptr);
}

double neuron_activation(const ModelParams& p, std::span<const double> x, int k, int j) {
    detail::require(x.size() == p.architecture().input_dim(), "neuron_activation: input dimension mismatch");
    const std::size_t n = p.neuron_index(k, j);
    double a = -p.bias(n);
    for (std::size_t m = 0; m < x.size(); ++m) a += p.weight(n, m) * x[m];
    return a + aux_output(p, x);
}

double forward_mm(const ModelParams& p, std::span<const double> x) {
    detail::require(p.variant() == Variant::MM, "forward_mm: params are not an MM model");
    detail::require(x.size() == p.architecture().input_dim(), "forward_mm: input dimension mismatch");
    Kernel k(p);
    ForwardCache c(k);
    return k.forward(x, c);
}

double forward_smm(const ModelParams& p, std::span<const double> x) {
    detail::require(p.variant() != Variant::MM, "forward_smm: params are not a smooth model");
    detail::require(x.size() == p.architecture().input_dim(), "forward_smm: input dimension mismatch");
    Kernel k(p);
    ForwardCache c(k);
    k.forward(x, c);
    return c.y;
}

double forward_smm64(const ModelParams& p, std::span<const double> x) {
    detail::require(p.variant() == Variant::SMM64, "forward_smm64: params are not an SMM64 model");
    detail::require(x.size() == p.architecture().input_dim(), "forward_smm64: input dimension mismatch");
    Kernel k(p);
    ForwardCache c(k);
    return k.forward(x, c);
}

double predict(const ModelParams& p, std::span<const double> x) {
    detail::require(x.size() == p.architecture().input_dim(), "predict: input dimension mismatch");
    Kernel k(p);
    ForwardCache c(k);
    return k.forward(x, c);
}

std::vector<double> predict(const ModelParams& p, const Dataset& data) {
    detail::require(data.dim == p.architecture().input_dim(), "predict: dataset dimension mismatch");
    Kernel k(p);
    ForwardCache c(k);
    std::vector<double> out(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) out[i] = k.forward(data.row(i), c);
    return out;
}

ActiveNeuronStats active_neuron_stats(const ModelParams& p, const Dataset& inputs) {
    detail::require(!inputs.empty(), "active_neuron_stats: need at least one input");
    detail::require(inputs.dim == p.architecture().input_dim(), "active_neuron_stats: dimension mismatch");
    Kernel k(p);
    ForwardCache c(k);
    ActiveNeuronStats stats;
    stats.counts.assign(k.neurons(), 0);
    for (std::size_t i = 0; i < inputs.size(); ++i) {
        k.forward(inputs.row(i), c);
        ++stats.counts[c.active];
    }
    stats.active = static_cast<std::size_t>(
        std::count_if(stats.counts.begin(), stats.counts.end(), [](std::size_t n) { return n > 0; }));
    return stats;
}

}  // namespace smm
