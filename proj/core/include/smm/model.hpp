#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smm/rng.hpp"

namespace smm {

struct Dataset;

enum class Variant { MM, SMM, SMM64 };

/// Maps an unconstrained parameter z to a nonnegative weight.
///   Exponential: exp(z)
///   Squared:     z^2
///   ExpLinear:   ELU(z) + 1, i.e. z + 1 for z > 0 and exp(z) otherwise
enum class WeightEncoding { Exponential, Squared, ExpLinear };

/// Hidden nonlinearity of the auxiliary network used by SMM64.
enum class AuxActivation { Tanh, Logistic };

std::string_view to_string(Variant v);
std::string_view to_string(WeightEncoding e);
std::string_view to_string(AuxActivation a);
Variant parse_variant(std::string_view s);
WeightEncoding parse_encoding(std::string_view s);
AuxActivation parse_aux_activation(std::string_view s);

double decode_weight(WeightEncoding enc, double z) noexcept;
double decode_weight_derivative(WeightEncoding enc, double z) noexcept;

/// Number of linear neurons in each of the K groups.
struct GroupShape {
    std::vector<int> neurons;

    GroupShape() : GroupShape(uniform(6, 6)) {}
    explicit GroupShape(std::vector<int> per_group) : neurons(std::move(per_group)) {}
    static GroupShape uniform(int groups, int per_group);

    int groups() const noexcept { return static_cast<int>(neurons.size()); }
    int total() const noexcept;
    int widest() const noexcept;
    void validate() const;

    bool operator==(const GroupShape&) const = default;
};

/// Per-feature flag: true means the output must be nondecreasing in that
/// feature.
class MonotonicityMask {
public:
    MonotonicityMask() = default;
    explicit MonotonicityMask(std::vector<bool> flags) : flags_(std::move(flags)) {}
    static MonotonicityMask all_constrained(std::size_t dim) {
        return MonotonicityMask(std::vector<bool>(dim, true));
    }

    std::size_t size() const noexcept { return flags_.size(); }
    bool constrained(std::size_t m) const { return flags_.at(m); }
    std::size_t constrained_count() const noexcept;
    std::size_t free_count() const noexcept { return size() - constrained_count(); }
    std::vector<std::size_t> free_indices() const;
    std::vector<std::size_t> constrained_indices() const;
    const std::vector<bool>& flags() const noexcept { return flags_; }

    bool operator==(const MonotonicityMask&) const = default;

private:
    std::vector<bool> flags_;
};

struct Architecture {
    Variant variant = Variant::SMM;
    GroupShape shape;
    MonotonicityMask mask = MonotonicityMask::all_constrained(1);
    WeightEncoding encoding = WeightEncoding::Exponential;
    int aux_hidden = 64;
    AuxActivation aux_activation = AuxActivation::Tanh;

    std::size_t input_dim() const noexcept { return mask.size(); }
    bool has_beta() const noexcept { return variant != Variant::MM; }
    bool has_aux() const noexcept { return variant == Variant::SMM64; }
    void validate() const;

    bool operator==(const Architecture&) const = default;
};

/// Offsets of each parameter block in the flat parameter vector. Declared
/// order: z (neuron-major, then feature), biases, ln(beta), then the aux
/// network as W1 (hidden-major), b1, W2, b2.
struct ParamLayout {
    explicit ParamLayout(const Architecture& arch);

    std::size_t neurons = 0;
    std::size_t dim = 0;
    std::size_t z = 0;
    std::size_t bias = 0;
    std::size_t ln_beta = 0;
    std::size_t aux_w1 = 0;
    std::size_t aux_b1 = 0;
    std::size_t aux_w2 = 0;
    std::size_t aux_b2 = 0;
    std::size_t total = 0;

    /// Name of the block containing flat index i ("z", "bias", "ln_beta",
    /// "aux_w1", ...).
    std::string_view block_of(std::size_t i) const noexcept;
};

/// Trainable parameters of one model, stored flat in declared order.
class ModelParams {
public:
    explicit ModelParams(Architecture arch);
    ModelParams(Architecture arch, std::vector<double> values);

    const Architecture& architecture() const noexcept { return arch_; }
    const ParamLayout& layout() const noexcept { return layout_; }
    Variant variant() const noexcept { return arch_.variant; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }

    /// Global index of neuron j in group k (groups laid out consecutively).
    std::size_t neuron_index(int k, int j) const;

    double& z(std::size_t neuron, std::size_t m) { return values_[layout_.z + neuron * layout_.dim + m]; }
    double z(std::size_t neuron, std::size_t m) const {
        return values_[layout_.z + neuron * layout_.dim + m];
    }
    double& bias(std::size_t neuron) { return values_[layout_.bias + neuron]; }
    double bias(std::size_t neuron) const { return values_[layout_.bias + neuron]; }
    double& ln_beta();
    double ln_beta() const;
    double beta() const;

    double& aux_w1(std::size_t hidden, std::size_t input) {
        return values_[layout_.aux_w1 + hidden * arch_.mask.free_count() + input];
    }
    double aux_w1(std::size_t hidden, std::size_t input) const {
        return values_[layout_.aux_w1 + hidden * arch_.mask.free_count() + input];
    }
    double& aux_b1(std::size_t hidden) { return values_[layout_.aux_b1 + hidden]; }
    double aux_b1(std::size_t hidden) const { return values_[layout_.aux_b1 + hidden]; }
    double& aux_w2(std::size_t hidden) { return values_[layout_.aux_w2 + hidden]; }
    double aux_w2(std::size_t hidden) const { return values_[layout_.aux_w2 + hidden]; }
    double& aux_b2() { return values_[layout_.aux_b2]; }
    double aux_b2() const { return values_[layout_.aux_b2]; }

    /// Effective weight of feature m for a neuron: decoded for constrained
    /// features, raw for free ones.
    double weight(std::size_t neuron, std::size_t m) const;

    bool operator==(const ModelParams& o) const {
        return arch_ == o.arch_ && values_ == o.values_;
    }

private:
    Architecture arch_;
    ParamLayout layout_;
    std::vector<double> values_;
};

/// Exact number of trainable scalars for the architecture:
/// (d+1)*sum(h_k), plus 1 for ln(beta) in smooth variants, plus
/// H*u + 2H + 1 for the aux network (u free features, H hidden units).
std::size_t count_params(const Architecture& arch);

/// Draws every z, bias and aux weight i.i.d. from N(0,1) truncated to
/// [-2, 2]; ln(beta) starts at -1.
ModelParams init_params(const Architecture& arch, RngStream& rng);

/// Copies z and biases into a model of another variant. ln(beta) is set to
/// `ln_beta` when the target variant has one; aux weights are zeroed.
ModelParams with_variant(const ModelParams& p, Variant v, double ln_beta = -1.0);

/// Auxiliary network output Phi(x_u); 0 for variants without one.
double aux_output(const ModelParams& p, std::span<const double> x);

/// a^(k,j)(x) = w . x - b (+ Phi(x_u) for SMM64).
double neuron_activation(const ModelParams& p, std::span<const double> x, int k, int j);

/// min over groups of max over neurons. Requires variant MM.
double forward_mm(const ModelParams& p, std::span<const double> x);
/// LSE_{-beta} over groups of LSE_beta over neurons. Requires SMM or SMM64
/// (for SMM64 the activations include Phi and no sigmoid is applied).
double forward_smm(const ModelParams& p, std::span<const double> x);
/// sigmoid(forward_smm). Requires SMM64.
double forward_smm64(const ModelParams& p, std::span<const double> x);
/// Dispatches on the variant.
double predict(const ModelParams& p, std::span<const double> x);
std::vector<double> predict(const ModelParams& p, const Dataset& data);

struct ActiveNeuronStats {
    std::vector<std::size_t> counts;  ///< per global neuron index
    std::size_t active = 0;           ///< neurons active for at least one input
};

/// Which neuron the hard min/max selects for each input. Ties go to the
/// lowest (k, j).
ActiveNeuronStats active_neuron_stats(const ModelParams& p, const Dataset& inputs);

}  // namespace smm
