#pragma once

// Hot-path evaluation shared by model.cpp and gradients.cpp. Decodes the
// weights once per parameter set so per-sample work is dot products and
// exponentials only.

#include <cmath>
#include <span>
#include <vector>

#include "smm/model.hpp"
#include "smm/numerics.hpp"

namespace smm {

class Kernel;

struct ForwardCache {
    explicit ForwardCache(const Kernel& k);

    std::vector<double> a;       // activations per neuron
    std::vector<double> q;       // within-group softmax weights per neuron
    std::vector<double> g;       // group values
    std::vector<double> p;       // across-group softmin weights
    std::vector<double> hidden;  // aux hidden activations
    double phi = 0.0;
    double y = 0.0;              // min-max / smooth min-max value (pre-sigmoid)
    double out = 0.0;
    std::size_t active = 0;      // hard argmin/argmax neuron, lowest index on ties
    double tie_margin = 0.0;     // smallest gap that decides `active`
};

class Kernel {
public:
    explicit Kernel(const ModelParams& params) : params_(params) {
        const auto& arch = params.architecture();
        const auto& L = params.layout();
        dim_ = L.dim;
        neurons_ = L.neurons;
        variant_ = arch.variant;
        groups_ = arch.shape.neurons;
        constrained_.resize(dim_);
        for (std::size_t m = 0; m < dim_; ++m) constrained_[m] = arch.mask.constrained(m);
        free_ = arch.mask.free_indices();
        weights_.resize(neurons_ * dim_);
        dweights_.resize(neurons_ * dim_);
        const auto v = params.values();
        for (std::size_t n = 0; n < neurons_; ++n) {
            for (std::size_t m = 0; m < dim_; ++m) {
                const double z = v[L.z + n * dim_ + m];
                if (constrained_[m]) {
                    weights_[n * dim_ + m] = decode_weight(arch.encoding, z);
                    dweights_[n * dim_ + m] = decode_weight_derivative(arch.encoding, z);
                } else {
                    weights_[n * dim_ + m] = z;
                    dweights_[n * dim_ + m] = 1.0;
                }
            }
        }
        beta_ = arch.has_beta() ? std::exp(v[L.ln_beta]) : 0.0;
        aux_hidden_ = arch.has_aux() ? static_cast<std::size_t>(arch.aux_hidden) : 0;
        logistic_aux_ = arch.aux_activation == AuxActivation::Logistic;
    }

    std::size_t neurons() const noexcept { return neurons_; }
    std::size_t groups() const noexcept { return groups_.size(); }
    std::size_t aux_hidden() const noexcept { return aux_hidden_; }
    double beta() const noexcept { return beta_; }
    const ModelParams& params() const noexcept { return params_; }

    double aux(std::span<const double> x, double* hidden) const {
        const auto v = params_.values();
        const auto& L = params_.layout();
        const std::size_t u = free_.size();
        double phi = v[L.aux_b2];
        for (std::size_t h = 0; h < aux_hidden_; ++h) {
            double pre = v[L.aux_b1 + h];
            const double* w = v.data() + L.aux_w1 + h * u;
            for (std::size_t i = 0; i < u; ++i) pre += w[i] * x[free_[i]];
            const double act = logistic_aux_ ? sigmoid(pre) : std::tanh(pre);
            if (hidden) hidden[h] = act;
            phi += v[L.aux_w2 + h] * act;
        }
        return phi;
    }

    double forward(std::span<const double> x, ForwardCache& c) const {
        const auto v = params_.values();
        const auto& L = params_.layout();
        c.phi = aux_hidden_ ? aux(x, c.hidden.data()) : 0.0;
        for (std::size_t n = 0; n < neurons_; ++n) {
            const double* w = weights_.data() + n * dim_;
            double a = c.phi - v[L.bias + n];
            for (std::size_t m = 0; m < dim_; ++m) a += w[m] * x[m];
            c.a[n] = a;
        }

        // Hard selection, also used for the MM output. The margin only
        // tracks gaps that can change the output: inside the winning group
        // and between the two smallest groups.
        std::size_t start = 0;
        double best_group = 0.0;
        double runner_up = INFINITY;
        double best_margin = INFINITY;
        std::size_t active = 0;
        for (std::size_t k = 0; k < groups_.size(); ++k) {
            const auto h = static_cast<std::size_t>(groups_[k]);
            std::size_t arg = start;
            double second = -INFINITY;
            for (std::size_t j = 1; j < h; ++j) {
                const double a = c.a[start + j];
                if (a > c.a[arg]) {
                    second = c.a[arg];
                    arg = start + j;
                } else if (a > second) {
                    second = a;
                }
            }
            const double gk = c.a[arg];
            c.g[k] = gk;
            if (k == 0 || gk < best_group) {
                if (k > 0) runner_up = best_group;
                best_group = gk;
                best_margin = gk - second;
                active = arg;
            } else if (gk < runner_up) {
                runner_up = gk;
            }
            start += h;
        }
        c.active = active;
        c.tie_margin = std::min(best_margin, runner_up - best_group);

        if (variant_ == Variant::MM) {
            c.y = best_group;
            c.out = c.y;
            return c.out;
        }

        start = 0;
        for (std::size_t k = 0; k < groups_.size(); ++k) {
            const auto h = static_cast<std::size_t>(groups_[k]);
            c.g[k] = lse_with_weights(std::span<const double>(c.a.data() + start, h), beta_,
                                      std::span<double>(c.q.data() + start, h));
            start += h;
        }
        c.y = lse_neg_with_weights(c.g, beta_, c.p);
        c.out = variant_ == Variant::SMM64 ? sigmoid(c.y) : c.y;
        return c.out;
    }

    /// Adds dout * d(out)/d(theta) into `grad` for the sample cached in `c`.
    /// Weight-encoding derivatives are NOT applied here: z-gradients
    /// accumulate d/dw and finish_gradient multiplies by decode'(z) once.
    void accumulate(std::span<const double> x, const ForwardCache& c, double dout,
                    std::span<double> grad) const {
        const auto& L = params_.layout();
        const auto v = params_.values();
        double dy = dout;
        if (variant_ == Variant::SMM64) dy *= c.out * (1.0 - c.out);

        if (variant_ == Variant::MM) {
            add_neuron(x, c.active, dy, grad);
            return;
        }

        double dlnbeta = -c.y;
        std::size_t start = 0;
        for (std::size_t k = 0; k < groups_.size(); ++k) {
            const auto h = static_cast<std::size_t>(groups_[k]);
            for (std::size_t j = 0; j < h; ++j) {
                const std::size_t n = start + j;
                const double s = c.p[k] * c.q[n];
                dlnbeta += s * c.a[n];
                add_neuron(x, n, dy * s, grad);
            }
            start += h;
        }
        grad[L.ln_beta] += dy * dlnbeta;

        if (aux_hidden_) {
            // d(out)/d(phi) = dy, since the LSE weights sum to one.
            const std::size_t u = free_.size();
            grad[L.aux_b2] += dy;
            for (std::size_t hh = 0; hh < aux_hidden_; ++hh) {
                const double act = c.hidden[hh];
                grad[L.aux_w2 + hh] += dy * act;
                const double dact = logistic_aux_ ? act * (1.0 - act) : 1.0 - act * act;
                const double dpre = dy * v[L.aux_w2 + hh] * dact;
                grad[L.aux_b1 + hh] += dpre;
                double* gw = grad.data() + L.aux_w1 + hh * u;
                for (std::size_t i = 0; i < u; ++i) gw[i] += dpre * x[free_[i]];
            }
        }
    }

    void finish_gradient(std::span<double> grad) const {
        const auto& L = params_.layout();
        for (std::size_t i = 0; i < neurons_ * dim_; ++i) grad[L.z + i] *= dweights_[i];
    }

private:
    void add_neuron(std::span<const double> x, std::size_t n, double da, std::span<double> grad) const {
        const auto& L = params_.layout();
        double* gz = grad.data() + L.z + n * dim_;
        for (std::size_t m = 0; m < dim_; ++m) gz[m] += da * x[m];
        grad[L.bias + n] -= da;
    }

    const ModelParams& params_;
    std::size_t dim_ = 0;
    std::size_t neurons_ = 0;
    Variant variant_ = Variant::SMM;
    std::vector<int> groups_;
    std::vector<bool> constrained_;
    std::vector<std::size_t> free_;
    std::vector<double> weights_;
    std::vector<double> dweights_;
    double beta_ = 0.0;
    std::size_t aux_hidden_ = 0;
    bool logistic_aux_ = false;
};

inline ForwardCache::ForwardCache(const Kernel& k)
    : a(k.neurons()), q(k.neurons()), g(k.groups()), p(k.groups()), hidden(k.aux_hidden()) {}

}  // namespace smm
