#pragma once

#include <vector>

#include "smm/dataset.hpp"
#include "smm/model.hpp"
#include "smm/rng.hpp"

namespace smm::testing {

inline Architecture make_arch(Variant v, std::size_t dim, GroupShape shape = GroupShape::uniform(6, 6)) {
    Architecture a;
    a.variant = v;
    a.shape = std::move(shape);
    a.mask = MonotonicityMask::all_constrained(dim);
    if (v == Variant::SMM64) {
        // At least one free feature; the last one is left unconstrained.
        std::vector<bool> flags(dim, true);
        flags.back() = false;
        if (dim >= 4) flags[dim - 2] = false;
        a.mask = MonotonicityMask(flags);
        a.aux_hidden = 8;
    }
    return a;
}

/// Initialization draw with a random ln(beta) in [-1.5, 2.5].
inline ModelParams random_params(const Architecture& arch, RngStream& rng) {
    ModelParams p = init_params(arch, rng);
    if (arch.has_beta()) p.ln_beta() = rng.uniform(-1.5, 2.5);
    return p;
}

inline Dataset random_dataset(std::size_t dim, std::size_t n, RngStream& rng) {
    Dataset d;
    d.dim = dim;
    std::vector<double> x(dim);
    for (std::size_t i = 0; i < n; ++i) {
        for (double& v : x) v = rng.uniform();
        d.push_back(x, rng.uniform());
    }
    return d;
}

}  // namespace smm::testing
