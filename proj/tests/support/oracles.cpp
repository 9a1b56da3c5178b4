#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace smm::oracle {

using Big = boost::multiprecision::cpp_bin_float_50;

double lse_multiprecision(std::span<const double> values, double beta) {
    Big sum = 0;
    for (double v : values) sum += boost::multiprecision::exp(Big(beta) * Big(v));
    return static_cast<double>(boost::multiprecision::log(sum) / Big(beta));
}

std::vector<double> central_difference(const std::function<double(std::span<const double>)>& f,
                                       std::vector<double> p, double h) {
    std::vector<double> g(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double keep = p[i];
        p[i] = keep + h;
        const double up = f(p);
        p[i] = keep - h;
        const double down = f(p);
        p[i] = keep;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

namespace {

std::vector<std::vector<double>> activations(const ModelParams& p, std::span<const double> x) {
    const auto& arch = p.architecture();
    double phi = 0.0;
    if (arch.has_aux()) {
        const auto free = arch.mask.free_indices();
        phi = p.aux_b2();
        for (int h = 0; h < arch.aux_hidden; ++h) {
            double s = p.aux_b1(h);
            for (std::size_t u = 0; u < free.size(); ++u) s += p.aux_w1(h, u) * x[free[u]];
            const double act = arch.aux_activation == AuxActivation::Tanh ? std::tanh(s) : 1.0 / (1.0 + std::exp(-s));
            phi += p.aux_w2(h) * act;
        }
    }
    std::vector<std::vector<double>> a;
    std::size_t n = 0;
    for (int h : arch.shape.neurons) {
        std::vector<double> group;
        for (int j = 0; j < h; ++j, ++n) {
            double s = -p.bias(n) + phi;
            for (std::size_t m = 0; m < x.size(); ++m) s += p.weight(n, m) * x[m];
            group.push_back(s);
        }
        a.push_back(std::move(group));
    }
    return a;
}

double lse_plain(const std::vector<double>& v, double beta) {
    const double c = beta > 0 ? *std::max_element(v.begin(), v.end()) : *std::min_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(beta * (x - c));
    return c + std::log(s) / beta;
}

double reference_predict(const ModelParams& p, std::span<const double> x) {
    const auto a = activations(p, x);
    std::vector<double> g;
    if (p.variant() == Variant::MM) {
        for (const auto& group : a) g.push_back(*std::max_element(group.begin(), group.end()));
        return *std::min_element(g.begin(), g.end());
    }
    const double beta = std::exp(p.ln_beta());
    for (const auto& group : a) g.push_back(lse_plain(group, beta));
    const double y = lse_plain(g, -beta);
    return p.variant() == Variant::SMM64 ? 1.0 / (1.0 + std::exp(-y)) : y;
}

}  // namespace

double reference_mse(const ModelParams& params, const Dataset& data) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const long double e = reference_predict(params, data.row(i)) - data.targets[i];
        s += e * e;
    }
    return static_cast<double>(s / data.size());
}

double mm_tie_margin(const ModelParams& params, std::span<const double> x) {
    const auto a = activations(params, x);
    std::vector<double> g;
    for (const auto& group : a) g.push_back(*std::max_element(group.begin(), group.end()));
    const auto lo = std::min_element(g.begin(), g.end());
    double margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < g.size(); ++k)
        if (k != static_cast<std::size_t>(lo - g.begin())) margin = std::min(margin, g[k] - *lo);
    const auto& sel = a[static_cast<std::size_t>(lo - g.begin())];
    const double top = *std::max_element(sel.begin(), sel.end());
    bool seen_top = false;
    for (double v : sel) {
        if (v == top && !seen_top) {
            seen_top = true;
            continue;
        }
        margin = std::min(margin, top - v);
    }
    return margin;
}

std::vector<double> isotonic_exhaustive(std::span<const double> xs, std::span<const double> ys) {
    std::map<double, std::vector<double>> groups;
    for (std::size_t i = 0; i < xs.size(); ++i) groups[xs[i]].push_back(ys[i]);
    std::vector<std::vector<double>> g;
    for (auto& [x, v] : groups) g.push_back(v);
    const std::size_t n = g.size();

    std::vector<double> best;
    double best_sse = std::numeric_limits<double>::infinity();
    for (std::size_t cut = 0; cut < (std::size_t{1} << (n - 1)); ++cut) {
        std::vector<double> levels(n);
        double prev = -std::numeric_limits<double>::infinity();
        bool feasible = true;
        double sse = 0.0;
        std::size_t start = 0;
        for (std::size_t i = 0; i < n && feasible; ++i) {
            const bool ends = i + 1 == n || (cut >> i) & 1;
            if (!ends) continue;
            double sum = 0.0, count = 0.0;
            for (std::size_t j = start; j <= i; ++j)
                for (double y : g[j]) {
                    sum += y;
                    count += 1.0;
                }
            const double mean = sum / count;
            if (mean < prev) feasible = false;
            prev = mean;
            for (std::size_t j = start; j <= i; ++j) {
                levels[j] = mean;
                for (double y : g[j]) sse += (y - mean) * (y - mean);
            }
            start = i + 1;
        }
        if (feasible && sse < best_sse) {
            best_sse = sse;
            best = levels;
        }
    }
    return best;
}

double wilcoxon_enumerate(std::span<const double> a, std::span<const double> b) {
    std::vector<double> d;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) d.push_back(a[i] - b[i]);
    const std::size_t n = d.size();
    if (n == 0) return 1.0;
    std::vector<double> rank(n);
    for (std::size_t i = 0; i < n; ++i) {
        double less = 0, equal = 0;
        for (std::size_t j = 0; j < n; ++j) {
            if (std::abs(d[j]) < std::abs(d[i])) ++less;
            if (std::abs(d[j]) == std::abs(d[i])) ++equal;
        }
        rank[i] = less + (equal + 1.0) / 2.0;
    }
    double observed = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        if (d[i] > 0) observed += rank[i];

    double below = 0, above = 0;
    const std::size_t total = std::size_t{1} << n;
    for (std::size_t mask = 0; mask < total; ++mask) {
        double w = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if ((mask >> i) & 1) w += rank[i];
        if (w <= observed + 1e-9) ++below;
        if (w >= observed - 1e-9) ++above;
    }
    return std::min(1.0, 2.0 * std::min(below, above) / static_cast<double>(total));
}

}  // namespace smm::oracle
