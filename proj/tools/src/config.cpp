#include "config.hpp"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>

#include "smm/io.hpp"

namespace smm::cli {

using nlohmann::json;

namespace {

std::string type_name(const json& j) { return j.type_name(); }

class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + ": expected an object, got " + type_name(j_));
    }

    template <class T>
    void read(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        out = convert<T>(j_.at(key), field(key));
    }

    template <class T>
    void read(const char* key, std::optional<T>& out) {
        seen_.insert(key);
        if (!j_.contains(key) || j_.at(key).is_null()) return;
        out = convert<T>(j_.at(key), field(key));
    }

    Section child(const char* key) {
        seen_.insert(key);
        static const json empty = json::object();
        return Section(j_.contains(key) ? j_.at(key) : empty, field(key));
    }

    void finish() const {
        for (const auto& [key, value] : j_.items())
            if (!seen_.count(key)) throw ConfigError(field(key.c_str()) + ": unknown key");
    }

private:
    std::string where() const { return path_.empty() ? std::string("config") : path_; }
    std::string field(const char* key) const { return path_.empty() ? std::string(key) : path_ + "." + key; }

    template <class T>
    static T convert(const json& v, const std::string& name) {
        if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ConfigError(name + ": expected a boolean, got " + type_name(v));
            return v.get<bool>();
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ConfigError(name + ": expected a string, got " + type_name(v));
            return v.get<std::string>();
        } else if constexpr (std::is_floating_point_v<T>) {
            if (!v.is_number()) throw ConfigError(name + ": expected a number, got " + type_name(v));
            return v.get<double>();
        } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
            if (!v.is_number_unsigned()) throw ConfigError(name + ": expected a nonnegative integer");
            return v.get<T>();
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ConfigError(name + ": expected an integer");
            return v.get<T>();
        } else {
            if (!v.is_array()) throw ConfigError(name + ": expected an array, got " + type_name(v));
            T out;
            for (std::size_t i = 0; i < v.size(); ++i)
                out.push_back(convert<typename T::value_type>(v[i], name + "[" + std::to_string(i) + "]"));
            return out;
        }
    }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

template <class T>
void put(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

std::string line_of(const std::string& text, std::size_t byte) {
    const auto end = text.begin() + static_cast<std::ptrdiff_t>(std::min(byte, text.size()));
    return std::to_string(1 + std::count(text.begin(), end, '\n'));
}

}  // namespace

std::string RunConfig::canonical_json() const {
    json d{{"task", data.task},
           {"noise_sigma", double_to_hex(data.noise_sigma)},
           {"normalize", data.normalize},
           {"val_fraction", double_to_hex(data.val_fraction)}};
    put(d, "dim", data.dim);
    put(d, "n_train", data.n_train);
    put(d, "n_test", data.n_test);
    put(d, "train_path", data.train_path);
    put(d, "val_path", data.val_path);
    put(d, "test_path", data.test_path);
    put(d, "mask_path", data.mask_path);
    json m{{"variant", model.variant},
           {"groups", model.groups},
           {"neurons_per_group", model.neurons_per_group},
           {"encoding", model.encoding},
           {"aux_hidden", model.aux_hidden},
           {"aux_activation", model.aux_activation}};
    put(m, "shape", model.shape);
    json t{{"eta_plus", double_to_hex(train.rprop.eta_plus)},
           {"eta_minus", double_to_hex(train.rprop.eta_minus)},
           {"delta0", double_to_hex(train.rprop.delta0)},
           {"delta_min", double_to_hex(train.rprop.delta_min)},
           {"delta_max", double_to_hex(train.rprop.delta_max)},
           {"stop", train.stop},
           {"k", train.k},
           {"tau", double_to_hex(train.tau)},
           {"patience", train.patience}};
    put(t, "max_epochs", train.max_epochs);
    json s{{"name", suite.name},
           {"trials", suite.trials},
           {"folds", suite.folds},
           {"val_fraction", double_to_hex(suite.val_fraction)},
           {"monotonicity_pairs", suite.monotonicity_pairs}};
    put(s, "methods", suite.methods);
    json j{{"seed", seed}, {"data", d}, {"model", m}, {"train", t}, {"suite", s},
           {"tool_version", std::string(kToolVersion)}};
    return j.dump();
}

std::string RunConfig::hash() const { return hash_hex(canonical_json()); }

RunConfig parse_config(const std::string& text, const std::string& source) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ":" + line_of(text, e.byte) + ": invalid JSON: " + e.what());
    }
    RunConfig cfg;
    Section root(j, "");
    root.read("seed", cfg.seed);

    Section d = root.child("data");
    d.read("task", cfg.data.task);
    d.read("dim", cfg.data.dim);
    d.read("n_train", cfg.data.n_train);
    d.read("n_test", cfg.data.n_test);
    d.read("noise_sigma", cfg.data.noise_sigma);
    d.read("train_path", cfg.data.train_path);
    d.read("val_path", cfg.data.val_path);
    d.read("test_path", cfg.data.test_path);
    d.read("mask_path", cfg.data.mask_path);
    d.read("normalize", cfg.data.normalize);
    d.read("val_fraction", cfg.data.val_fraction);
    d.finish();

    Section m = root.child("model");
    m.read("variant", cfg.model.variant);
    m.read("groups", cfg.model.groups);
    m.read("neurons_per_group", cfg.model.neurons_per_group);
    m.read("shape", cfg.model.shape);
    m.read("encoding", cfg.model.encoding);
    m.read("aux_hidden", cfg.model.aux_hidden);
    m.read("aux_activation", cfg.model.aux_activation);
    m.finish();

    Section t = root.child("train");
    t.read("eta_plus", cfg.train.rprop.eta_plus);
    t.read("eta_minus", cfg.train.rprop.eta_minus);
    t.read("delta0", cfg.train.rprop.delta0);
    t.read("delta_min", cfg.train.rprop.delta_min);
    t.read("delta_max", cfg.train.rprop.delta_max);
    t.read("stop", cfg.train.stop);
    t.read("k", cfg.train.k);
    t.read("tau", cfg.train.tau);
    t.read("patience", cfg.train.patience);
    t.read("max_epochs", cfg.train.max_epochs);
    t.finish();

    Section s = root.child("suite");
    s.read("name", cfg.suite.name);
    s.read("trials", cfg.suite.trials);
    s.read("methods", cfg.suite.methods);
    s.read("folds", cfg.suite.folds);
    s.read("val_fraction", cfg.suite.val_fraction);
    s.read("monotonicity_pairs", cfg.suite.monotonicity_pairs);
    s.finish();

    root.finish();
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::string text;
    try {
        text = read_text_file(path);
    } catch (const std::exception& e) {
        throw ConfigError("--config: " + std::string(e.what()));
    }
    return parse_config(text, path.string());
}

}  // namespace smm::cli
