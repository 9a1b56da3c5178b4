#include "commands.hpp"

#include <algorithm>
#include <iostream>
#include <map>
#include <numeric>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "config.hpp"
#include "smm/benchgen.hpp"
#include "smm/dataset.hpp"
#include "smm/experiments.hpp"
#include "smm/gradients.hpp"
#include "smm/io.hpp"
#include "smm/model_io.hpp"

namespace smm::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> jobs;
    std::string out = ".";
    std::optional<std::string> suite;
    std::optional<int> trials;
    std::optional<std::string> variant;
    bool quiet = false;
    std::string model_path;
    std::string data_path;
};

RunConfig resolve(const Options& o) {
    RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    if (o.seed) cfg.seed = *o.seed;
    if (o.suite) cfg.suite.name = *o.suite;
    if (o.trials) cfg.suite.trials = *o.trials;
    if (o.variant) cfg.model.variant = *o.variant;
    return cfg;
}

std::size_t jobs_of(const Options& o) {
    if (o.jobs && *o.jobs > 0) return *o.jobs;
    return std::max(1u, std::thread::hardware_concurrency());
}

std::string meta_line(const std::string& hash, std::uint64_t seed) {
    return "# config_hash=" + hash + " seed=" + std::to_string(seed) + " tool_version=" + std::string(kToolVersion) +
           "\n";
}

/// Re-throws contract violations from the library as config errors that
/// name the offending section.
template <class Fn>
auto in_section(const std::string& name, Fn&& fn) {
    try {
        return fn();
    } catch (const ConfigError&) {
        throw;
    } catch (const ContractViolation& e) {
        throw ConfigError(name + ": " + e.what());
    }
}

Dataset read_data_field(const std::string& path, const std::string& field) {
    if (!fs::exists(path)) throw ConfigError(field + ": file not found: " + path);
    return in_section(field, [&] { return read_csv(path); });
}

BenchmarkSpec make_spec(const RunConfig& cfg) {
    return in_section("data", [&] {
        const TargetKind kind = parse_target_kind(cfg.data.task);
        BenchmarkSpec spec;
        if (kind == TargetKind::RandomPoly) {
            spec = BenchmarkSpec::multivariate(cfg.data.dim.value_or(2));
        } else {
            if (cfg.data.dim && *cfg.data.dim != 1) throw ConfigError("data.dim: univariate tasks have dim 1");
            spec = BenchmarkSpec::univariate(kind);
        }
        if (cfg.data.n_train) spec.n_train = *cfg.data.n_train;
        if (cfg.data.n_test) spec.n_test = *cfg.data.n_test;
        spec.noise_sigma = cfg.data.noise_sigma;
        spec.seed = cfg.seed;
        spec.stream = 0;
        spec.validate();
        return spec;
    });
}

Architecture make_arch(const RunConfig& cfg, const MonotonicityMask& mask) {
    return in_section("model", [&] {
        Architecture arch;
        arch.variant = parse_variant(cfg.model.variant);
        arch.shape = cfg.model.shape ? GroupShape(*cfg.model.shape)
                                     : GroupShape::uniform(cfg.model.groups, cfg.model.neurons_per_group);
        arch.mask = mask;
        arch.encoding = parse_encoding(cfg.model.encoding);
        arch.aux_hidden = cfg.model.aux_hidden;
        arch.aux_activation = parse_aux_activation(cfg.model.aux_activation);
        arch.validate();
        return arch;
    });
}

StopRule make_stop(const RunConfig& cfg) {
    return in_section("train", [&]() -> StopRule {
        StopRule rule;
        if (cfg.train.stop == "progress") {
            ProgressStrip p;
            p.k = cfg.train.k;
            p.tau = cfg.train.tau;
            if (cfg.train.max_epochs) p.max_epochs = *cfg.train.max_epochs;
            rule = p;
        } else if (cfg.train.stop == "validation") {
            ValidationStop v;
            v.patience = cfg.train.patience;
            if (cfg.train.max_epochs) v.max_epochs = *cfg.train.max_epochs;
            rule = v;
        } else {
            throw ConfigError("train.stop: expected progress or validation, got '" + cfg.train.stop + "'");
        }
        validate(rule);
        cfg.train.rprop.validate();
        return rule;
    });
}

// --- gen -----------------------------------------------------------------------

int cmd_gen(const Options& o, std::ostream& out) {
    const RunConfig cfg = resolve(o);
    const std::string hash = cfg.hash();
    const std::string meta = meta_line(hash, cfg.seed);
    const fs::path dir = o.out;
    if (cfg.data.task == "partial_monotone") {
        PartialMonotoneSpec spec;
        spec.dim = cfg.data.dim.value_or(spec.dim);
        spec.n = cfg.data.n_train.value_or(spec.n);
        spec.noise_sigma = cfg.data.noise_sigma;
        spec.seed = cfg.seed;
        const Dataset data = in_section("data", [&] { return make_partial_monotone_dataset(spec); });
        write_file_atomic(dir / "data.csv", meta + to_csv(data));
        json mask = json::array();
        for (std::size_t m = 0; m < spec.n_constrained; ++m) mask.push_back(data.feature_names[m]);
        write_file_atomic(dir / "mask.json", mask.dump() + "\n");
        if (!o.quiet) out << "wrote " << (dir / "data.csv").string() << " (" << data.size() << " rows)\n";
        return kOk;
    }
    const BenchmarkSpec spec = make_spec(cfg);
    const BenchmarkData data = make_dataset(spec);
    write_file_atomic(dir / "train.csv", meta + to_csv(data.train));
    write_file_atomic(dir / "test.csv", meta + to_csv(data.test));
    if (!o.quiet)
        out << "wrote " << spec.task_id() << ": " << data.train.size() << " train, " << data.test.size()
            << " test rows to " << dir.string() << "\n";
    return kOk;
}

// --- train ---------------------------------------------------------------------

int cmd_train(const Options& o, std::ostream& out) {
    const RunConfig cfg = resolve(o);
    const std::string hash = cfg.hash();
    const StopRule stop = make_stop(cfg);
    const bool use_val = std::holds_alternative<ValidationStop>(stop);

    Dataset train;
    if (cfg.data.train_path)
        train = read_data_field(*cfg.data.train_path, "data.train_path");
    else
        train = make_dataset(make_spec(cfg)).train;

    MonotonicityMask mask = MonotonicityMask::all_constrained(train.dim);
    if (cfg.data.mask_path) {
        if (!fs::exists(*cfg.data.mask_path)) throw ConfigError("data.mask_path: file not found: " + *cfg.data.mask_path);
        mask = in_section("data.mask_path", [&] { return read_mask(*cfg.data.mask_path, train); });
    }

    std::optional<Dataset> val;
    if (use_val) {
        if (cfg.data.val_path) {
            val = read_data_field(*cfg.data.val_path, "data.val_path");
        } else {
            if (!(cfg.data.val_fraction > 0.0 && cfg.data.val_fraction < 1.0))
                throw ConfigError("data.val_fraction: must lie in (0, 1)");
            std::vector<std::size_t> idx(train.size());
            std::iota(idx.begin(), idx.end(), 0);
            RngStream rng(cfg.seed, 2);
            for (std::size_t i = idx.size(); i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
            const auto n_val = static_cast<std::size_t>(std::llround(cfg.data.val_fraction * static_cast<double>(idx.size())));
            if (n_val == 0 || n_val >= idx.size()) throw ConfigError("data.val_fraction: leaves an empty split");
            std::vector<std::size_t> vi(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(n_val));
            std::vector<std::size_t> ti(idx.begin() + static_cast<std::ptrdiff_t>(n_val), idx.end());
            std::sort(vi.begin(), vi.end());
            std::sort(ti.begin(), ti.end());
            val = train.subset(vi);
            train = train.subset(ti);
        }
    }

    std::optional<UnitNormalization> norm;
    if (cfg.data.normalize) {
        auto [normalized, maps] = normalize_unit(train);
        train = std::move(normalized);
        if (val) val = maps.apply(*val);
        norm = std::move(maps);
    }

    const Architecture arch = make_arch(cfg, mask);
    TrainConfig tc;
    tc.rprop = cfg.train.rprop;
    tc.stop = stop;
    tc.seed = cfg.seed;
    tc.stream = 1;

    const fs::path dir = o.out;
    const std::string meta = meta_line(hash, cfg.seed);
    FitResult result = [&] {
        try {
            return fit(arch, train, val, tc);
        } catch (const TrainingDiverged& e) {
            write_file_atomic(dir / "trace.csv", meta + e.trace().to_csv());
            throw;
        }
    }();

    ModelFile model{std::move(result.params), tc.seed, tc.stream, hash, norm};
    save_model(dir / "model.json", model);
    write_file_atomic(dir / "trace.csv", meta + result.trace.to_csv());
    if (!o.quiet) {
        out << to_string(arch.variant) << ": " << model.params.size() << " parameters, "
            << result.trace.rows.size() << " epochs (" << to_string(result.trace.reason)
            << "), train_mse=" << format_double(mse_loss(model.params, train)) << "\n";
    }
    return kOk;
}

// --- eval ----------------------------------------------------------------------

int cmd_eval(const Options& o, std::ostream& out) {
    const RunConfig cfg = resolve(o);
    if (o.model_path.empty()) throw ConfigError("--model: required");
    if (!fs::exists(o.model_path)) throw ConfigError("--model: file not found: " + o.model_path);
    const ModelFile model = load_model(o.model_path);
    const auto& arch = model.params.architecture();

    std::map<std::string, Dataset> sets;
    if (!o.data_path.empty()) {
        sets["data"] = read_data_field(o.data_path, "--data");
    } else if (cfg.data.train_path || cfg.data.test_path) {
        if (cfg.data.train_path) sets["train"] = read_data_field(*cfg.data.train_path, "data.train_path");
        if (cfg.data.test_path) sets["test"] = read_data_field(*cfg.data.test_path, "data.test_path");
    } else {
        BenchmarkData data = make_dataset(make_spec(cfg));
        sets["train"] = std::move(data.train);
        sets["test"] = std::move(data.test);
    }

    json metrics;
    json mse = json::object();
    json sizes = json::object();
    for (auto& [name, ds] : sets) {
        if (ds.dim != arch.input_dim())
            throw ConfigError(name + ": data has " + std::to_string(ds.dim) + " features, model expects " +
                              std::to_string(arch.input_dim()));
        if (model.normalization) ds = model.normalization->apply(ds);
        mse[name] = mse_loss(model.params, ds);
        sizes[name] = ds.size();
    }
    metrics["mse"] = mse;
    metrics["n"] = sizes;
    metrics["variant"] = std::string(to_string(arch.variant));
    metrics["param_count"] = model.params.size();
    if (arch.mask.constrained_count() > 0) {
        RngStream rng(cfg.seed, 3);
        const MonotonicityProbe probe = probe_monotonicity(model.params, rng, 1000);
        metrics["monotonicity"] = {
            {"pairs", probe.pairs}, {"violations", probe.violations}, {"worst_decrease", probe.worst_decrease}};
    }
    if (arch.variant == Variant::MM) {
        const Dataset& ref = sets.count("test") ? sets.at("test") : sets.begin()->second;
        metrics["active_neurons"] = active_neuron_stats(model.params, ref).active;
    }
    metrics["provenance"] = {{"config_hash", cfg.hash()},
                             {"seed", cfg.seed},
                             {"model_config_hash", model.config_hash},
                             {"tool_version", std::string(kToolVersion)}};
    const fs::path path = fs::path(o.out) / "metrics.json";
    write_file_atomic(path, metrics.dump(2) + "\n");
    if (!o.quiet) out << metrics["mse"].dump() << "\n";
    return kOk;
}

// --- bench ---------------------------------------------------------------------

void print_report(const ExperimentReport& rep, std::ostream& out) {
    out << "task      method  done  test_mse_x1e3 (median [q1, q3])  p_vs_" << rep.reference << "\n";
    for (const auto& c : rep.cells) {
        out << c.task << "  " << c.method << "  " << c.completed << "/" << rep.trials;
        if (c.completed > 0)
            out << "  " << format_double(c.test.median * 1e3) << " [" << format_double(c.test.q1 * 1e3) << ", "
                << format_double(c.test.q3 * 1e3) << "]";
        if (c.p_value) out << "  p=" << format_double(*c.p_value);
        out << "\n";
    }
}

int cmd_bench_cv(const Options& o, const RunConfig& cfg, std::ostream& out) {
    if (!cfg.data.train_path) throw ConfigError("data.train_path: required for the uci suite");
    if (!cfg.data.mask_path) throw ConfigError("data.mask_path: required for the uci suite");
    const Dataset data = read_data_field(*cfg.data.train_path, "data.train_path");
    if (!fs::exists(*cfg.data.mask_path)) throw ConfigError("data.mask_path: file not found: " + *cfg.data.mask_path);
    const MonotonicityMask mask = in_section("data.mask_path", [&] { return read_mask(*cfg.data.mask_path, data); });

    CvConfig cv;
    if (o.variant) {
        cv.methods = {in_section("--variant", [&] { return parse_method(*o.variant); })};
    } else if (cfg.suite.methods) {
        cv.methods.clear();
        for (const auto& m : *cfg.suite.methods) cv.methods.push_back(in_section("suite.methods", [&] { return parse_method(m); }));
    }
    cv.folds = cfg.suite.folds;
    cv.val_fraction = cfg.suite.val_fraction;
    cv.seed = cfg.seed;
    cv.rprop = cfg.train.rprop;
    cv.stop.patience = cfg.train.patience;
    if (cfg.train.max_epochs) cv.stop.max_epochs = *cfg.train.max_epochs;
    const Architecture arch = make_arch(cfg, mask);
    cv.shape = arch.shape;
    cv.encoding = arch.encoding;
    cv.aux_hidden = arch.aux_hidden;
    cv.aux_activation = arch.aux_activation;
    cv.monotonicity_pairs = cfg.suite.monotonicity_pairs;
    cv.jobs = jobs_of(o);

    const CvReport rep = in_section("suite", [&] { return cross_validate(data, mask, cv); });
    const fs::path dir = o.out;
    write_file_atomic(dir / "cv.csv", rep.to_csv());
    write_file_atomic(dir / "cv.json", rep.to_json());
    if (!o.quiet) {
        for (auto m : cv.methods)
            out << to_string(m) << ": mean test mse " << format_double(rep.mean_test_mse(to_string(m))) << "\n";
        out << "constant: mean test mse " << format_double(rep.mean_constant_mse()) << "\n";
    }
    return kOk;
}

int cmd_bench(const Options& o, std::ostream& out, std::ostream& err) {
    const RunConfig cfg = resolve(o);
    if (cfg.suite.name == "uci") return cmd_bench_cv(o, cfg, out);

    SuiteConfig sc;
    if (cfg.suite.name == "table1")
        sc = table1_config(cfg.seed);
    else if (cfg.suite.name == "table2")
        sc = table2_config(cfg.seed);
    else
        throw ConfigError("suite.name: expected table1, table2 or uci, got '" + cfg.suite.name + "'");

    if (o.variant) {
        sc.methods = {in_section("--variant", [&] { return parse_method(*o.variant); })};
    } else if (cfg.suite.methods) {
        sc.methods.clear();
        for (const auto& m : *cfg.suite.methods) sc.methods.push_back(in_section("suite.methods", [&] { return parse_method(m); }));
    }
    if (std::find(sc.methods.begin(), sc.methods.end(), sc.reference) == sc.methods.end()) sc.reference = sc.methods.front();
    const StopRule stop = make_stop(cfg);
    if (!std::holds_alternative<ProgressStrip>(stop)) throw ConfigError("train.stop: benchmark suites use the progress rule");
    sc.stop = std::get<ProgressStrip>(stop);
    sc.trials = cfg.suite.trials;
    sc.rprop = cfg.train.rprop;
    const Architecture arch = make_arch(cfg, MonotonicityMask::all_constrained(1));
    sc.shape = arch.shape;
    sc.encoding = arch.encoding;
    sc.jobs = jobs_of(o);
    sc.quiet = o.quiet;
    const fs::path dir = o.out;
    sc.persist_path = dir / "trials.jsonl";
    in_section("suite", [&] {
        sc.validate();
        return 0;
    });

    const ExperimentReport rep = run_suite(sc);
    write_file_atomic(dir / "report.csv", rep.to_csv());
    write_file_atomic(dir / "report.json", rep.to_json());
    write_file_atomic(dir / "trials_long.csv", rep.to_long_csv());
    if (!o.quiet) print_report(rep, out);
    std::size_t failed = 0;
    for (const auto& c : rep.cells) failed += c.failed;
    if (failed > 0) {
        err << "warning: " << failed << " trial(s) failed; see report.json\n";
        return kNumericError;
    }
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Smooth min-max monotonic networks: data generation, training, evaluation and benchmarks", "smm"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));
    Options o;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config_path, "JSON configuration file");
        sub->add_option("--seed", o.seed, "Root seed (overrides the config)");
        sub->add_option("--out", o.out, "Output directory")->capture_default_str();
        sub->add_flag("--quiet", o.quiet, "Suppress progress output");
    };

    auto* gen = app.add_subcommand("gen", "Generate a benchmark dataset as CSV");
    common(gen);

    auto* train = app.add_subcommand("train", "Train a model; writes model.json and trace.csv");
    common(train);
    train->add_option("--variant", o.variant, "Model variant")->check(CLI::IsMember({"mm", "smm", "smm64"}));

    auto* eval = app.add_subcommand("eval", "Evaluate a model; writes metrics.json");
    common(eval);
    eval->add_option("--model", o.model_path, "Model JSON file");
    eval->add_option("--data", o.data_path, "CSV file to evaluate on (default: data section of the config)");

    auto* bench = app.add_subcommand("bench", "Run a replication suite; writes report CSV/JSON");
    common(bench);
    bench->add_option("--suite", o.suite, "Suite to run")->check(CLI::IsMember({"table1", "table2", "uci"}));
    bench->add_option("--trials", o.trials, "Trials per (task, method)")->check(CLI::PositiveNumber);
    bench->add_option("--jobs", o.jobs, "Worker threads (default: logical cores)");
    bench->add_option("--variant", o.variant, "Restrict to one method")
        ->check(CLI::IsMember({"mm", "smm", "smm64", "iso"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kOk;
    } catch (const CLI::CallForVersion&) {
        out << kToolVersion << "\n";
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    }

    try {
        if (*gen) return cmd_gen(o, out);
        if (*train) return cmd_train(o, out);
        if (*eval) return cmd_eval(o, out);
        if (*bench) return cmd_bench(o, out, err);
    } catch (const ArtifactVersionError& e) {
        err << "error: " << e.what() << "\n";
        return kVersionError;
    } catch (const NumericError& e) {
        err << "error: " << e.what() << " (block " << e.block() << ")\n";
        return kNumericError;
    } catch (const ContractViolation& e) {
        err << "error: " << e.what() << "\n";
        return kConfigError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}

}  // namespace smm::cli
