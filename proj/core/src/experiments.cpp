#include "smm/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <numeric>
#include <tuple>

#include <nlohmann/json.hpp>

#include "parallel.hpp"
#include "smm/error.hpp"
#include "smm/gradients.hpp"
#include "smm/io.hpp"
#include "smm/isotonic.hpp"

namespace smm {

using nlohmann::json;

std::string_view to_string(Method m) {
    switch (m) {
        case Method::SMM: return "smm";
        case Method::MM: return "mm";
        case Method::Iso: return "iso";
        case Method::SMM64: return "smm64";
    }
    return "?";
}

Method parse_method(std::string_view s) {
    if (s == "smm") return Method::SMM;
    if (s == "mm") return Method::MM;
    if (s == "iso") return Method::Iso;
    if (s == "smm64") return Method::SMM64;
    throw ContractViolation("unknown method '" + std::string(s) + "' (expected smm, mm, iso or smm64)");
}

MonotonicityProbe probe_monotonicity(const ModelParams& params, RngStream& rng, std::size_t pairs, double lo,
                                     double hi) {
    const auto& mask = params.architecture().mask;
    const auto constrained = mask.constrained_indices();
    detail::require(!constrained.empty(), "probe_monotonicity: model has no constrained features");
    MonotonicityProbe probe;
    probe.pairs = pairs;
    std::vector<double> x(mask.size()), x2(mask.size());
    for (std::size_t i = 0; i < pairs; ++i) {
        for (double& v : x) v = rng.uniform(lo, hi);
        x2 = x;
        bool moved = false;
        for (std::size_t m : constrained) {
            if (rng.uniform() < 0.5) {
                x2[m] += rng.uniform(0.0, hi - lo);
                moved = true;
            }
        }
        if (!moved) x2[constrained[rng.below(constrained.size())]] += rng.uniform(0.0, hi - lo);
        const double before = predict(params, x);
        const double after = predict(params, x2);
        if (after < before) {
            ++probe.violations;
            probe.worst_decrease = std::max(probe.worst_decrease, before - after);
        }
    }
    return probe;
}

// --- suite configuration ---------------------------------------------------------

std::string SuiteConfig::config_hash() const {
    json j;
    json tasks_j = json::array();
    for (const auto& t : tasks)
        tasks_j.push_back({{"kind", std::string(to_string(t.kind))},
                           {"dim", t.dim},
                           {"n_train", t.n_train},
                           {"n_test", t.n_test},
                           {"noise_sigma", double_to_hex(t.noise_sigma)}});
    j["tasks"] = std::move(tasks_j);
    json methods_j = json::array();
    for (auto m : methods) methods_j.push_back(std::string(to_string(m)));
    j["methods"] = std::move(methods_j);
    j["trials"] = trials;
    j["root_seed"] = root_seed;
    j["rprop"] = {{"eta_plus", double_to_hex(rprop.eta_plus)},   {"eta_minus", double_to_hex(rprop.eta_minus)},
                  {"delta0", double_to_hex(rprop.delta0)},       {"delta_min", double_to_hex(rprop.delta_min)},
                  {"delta_max", double_to_hex(rprop.delta_max)}};
    j["stop"] = {{"k", stop.k}, {"tau", double_to_hex(stop.tau)}, {"max_epochs", stop.max_epochs}};
    j["shape"] = shape.neurons;
    j["encoding"] = std::string(to_string(encoding));
    j["reference"] = std::string(to_string(reference));
    j["tool_version"] = std::string(kToolVersion);
    return hash_hex(j.dump());
}

void SuiteConfig::validate() const {
    detail::require(trials >= 1, "suite: trials must be at least 1");
    detail::require(!tasks.empty(), "suite: no tasks");
    detail::require(!methods.empty(), "suite: no methods");
    shape.validate();
    rprop.validate();
    smm::validate(StopRule{stop});
    for (const auto& t : tasks) {
        t.validate();
        for (auto m : methods) {
            if (m == Method::Iso && t.input_dim() != 1)
                throw ContractViolation("suite: iso only supports univariate tasks (" + t.task_id() + ")");
            if (m == Method::SMM64)
                throw ContractViolation("suite: smm64 needs unconstrained features; use cross-validation instead");
        }
    }
}

RngStream trial_data_stream(std::uint64_t root_seed, int trial, std::string_view task_id) {
    return RngStream(root_seed, static_cast<std::uint64_t>(trial)).split(fnv1a64(task_id));
}

RngStream trial_init_stream(std::uint64_t root_seed, int trial, std::string_view task_id) {
    return trial_data_stream(root_seed, trial, task_id).split(fnv1a64("init"));
}

TrialResult run_trial(const SuiteConfig& cfg, const BenchmarkSpec& task, Method method, int trial) {
    TrialResult r;
    r.task = task.task_id();
    r.method = std::string(to_string(method));
    r.trial = trial;
    const RngStream data_rng = trial_data_stream(cfg.root_seed, trial, r.task);
    BenchmarkSpec spec = task;
    spec.seed = data_rng.seed();
    spec.stream = data_rng.stream_id();
    r.seed = spec.seed;
    r.stream = spec.stream;

    const auto start = std::chrono::steady_clock::now();
    try {
        const BenchmarkData data = make_dataset(spec);
        if (method == Method::Iso) {
            const IsotonicFit iso = pava_fit(data.train.inputs, data.train.targets, {0.0, 1.0});
            auto mse = [&](const Dataset& ds) {
                double s = 0.0;
                for (std::size_t i = 0; i < ds.size(); ++i) {
                    const double e = iso_predict(iso, ds.inputs[i]) - ds.targets[i];
                    s += e * e;
                }
                return s / static_cast<double>(ds.size());
            };
            r.train_mse = mse(data.train);
            r.test_mse = mse(data.test);
        } else {
            Architecture arch;
            arch.variant = method == Method::MM ? Variant::MM : Variant::SMM;
            arch.shape = cfg.shape;
            arch.mask = MonotonicityMask::all_constrained(spec.input_dim());
            arch.encoding = cfg.encoding;
            RngStream init_rng = trial_init_stream(cfg.root_seed, trial, r.task);
            TrainConfig tc;
            tc.rprop = cfg.rprop;
            tc.stop = cfg.stop;
            tc.seed = init_rng.seed();
            tc.stream = init_rng.stream_id();
            const FitResult fit = fit_from(init_params(arch, init_rng), data.train, std::nullopt, tc);
            r.train_mse = mse_loss(fit.params, data.train);
            r.test_mse = mse_loss(fit.params, data.test);
            r.epochs = static_cast<int>(fit.trace.rows.size());
            if (method == Method::MM) r.active_neurons = active_neuron_stats(fit.params, data.test).active;
        }
    } catch (const std::exception& e) {
        r.error = e.what();
    }
    r.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

namespace {

json trial_to_json(const TrialResult& r, bool with_time) {
    json j{{"task", r.task},         {"method", r.method},       {"trial", r.trial},
           {"seed", r.seed},         {"stream", r.stream},       {"train_mse", r.train_mse},
           {"test_mse", r.test_mse}, {"epochs", r.epochs}};
    if (r.active_neurons) j["active_neurons"] = *r.active_neurons;
    if (r.error) j["error"] = *r.error;
    if (with_time) j["wall_time"] = r.wall_time;
    return j;
}

TrialResult trial_from_json(const json& j) {
    TrialResult r;
    r.task = j.at("task").get<std::string>();
    r.method = j.at("method").get<std::string>();
    r.trial = j.at("trial").get<int>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.stream = j.at("stream").get<std::uint64_t>();
    r.train_mse = j.at("train_mse").get<double>();
    r.test_mse = j.at("test_mse").get<double>();
    r.epochs = j.at("epochs").get<int>();
    if (j.contains("active_neurons")) r.active_neurons = j["active_neurons"].get<std::size_t>();
    if (j.contains("error")) r.error = j["error"].get<std::string>();
    r.wall_time = j.value("wall_time", 0.0);
    return r;
}

using TrialKey = std::tuple<std::string, std::string, int>;

std::map<TrialKey, TrialResult> load_persisted(const std::filesystem::path& path, const std::string& hash) {
    std::map<TrialKey, TrialResult> out;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error&) {
            continue;  // torn final line from an interrupted run
        }
        if (j.value("config_hash", "") != hash) continue;
        TrialResult r = trial_from_json(j);
        if (!r.ok()) continue;
        out[{r.task, r.method, r.trial}] = std::move(r);
    }
    return out;
}

std::string scaled(double v) { return format_double(v * 1e3); }

}  // namespace

ExperimentReport run_suite(const SuiteConfig& cfg) {
    cfg.validate();
    const std::string hash = cfg.config_hash();

    struct Item {
        const BenchmarkSpec* task;
        Method method;
        int trial;
    };
    std::vector<Item> items;
    for (const auto& t : cfg.tasks)
        for (auto m : cfg.methods)
            for (int i = 0; i < cfg.trials; ++i) items.push_back({&t, m, i});

    std::map<TrialKey, TrialResult> done;
    if (cfg.persist_path && std::filesystem::exists(*cfg.persist_path)) done = load_persisted(*cfg.persist_path, hash);

    std::vector<std::optional<TrialResult>> results(items.size());
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& it = items[i];
        const auto found = done.find({it.task->task_id(), std::string(to_string(it.method)), it.trial});
        if (found != done.end())
            results[i] = found->second;
        else
            todo.push_back(i);
    }

    std::ofstream log;
    if (cfg.persist_path) {
        if (cfg.persist_path->has_parent_path()) std::filesystem::create_directories(cfg.persist_path->parent_path());
        log.open(*cfg.persist_path, std::ios::app);
    }
    std::mutex log_mutex;
    detail::parallel_for(todo.size(), cfg.jobs, [&](std::size_t w) {
        const std::size_t i = todo[w];
        const auto& it = items[i];
        TrialResult r = run_trial(cfg, *it.task, it.method, it.trial);
        std::lock_guard lock(log_mutex);
        if (log.is_open()) {
            json j = trial_to_json(r, true);
            j["config_hash"] = hash;
            log << j.dump() << '\n';
            log.flush();
        }
        if (!cfg.quiet)
            std::cerr << r.task << " " << r.method << " trial " << r.trial << ": test_mse=" << r.test_mse
                      << (r.ok() ? "" : " FAILED: " + *r.error) << "\n";
        results[i] = std::move(r);
    });

    std::vector<TrialResult> flat;
    for (auto& r : results) flat.push_back(std::move(*r));
    return build_report(cfg, std::move(flat));
}

ExperimentReport build_report(const SuiteConfig& cfg, std::vector<TrialResult> results) {
    ExperimentReport rep;
    rep.config_hash = cfg.config_hash();
    rep.root_seed = cfg.root_seed;
    rep.trials = cfg.trials;
    rep.reference = std::string(to_string(cfg.reference));
    std::sort(results.begin(), results.end(), [](const TrialResult& a, const TrialResult& b) {
        return std::tie(a.task, a.method, a.trial) < std::tie(b.task, b.method, b.trial);
    });
    rep.results = std::move(results);

    auto rows_of = [&](const std::string& task, const std::string& method) {
        std::map<int, const TrialResult*> out;
        for (const auto& r : rep.results)
            if (r.task == task && r.method == method && r.ok()) out[r.trial] = &r;
        return out;
    };

    for (const auto& t : cfg.tasks) {
        const std::string task = t.task_id();
        const auto ref_rows = rows_of(task, rep.reference);
        for (auto m : cfg.methods) {
            CellReport cell;
            cell.task = task;
            cell.method = std::string(to_string(m));
            const auto rows = rows_of(task, cell.method);
            for (const auto& r : rep.results)
                if (r.task == task && r.method == cell.method && !r.ok()) ++cell.failed;
            cell.completed = rows.size();
            cell.complete = cell.completed == static_cast<std::size_t>(cfg.trials);
            std::vector<double> train, test, active;
            for (const auto& [trial, r] : rows) {
                train.push_back(r->train_mse);
                test.push_back(r->test_mse);
                if (r->active_neurons) active.push_back(static_cast<double>(*r->active_neurons));
            }
            if (!rows.empty()) {
                cell.train = summarize(train);
                cell.test = summarize(test);
            }
            if (!active.empty()) cell.active_neurons = summarize(active);
            if (m != cfg.reference) {
                std::vector<double> a, b;
                for (const auto& [trial, r] : rows) {
                    const auto ref = ref_rows.find(trial);
                    if (ref == ref_rows.end()) continue;
                    a.push_back(ref->second->test_mse);
                    b.push_back(r->test_mse);
                }
                if (a.size() >= 5) cell.p_value = wilcoxon_paired(a, b);
            }
            rep.cells.push_back(std::move(cell));
        }
    }
    return rep;
}

const CellReport& ExperimentReport::cell(std::string_view task, std::string_view method) const {
    for (const auto& c : cells)
        if (c.task == task && c.method == method) return c;
    throw ContractViolation("report: no cell for " + std::string(task) + "/" + std::string(method));
}

std::string ExperimentReport::to_csv() const {
    std::string out = "# config_hash=" + config_hash + " root_seed=" + std::to_string(root_seed) +
                      " trials=" + std::to_string(trials) + " tool_version=" + std::string(kToolVersion) +
                      " mse_scale=1e3 quantiles=linear\n";
    out += "task,method,completed,failed,complete,train_median,train_q1,train_q3,test_median,test_q1,test_q3,"
           "test_outliers,p_value_vs_" + reference + ",active_median,active_max,active_min\n";
    for (const auto& c : cells) {
        out += c.task + "," + c.method + "," + std::to_string(c.completed) + "," + std::to_string(c.failed) + "," +
               (c.complete ? "true" : "false") + ",";
        if (c.completed > 0) {
            out += scaled(c.train.median) + "," + scaled(c.train.q1) + "," + scaled(c.train.q3) + "," +
                   scaled(c.test.median) + "," + scaled(c.test.q1) + "," + scaled(c.test.q3) + "," +
                   std::to_string(c.test.outliers.size()) + ",";
        } else {
            out += ",,,,,,,";
        }
        out += (c.p_value ? format_double(*c.p_value) : "") + ",";
        if (c.active_neurons)
            out += format_double(c.active_neurons->median) + "," + format_double(c.active_neurons->max) + "," +
                   format_double(c.active_neurons->min);
        else
            out += ",,";
        out += "\n";
    }
    return out;
}

namespace {

json summary_to_json(const Summary& s) {
    return json{{"median", s.median}, {"q1", s.q1}, {"q3", s.q3}, {"min", s.min}, {"max", s.max}, {"outliers", s.outliers}};
}

}  // namespace

std::string ExperimentReport::to_json() const {
    json j;
    j["meta"] = {{"config_hash", config_hash},
                 {"root_seed", root_seed},
                 {"trials", trials},
                 {"reference", reference},
                 {"tool_version", std::string(kToolVersion)},
                 {"quantiles", "linear"}};
    json cells_j = json::array();
    for (const auto& c : cells) {
        json cj{{"task", c.task}, {"method", c.method}, {"completed", c.completed}, {"failed", c.failed}, {"complete", c.complete}};
        if (c.completed > 0) {
            cj["train_mse"] = summary_to_json(c.train);
            cj["test_mse"] = summary_to_json(c.test);
        }
        if (c.p_value) cj["p_value"] = *c.p_value;
        if (c.active_neurons) cj["active_neurons"] = summary_to_json(*c.active_neurons);
        cells_j.push_back(std::move(cj));
    }
    j["cells"] = std::move(cells_j);
    json trials_j = json::array();
    for (const auto& r : results) trials_j.push_back(trial_to_json(r, false));
    j["trials"] = std::move(trials_j);
    return j.dump(2) + "\n";
}

std::string ExperimentReport::to_long_csv() const {
    std::string out = "# config_hash=" + config_hash + " root_seed=" + std::to_string(root_seed) +
                      " tool_version=" + std::string(kToolVersion) + "\n";
    out += "task,method,trial,split,mse\n";
    for (const auto& r : results) {
        if (!r.ok()) continue;
        const std::string prefix = r.task + "," + r.method + "," + std::to_string(r.trial) + ",";
        out += prefix + "train," + format_double(r.train_mse) + "\n";
        out += prefix + "test," + format_double(r.test_mse) + "\n";
    }
    return out;
}

SuiteConfig table1_config(std::uint64_t root_seed) {
    SuiteConfig cfg;
    cfg.tasks = {BenchmarkSpec::univariate(TargetKind::FSq), BenchmarkSpec::univariate(TargetKind::FSqrt),
                 BenchmarkSpec::univariate(TargetKind::FSig)};
    cfg.methods = {Method::SMM, Method::MM, Method::Iso};
    cfg.root_seed = root_seed;
    return cfg;
}

SuiteConfig table2_config(std::uint64_t root_seed) {
    SuiteConfig cfg;
    cfg.tasks = {BenchmarkSpec::multivariate(2), BenchmarkSpec::multivariate(4), BenchmarkSpec::multivariate(6)};
    cfg.methods = {Method::SMM};
    cfg.root_seed = root_seed;
    return cfg;
}

ExperimentReport replicate_table1(std::uint64_t root_seed, std::size_t jobs) {
    auto cfg = table1_config(root_seed);
    cfg.jobs = jobs;
    return run_suite(cfg);
}

ExperimentReport replicate_table2(std::uint64_t root_seed, std::size_t jobs) {
    auto cfg = table2_config(root_seed);
    cfg.jobs = jobs;
    return run_suite(cfg);
}

// --- cross-validation ----------------------------------------------------------

double CvReport::mean_test_mse(std::string_view method) const {
    double s = 0.0;
    std::size_t n = 0;
    for (const auto& f : folds)
        if (f.method == method) {
            s += f.test_mse;
            ++n;
        }
    detail::require(n > 0, "cv report: no folds for method");
    return s / static_cast<double>(n);
}

double CvReport::mean_constant_mse() const {
    std::map<int, double> per_fold;
    for (const auto& f : folds) per_fold[f.fold] = f.constant_test_mse;
    detail::require(!per_fold.empty(), "cv report: no folds");
    double s = 0.0;
    for (const auto& [fold, v] : per_fold) s += v;
    return s / static_cast<double>(per_fold.size());
}

std::string CvReport::to_csv() const {
    std::string out = "# config_hash=" + config_hash + " tool_version=" + std::string(kToolVersion) + "\n";
    out += "method,fold,param_count,train_mse,val_mse,test_mse,constant_test_mse,epochs,selected_epoch,"
           "monotonicity_pairs,monotonicity_violations\n";
    for (const auto& f : folds) {
        out += f.method + "," + std::to_string(f.fold) + "," + std::to_string(f.param_count) + "," +
               format_double(f.train_mse) + "," + format_double(f.val_mse) + "," + format_double(f.test_mse) + "," +
               format_double(f.constant_test_mse) + "," + std::to_string(f.epochs) + "," +
               std::to_string(f.selected_epoch) + "," + std::to_string(f.probe.pairs) + "," +
               std::to_string(f.probe.violations) + "\n";
    }
    return out;
}

std::string CvReport::to_json() const {
    json j;
    j["meta"] = {{"config_hash", config_hash}, {"tool_version", std::string(kToolVersion)}};
    json folds_j = json::array();
    std::vector<std::string> methods;
    for (const auto& f : folds) {
        folds_j.push_back({{"method", f.method},
                           {"fold", f.fold},
                           {"param_count", f.param_count},
                           {"train_mse", f.train_mse},
                           {"val_mse", f.val_mse},
                           {"test_mse", f.test_mse},
                           {"constant_test_mse", f.constant_test_mse},
                           {"epochs", f.epochs},
                           {"selected_epoch", f.selected_epoch},
                           {"monotonicity_violations", f.probe.violations}});
        if (std::find(methods.begin(), methods.end(), f.method) == methods.end()) methods.push_back(f.method);
    }
    j["folds"] = std::move(folds_j);
    json summary = json::object();
    for (const auto& m : methods) summary[m] = {{"mean_test_mse", mean_test_mse(m)}};
    if (!folds.empty()) summary["constant"] = {{"mean_test_mse", mean_constant_mse()}};
    j["summary"] = std::move(summary);
    return j.dump(2) + "\n";
}

CvReport cross_validate(const Dataset& data, const MonotonicityMask& mask, const CvConfig& cfg) {
    detail::require(mask.size() == data.dim, "cross_validate: mask width does not match the data");
    detail::require(!cfg.methods.empty(), "cross_validate: no methods");
    cfg.rprop.validate();
    validate(StopRule{cfg.stop});
    for (auto m : cfg.methods)
        detail::require(m == Method::SMM || m == Method::SMM64 || m == Method::MM,
                        "cross_validate: only neural methods are supported");

    const auto splits = kfold_with_validation(data, cfg.folds, cfg.val_fraction, cfg.seed);

    json hj{{"folds", cfg.folds},
            {"val_fraction", double_to_hex(cfg.val_fraction)},
            {"seed", cfg.seed},
            {"patience", cfg.stop.patience},
            {"max_epochs", cfg.stop.max_epochs},
            {"shape", cfg.shape.neurons},
            {"aux_hidden", cfg.aux_hidden},
            {"data", hash_hex(to_csv(data))},
            {"mask", mask.flags()},
            {"tool_version", std::string(kToolVersion)}};
    json methods_j = json::array();
    for (auto m : cfg.methods) methods_j.push_back(std::string(to_string(m)));
    hj["methods"] = std::move(methods_j);

    CvReport report;
    report.config_hash = hash_hex(hj.dump());
    report.folds.resize(splits.size() * cfg.methods.size());

    detail::parallel_for(report.folds.size(), cfg.jobs, [&](std::size_t w) {
        const std::size_t fold = w / cfg.methods.size();
        const Method method = cfg.methods[w % cfg.methods.size()];
        const auto& split = splits[fold];
        const auto [train, norm] = normalize_unit(split.train);
        const Dataset val = norm.apply(split.val);
        const Dataset test = norm.apply(split.test);

        Architecture arch;
        arch.variant = method == Method::SMM64 ? Variant::SMM64 : (method == Method::MM ? Variant::MM : Variant::SMM);
        arch.shape = cfg.shape;
        arch.mask = mask;
        arch.encoding = cfg.encoding;
        arch.aux_hidden = cfg.aux_hidden;
        arch.aux_activation = cfg.aux_activation;

        const RngStream stream = RngStream(cfg.seed, fold + 1).split(fnv1a64(to_string(method)));
        TrainConfig tc;
        tc.rprop = cfg.rprop;
        tc.stop = cfg.stop;
        tc.seed = stream.seed();
        tc.stream = stream.stream_id();
        const FitResult fit = smm::fit(arch, train, val, tc);

        CvFoldResult r;
        r.method = std::string(to_string(method));
        r.fold = static_cast<int>(fold);
        r.param_count = fit.params.size();
        r.train_mse = mse_loss(fit.params, train);
        r.val_mse = mse_loss(fit.params, val);
        r.test_mse = mse_loss(fit.params, test);
        const double mean = std::accumulate(train.targets.begin(), train.targets.end(), 0.0) /
                            static_cast<double>(train.size());
        double c = 0.0;
        for (double y : test.targets) c += (y - mean) * (y - mean);
        r.constant_test_mse = c / static_cast<double>(test.size());
        r.epochs = static_cast<int>(fit.trace.rows.size());
        r.selected_epoch = fit.trace.selected_epoch;
        RngStream probe_rng = stream.split(fnv1a64("probe"));
        r.probe = probe_monotonicity(fit.params, probe_rng, cfg.monotonicity_pairs);
        report.folds[w] = std::move(r);
    });
    return report;
}

}  // namespace smm
