#include "fsel/bench.hpp"

#include <chrono>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fsel/metrics.hpp"
#include "fsel/parallel.hpp"
#include "fsel/rng.hpp"
#include "fsel/split.hpp"
#include "fsel/synthetic.hpp"

namespace fsel {

using nlohmann::json;

namespace {

json estimator_to_json(const EstimatorSpec& spec) {
    json j;
    j["algorithm"] = to_string(spec.algorithm);
    switch (spec.algorithm) {
        case Algorithm::ols: break;
        case Algorithm::elastic_net:
            j["lambda"] = spec.elastic_net.lambda;
            j["l1_ratio"] = spec.elastic_net.l1_ratio;
            j["max_sweeps"] = spec.elastic_net.max_sweeps;
            j["tol"] = spec.elastic_net.tol;
            break;
        case Algorithm::logistic:
            j["l2_lambda"] = spec.logistic.l2_lambda;
            j["max_iter"] = spec.logistic.max_iter;
            j["tol"] = spec.logistic.tol;
            break;
        case Algorithm::linear_svm:
            j["l2_lambda"] = spec.svm.l2_lambda;
            j["max_iter"] = spec.svm.max_iter;
            break;
        case Algorithm::cart:
            j["max_depth"] = spec.cart.max_depth;
            j["min_leaf"] = spec.cart.min_leaf;
            break;
        case Algorithm::random_forest:
            j["n_trees"] = spec.forest.n_trees;
            j["max_depth"] = spec.forest.max_depth;
            j["mtry"] = spec.forest.mtry;
            j["bootstrap"] = spec.forest.bootstrap;
            j["seed"] = spec.forest.seed;
            break;
        case Algorithm::gbt:
            j["n_rounds"] = spec.gbt.n_rounds;
            j["eta"] = spec.gbt.eta;
            j["max_depth"] = spec.gbt.max_depth;
            j["reg_lambda"] = spec.gbt.reg_lambda;
            j["gamma"] = spec.gbt.gamma;
            j["seed"] = spec.gbt.seed;
            break;
    }
    return j;
}

EstimatorSpec estimator_from_json(const json& j) {
    EstimatorSpec spec;
    spec.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
    switch (spec.algorithm) {
        case Algorithm::ols: break;
        case Algorithm::elastic_net:
            spec.elastic_net.lambda = j.value("lambda", spec.elastic_net.lambda);
            spec.elastic_net.l1_ratio = j.value("l1_ratio", spec.elastic_net.l1_ratio);
            spec.elastic_net.max_sweeps = j.value("max_sweeps", spec.elastic_net.max_sweeps);
            spec.elastic_net.tol = j.value("tol", spec.elastic_net.tol);
            break;
        case Algorithm::logistic:
            spec.logistic.l2_lambda = j.value("l2_lambda", spec.logistic.l2_lambda);
            spec.logistic.max_iter = j.value("max_iter", spec.logistic.max_iter);
            spec.logistic.tol = j.value("tol", spec.logistic.tol);
            break;
        case Algorithm::linear_svm:
            spec.svm.l2_lambda = j.value("l2_lambda", spec.svm.l2_lambda);
            spec.svm.max_iter = j.value("max_iter", spec.svm.max_iter);
            break;
        case Algorithm::cart:
            spec.cart.max_depth = j.value("max_depth", spec.cart.max_depth);
            spec.cart.min_leaf = j.value("min_leaf", spec.cart.min_leaf);
            break;
        case Algorithm::random_forest:
            spec.forest.n_trees = j.value("n_trees", spec.forest.n_trees);
            spec.forest.max_depth = j.value("max_depth", spec.forest.max_depth);
            spec.forest.mtry = j.value("mtry", spec.forest.mtry);
            spec.forest.bootstrap = j.value("bootstrap", spec.forest.bootstrap);
            spec.forest.seed = j.value("seed", spec.forest.seed);
            break;
        case Algorithm::gbt:
            spec.gbt.n_rounds = j.value("n_rounds", spec.gbt.n_rounds);
            spec.gbt.eta = j.value("eta", spec.gbt.eta);
            spec.gbt.max_depth = j.value("max_depth", spec.gbt.max_depth);
            spec.gbt.reg_lambda = j.value("reg_lambda", spec.gbt.reg_lambda);
            spec.gbt.gamma = j.value("gamma", spec.gbt.gamma);
            spec.gbt.seed = j.value("seed", spec.gbt.seed);
            break;
    }
    spec.validate();
    return spec;
}

json selector_to_json(const SelectorConfig& cfg) {
    json j;
    j["method"] = to_string(cfg.method);
    j["name"] = cfg.label();
    switch (cfg.method) {
        case SelectorMethod::variance_threshold:
            j["threshold"] = cfg.threshold;
            break;
        case SelectorMethod::select_k_best:
            j["k"] = cfg.k;
            j["score_fn"] = to_string(cfg.score_fn);
            break;
        case SelectorMethod::mutual_info:
            j["k"] = cfg.k;
            break;
        case SelectorMethod::model_select:
            j["estimator"] = estimator_to_json(cfg.estimator);
            break;
        case SelectorMethod::rfe:
            j["k"] = cfg.k;
            j["rfe_step_fraction"] = cfg.rfe_step_fraction;
            j["estimator"] = estimator_to_json(cfg.estimator);
            break;
        case SelectorMethod::forward:
            j["k"] = cfg.k;
            j["epsilon"] = cfg.epsilon;
            j["cv_folds"] = cfg.cv_folds;
            j["estimator"] = estimator_to_json(cfg.estimator);
            break;
        case SelectorMethod::frame:
            j["k"] = cfg.k;
            j["frame_pool"] = cfg.frame_pool;
            j["rfe_step_fraction"] = cfg.rfe_step_fraction;
            j["epsilon"] = cfg.epsilon;
            j["cv_folds"] = cfg.cv_folds;
            j["estimator"] = estimator_to_json(cfg.estimator);
            break;
    }
    j["seed"] = cfg.seed;
    return j;
}

SelectorConfig selector_from_json(const json& j) {
    SelectorConfig cfg;
    cfg.method = selector_method_from_string(j.at("method").get<std::string>());
    cfg.k = j.value("k", cfg.k);
    if (j.contains("score_fn")) cfg.score_fn = score_fn_from_string(j["score_fn"].get<std::string>());
    cfg.threshold = j.value("threshold", cfg.threshold);
    if (j.contains("estimator")) cfg.estimator = estimator_from_json(j["estimator"]);
    cfg.rfe_step_fraction = j.value("rfe_step_fraction", cfg.rfe_step_fraction);
    cfg.frame_pool = j.value("frame_pool", cfg.frame_pool);
    cfg.epsilon = j.value("epsilon", cfg.epsilon);
    cfg.cv_folds = j.value("cv_folds", cfg.cv_folds);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.name = j.value("name", std::string{});
    return cfg;
}

SyntheticSpec synthetic_from_json(const json& j) {
    SyntheticSpec s;
    s.n_samples = j.value("n_samples", s.n_samples);
    s.n_features = j.value("n_features", s.n_features);
    s.n_informative = j.value("n_informative", s.n_informative);
    s.n_redundant = j.value("n_redundant", s.n_redundant);
    s.sparsity = j.value("sparsity", s.sparsity);
    s.noise_sigma = j.value("noise_sigma", s.noise_sigma);
    s.label_flip = j.value("label_flip", s.label_flip);
    s.class_sep = j.value("class_sep", s.class_sep);
    s.n_classes = j.value("n_classes", s.n_classes);
    s.seed = j.value("seed", s.seed);
    s.validate();
    return s;
}

CsvSource csv_source_from_json(const json& j) {
    CsvSource src;
    src.path = j.at("path").get<std::string>();
    if (j.contains("delimiter")) {
        const auto delim = j["delimiter"].get<std::string>();
        if (delim.size() != 1) throw std::invalid_argument("csv delimiter must be one character");
        src.options.delimiter = delim[0];
    }
    if (j.contains("target")) src.options.target_column = j["target"].get<std::string>();
    if (j.contains("target_index")) src.options.target_index = j["target_index"].get<std::size_t>();
    if (j.contains("missing_tokens"))
        src.options.missing_tokens = j["missing_tokens"].get<std::vector<std::string>>();
    if (j.contains("task")) {
        const auto t = j["task"].get<std::string>();
        if (t != "auto") src.options.task = task_from_string(t);
    }
    return src;
}

std::vector<std::pair<std::string, EstimatorSpec>> models_from_json(const json& arr) {
    std::vector<std::pair<std::string, EstimatorSpec>> models;
    for (const auto& j : arr) {
        auto spec = estimator_from_json(j);
        models.emplace_back(j.value("name", spec.name()), std::move(spec));
    }
    return models;
}

}  // namespace

std::string estimator_spec_to_json(const std::string& name, const EstimatorSpec& spec) {
    json j = estimator_to_json(spec);
    j["name"] = name;
    return j.dump();
}

BenchConfig parse_bench_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config is not valid JSON: ") + e.what());
    }
    BenchConfig cfg;
    cfg.master_seed = j.value("master_seed", cfg.master_seed);
    cfg.repeats = j.value("repeats", cfg.repeats);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.output_dir = j.value("output_dir", cfg.output_dir);
    if (j.contains("split")) {
        const auto& s = j["split"];
        cfg.split.test_fraction = s.value("test_fraction", cfg.split.test_fraction);
        cfg.split.stratify = s.value("stratify", cfg.split.stratify);
        cfg.split.seed = s.value("seed", cfg.split.seed);
    }
    for (const auto& sj : j.value("selectors", json::array())) cfg.selectors.push_back(selector_from_json(sj));
    if (j.contains("models")) cfg.models = models_from_json(j["models"]);
    for (const auto& dj : j.value("datasets", json::array())) {
        DatasetConfig d;
        d.name = dj.at("name").get<std::string>();
        if (dj.contains("synthetic")) d.synthetic = synthetic_from_json(dj["synthetic"]);
        if (dj.contains("csv")) d.csv = csv_source_from_json(dj["csv"]);
        d.undersample = dj.value("undersample", false);
        if (dj.contains("preprocess")) {
            const auto& p = dj["preprocess"];
            d.preprocess.encode = p.value("encode", true);
            d.preprocess.impute = p.value("impute", true);
            d.preprocess.standardize = p.value("standardize", true);
        }
        for (const auto& sj : dj.value("selectors", json::array()))
            d.selectors.push_back(selector_from_json(sj));
        if (dj.contains("models")) d.models = models_from_json(dj["models"]);
        cfg.datasets.push_back(std::move(d));
    }
    cfg.validate();
    return cfg;
}

BenchConfig load_bench_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_bench_config(buf.str());
}

void BenchConfig::validate() const {
    if (datasets.empty()) throw std::invalid_argument("config: at least one dataset required");
    std::set<std::string> names;
    for (const auto& d : datasets) {
        if (d.name.empty()) throw std::invalid_argument("config: dataset without a name");
        if (!names.insert(d.name).second)
            throw std::invalid_argument("config: duplicate dataset name \"" + d.name + "\"");
        if (d.synthetic.has_value() == d.csv.has_value())
            throw std::invalid_argument("config: dataset \"" + d.name +
                                        "\" needs exactly one of synthetic/csv");
        if (d.csv && !std::filesystem::exists(d.csv->path))
            throw std::invalid_argument("config: dataset \"" + d.name + "\" csv not found: " +
                                        d.csv->path.string());
        const auto& sel = d.selectors.empty() ? selectors : d.selectors;
        const auto& mdl = d.models.empty() ? models : d.models;
        if (sel.empty()) throw std::invalid_argument("config: no selectors for dataset \"" + d.name + "\"");
        if (mdl.empty()) throw std::invalid_argument("config: no models for dataset \"" + d.name + "\"");
        std::set<std::string> sel_names, mdl_names;
        for (const auto& s : sel)
            if (!sel_names.insert(s.label()).second)
                throw std::invalid_argument("config: duplicate selector name \"" + s.label() + "\"");
        for (const auto& m : mdl)
            if (!mdl_names.insert(m.first).second)
                throw std::invalid_argument("config: duplicate model name \"" + m.first + "\"");
    }
    if (repeats < 1) throw std::invalid_argument("config: repeats must be >= 1");
    if (split.test_fraction <= 0.0 || split.test_fraction >= 1.0)
        throw std::invalid_argument("config: split.test_fraction outside (0,1)");
}

std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& dataset,
                        const std::string& selector, const std::string& model, std::size_t repeat) {
    std::uint64_t s = master_seed;
    s = hash_str(s, dataset);
    s = hash_str(s, selector);
    s = hash_str(s, model);
    return mix_seed(s, repeat);
}

namespace {

struct PreparedDataset {
    Dataset train;
    Dataset test;
    Task task = Task::regression;
    std::string error;  // dataset-level failure hits every cell
};

PreparedDataset prepare_dataset(const DatasetConfig& cfg, const SplitSpec& split,
                                std::uint64_t master_seed) {
    PreparedDataset out;
    try {
        Dataset full = cfg.synthetic ? generate_synthetic(*cfg.synthetic)
                                     : load_csv(cfg.csv->path, cfg.csv->options);
        out.task = full.task;
        auto [train, test] = train_test_split(full, split.test_fraction, split.seed, split.stratify);
        if (cfg.undersample) train = undersample(train, mix_seed(hash_str(master_seed, cfg.name), 0xA11));
        PreprocessState state;
        out.train = fit_transform(train, state, cfg.preprocess);
        out.test = transform(test, state, cfg.preprocess);
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

struct CellPlan {
    std::size_t dataset_index;
    SelectorConfig selector;
    std::string model_name;
    EstimatorSpec model;
    std::size_t repeat;
    std::string dataset_name;
    bool undersample;
    PreprocessSwitches preprocess;
};

void reseed_estimator(EstimatorSpec& spec, std::uint64_t seed) {
    spec.forest.seed = seed;
    spec.gbt.seed = seed;
}

BenchRecord run_cell(const CellPlan& plan, const PreparedDataset& data, const SplitSpec& split,
                     std::uint64_t master_seed) {
    BenchRecord rec;
    rec.dataset = plan.dataset_name;
    rec.selector = plan.selector.label();
    rec.model = plan.model_name;
    rec.repeat = plan.repeat;
    rec.task = data.task;
    rec.seed = cell_seed(master_seed, rec.dataset, rec.selector, rec.model, plan.repeat);

    SelectorConfig sel = plan.selector;
    sel.seed = mix_seed(rec.seed, 1);
    reseed_estimator(sel.estimator, mix_seed(rec.seed, 2));
    EstimatorSpec model_spec = plan.model;
    reseed_estimator(model_spec, mix_seed(rec.seed, 3));

    {
        json echo;
        echo["selector"] = selector_to_json(sel);
        json model_echo = estimator_to_json(model_spec);
        model_echo["name"] = plan.model_name;
        echo["model"] = model_echo;
        echo["split"] = {{"test_fraction", split.test_fraction},
                         {"stratify", split.stratify},
                         {"seed", split.seed}};
        echo["undersample"] = plan.undersample;
        echo["preprocess"] = {{"encode", plan.preprocess.encode},
                              {"impute", plan.preprocess.impute},
                              {"standardize", plan.preprocess.standardize}};
        echo["cell_seed"] = rec.seed;
        rec.params_json = echo.dump();
    }

    if (!data.error.empty()) {
        rec.error = data.error;
        return rec;
    }

    try {
        const auto selection =
            run_selector(sel, data.train.features, data.train.target, data.task, /*threads=*/1);
        rec.selection_seconds = selection.elapsed_seconds;
        rec.n_features_selected = selection.selected.size();

        const Matrix train_X = data.train.features.take_columns(selection.selected);
        const Matrix test_X = data.test.features.take_columns(selection.selected);

        const auto t0 = std::chrono::steady_clock::now();
        const auto model = fit(model_spec, train_X, data.train.target, data.task);
        rec.train_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

        const auto pred = predict(model, test_X);
        if (data.task == Task::regression) {
            const auto m = regression_metrics(data.test.target, pred.values);
            rec.metrics = {{"r2", m.r2}, {"mse", m.mse}, {"rmse", m.rmse}, {"mae", m.mae}};
            if (m.msle) rec.metrics.emplace_back("msle", *m.msle);
            rec.metrics.emplace_back("mape_percent", m.mape_percent);
        } else {
            const auto truth = data.test.class_codes();
            const auto m = classification_metrics(truth, pred.labels, &pred.scores);
            rec.metrics = {{"accuracy", m.accuracy},
                           {"precision", m.precision},
                           {"recall", m.recall},
                           {"f1", m.f1}};
            if (m.auc_roc) rec.metrics.emplace_back("auc_roc", *m.auc_roc);
        }
    } catch (const std::exception& e) {
        rec.error = e.what();
        rec.metrics.clear();
    }
    return rec;
}

}  // namespace

std::vector<BenchRecord> run_benchmark(const BenchConfig& config) {
    config.validate();

    std::vector<PreparedDataset> prepared(config.datasets.size());
    for (std::size_t i = 0; i < config.datasets.size(); ++i)
        prepared[i] = prepare_dataset(config.datasets[i], config.split, config.master_seed);

    std::vector<CellPlan> plan;
    for (std::size_t di = 0; di < config.datasets.size(); ++di) {
        const auto& d = config.datasets[di];
        const auto& selectors = d.selectors.empty() ? config.selectors : d.selectors;
        const auto& models = d.models.empty() ? config.models : d.models;
        for (const auto& sel : selectors)
            for (const auto& [model_name, model_spec] : models)
                for (std::size_t rep = 0; rep < config.repeats; ++rep)
                    plan.push_back({di, sel, model_name, model_spec, rep, d.name, d.undersample,
                                    d.preprocess});
    }

    std::vector<BenchRecord> records(plan.size());
    parallel_for(plan.size(), config.threads, [&](std::size_t i) {
        records[i] = run_cell(plan[i], prepared[plan[i].dataset_index], config.split, config.master_seed);
    });
    return records;
}

}  // namespace fsel
