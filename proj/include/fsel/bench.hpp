#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "fsel/csv.hpp"
#include "fsel/dataset.hpp"
#include "fsel/estimators.hpp"
#include "fsel/preprocess.hpp"
#include "fsel/selectors.hpp"

namespace fsel {

struct SplitSpec {
    double test_fraction = 0.3;
    bool stratify = true;
    std::uint64_t seed = 42;
};

struct CsvSource {
    std::filesystem::path path;
    CsvOptions options;
};

struct DatasetConfig {
    std::string name;
    std::optional<SyntheticSpec> synthetic;
    std::optional<CsvSource> csv;
    bool undersample = false;
    PreprocessSwitches preprocess;
    // Per-dataset overrides; empty means the config-level lists apply.
    std::vector<SelectorConfig> selectors;
    std::vector<std::pair<std::string, EstimatorSpec>> models;
};

struct BenchConfig {
    std::vector<DatasetConfig> datasets;
    std::vector<SelectorConfig> selectors;
    std::vector<std::pair<std::string, EstimatorSpec>> models;  // (name, spec)
    SplitSpec split;
    std::size_t repeats = 1;
    std::string output_dir = "bench_out";
    std::uint64_t master_seed = 42;
    unsigned threads = 0;  // 0 = hardware concurrency; results never depend on this

    void validate() const;
};

// One (dataset x selector x model x repeat) cell. Failed cells carry their
// error text instead of metrics; the matrix never aborts on one cell.
struct BenchRecord {
    std::string dataset;
    std::string selector;
    std::string model;
    Task task = Task::regression;
    std::size_t repeat = 0;
    std::size_t n_features_selected = 0;
    double selection_seconds = 0.0;
    double train_seconds = 0.0;
    std::vector<std::pair<std::string, double>> metrics;  // ordered (name, value)
    std::uint64_t seed = 0;
    std::string params_json;  // full hyperparameter echo
    std::string error;

    bool failed() const { return !error.empty(); }
};

std::uint64_t cell_seed(std::uint64_t master_seed, const std::string& dataset,
                        const std::string& selector, const std::string& model, std::size_t repeat);

// Runs every cell: load/generate, split, undersample (train only), preprocess
// fitted on train, select on train, subset, fit, evaluate on test. Cells run
// in a work pool; records come back in deterministic (config) order.
std::vector<BenchRecord> run_benchmark(const BenchConfig& config);

// JSON config file parsing; schema documented in the README.
BenchConfig load_bench_config(const std::filesystem::path& path);
BenchConfig parse_bench_config(const std::string& json_text);

std::string estimator_spec_to_json(const std::string& name, const EstimatorSpec& spec);

}  // namespace fsel
