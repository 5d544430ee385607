// fsel: feature-selection toolkit CLI.
//
// Subcommands: generate (synthetic dataset -> CSV), profile (dataset summary
// row), select (run one selector), bench (config-driven benchmark matrix),
// report (re-render reports from a records CSV).
//
// Exit codes: 0 success, 1 validation/usage error, 2 runtime error.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "fsel/bench.hpp"
#include "fsel/csv.hpp"
#include "fsel/preprocess.hpp"
#include "fsel/profile.hpp"
#include "fsel/report.hpp"
#include "fsel/selectors.hpp"
#include "fsel/synthetic.hpp"

namespace {

using namespace fsel;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

struct CsvInputFlags {
    std::string path;
    std::string target = "target";
    std::string delimiter = ",";
    std::string task = "auto";
    std::vector<std::string> missing_tokens;

    Dataset load() const {
        CsvOptions opt;
        if (delimiter.size() != 1) throw std::invalid_argument("--delimiter must be one character");
        opt.delimiter = delimiter[0];
        opt.target_column = target;
        if (!missing_tokens.empty()) opt.missing_tokens = missing_tokens;
        if (task != "auto") opt.task = task_from_string(task);
        return load_csv(std::filesystem::path(path), opt);
    }

    void attach(CLI::App* cmd, bool required = true) {
        auto* o = cmd->add_option("--input", path, "input CSV file");
        if (required) o->required();
        cmd->add_option("--target", target, "target column name");
        cmd->add_option("--delimiter", delimiter, "CSV delimiter (single character)");
        cmd->add_option("--task", task, "regression|binary|multiclass|auto");
        cmd->add_option("--missing-token", missing_tokens, "tokens treated as missing values");
    }
};

void attach_synthetic_flags(CLI::App* cmd, SyntheticSpec& spec) {
    cmd->add_option("--samples", spec.n_samples, "number of rows");
    cmd->add_option("--features", spec.n_features, "number of columns");
    cmd->add_option("--informative", spec.n_informative, "informative column count");
    cmd->add_option("--redundant", spec.n_redundant, "redundant column count");
    cmd->add_option("--sparsity", spec.sparsity, "probability each entry is zeroed");
    cmd->add_option("--noise-sigma", spec.noise_sigma, "std of additive Gaussian noise");
    cmd->add_option("--label-flip", spec.label_flip, "label flip probability");
    cmd->add_option("--class-sep", spec.class_sep, "class separation scale");
    cmd->add_option("--classes", spec.n_classes, "number of classes");
    cmd->add_option("--seed", spec.seed, "generator seed");
}

int cmd_generate(const SyntheticSpec& spec, const std::string& out_path) {
    const Dataset data = generate_synthetic(spec);
    if (out_path.empty() || out_path == "-") {
        write_csv(data, std::cout);
    } else {
        write_csv(data, std::filesystem::path(out_path));
        std::cerr << "wrote " << data.n_rows() << "x" << data.n_cols() << " dataset to " << out_path
                  << "\n";
    }
    return 0;
}

int cmd_profile(const CsvInputFlags& input, std::uint64_t seed, bool markdown) {
    Dataset data = input.load();
    PreprocessState state;
    data = encode_categoricals(data, state, true);
    data = impute_mean(data, state, true);
    const DatasetProfile p = profile_dataset(data, seed);

    std::string class_dist;
    {
        // Table-style ordering: largest share first.
        std::vector<std::pair<int, double>> parts(p.class_distribution.begin(),
                                                  p.class_distribution.end());
        std::sort(parts.begin(), parts.end(), [](const auto& a, const auto& b) {
            if (a.second != b.second) return a.second > b.second;
            return a.first < b.first;
        });
        for (std::size_t i = 0; i < parts.size(); ++i) {
            if (i) class_dist += ", ";
            char buf[48];
            std::snprintf(buf, sizeof buf, "%d: %.2f", parts[i].first, parts[i].second);
            class_dist += buf;
        }
        if (class_dist.empty()) class_dist = "-";
    }
    const std::string corr = p.max_feature_correlation ? fmt(*p.max_feature_correlation) : "-";
    if (markdown) {
        std::cout << "| Dataset | Instances | Class Distribution (%) | Max Feature Correlation | "
                     "Avg Variance | Skewness of Target | Outliers (%) | Dimensionality Ratio |\n";
        std::cout << "|---|---|---|---|---|---|---|---|\n";
        std::cout << "| " << input.path << " | " << p.instances << " | " << class_dist << " | " << corr
                  << " | " << fmt(p.avg_variance) << " | " << fmt(p.target_skewness) << " | "
                  << fmt(100.0 * p.outlier_fraction) << " | " << fmt(p.dimensionality_ratio) << " |\n";
    } else {
        std::cout << "dataset,instances,class_distribution,max_feature_correlation,avg_variance,"
                     "target_skewness,outliers_percent,dimensionality_ratio\n";
        std::cout << input.path << ',' << p.instances << ",\"" << class_dist << "\"," << corr << ','
                  << fmt(p.avg_variance) << ',' << fmt(p.target_skewness) << ','
                  << fmt(100.0 * p.outlier_fraction) << ',' << fmt(p.dimensionality_ratio) << "\n";
    }
    return 0;
}

int cmd_select(const CsvInputFlags& input, SelectorConfig config, const std::string& estimator_name,
               const std::string& score_fn_name, const std::string& trace_path, unsigned threads) {
    config.estimator = EstimatorSpec::of(algorithm_from_string(estimator_name));
    config.score_fn = score_fn_from_string(score_fn_name);

    Dataset data = input.load();
    PreprocessState state;
    const Dataset clean = fit_transform(data, state);
    const SelectionResult result = run_selector(config, clean.features, clean.target, clean.task, threads);

    std::cout << "method,k,n_selected,elapsed_seconds,selected\n";
    std::cout << to_string(config.method) << ',' << config.k << ',' << result.selected.size() << ','
              << fmt(result.elapsed_seconds) << ",\"";
    for (std::size_t i = 0; i < result.selected.size(); ++i) {
        if (i) std::cout << ';';
        std::cout << clean.feature_names[result.selected[i]];
    }
    std::cout << "\"\n";

    if (!trace_path.empty()) {
        std::ofstream trace(trace_path);
        if (!trace) throw std::runtime_error("cannot write stage trace: " + trace_path);
        trace << "stage,feature_set_size,score\n";
        for (const auto& rec : result.stage_trace)
            trace << rec.stage << ',' << rec.feature_set_size << ',' << fmt(rec.score) << '\n';
    }
    return 0;
}

int cmd_bench(const std::string& config_path, unsigned threads_override, bool has_threads,
              const std::vector<std::string>& format_names, const std::string& output_override) {
    BenchConfig config = load_bench_config(config_path);
    if (has_threads) config.threads = threads_override;
    if (!output_override.empty()) config.output_dir = output_override;
    else if (const char* env = std::getenv("FSEL_OUTPUT_DIR"); env != nullptr && *env != '\0')
        config.output_dir = env;

    std::set<ReportFormat> formats;
    for (const auto& f : format_names) {
        if (f == "csv") formats.insert(ReportFormat::csv);
        else if (f == "markdown") formats.insert(ReportFormat::markdown);
        else if (f == "svg") formats.insert(ReportFormat::svg);
        else throw std::invalid_argument("unknown format: " + f);
    }
    if (formats.empty())
        formats = {ReportFormat::csv, ReportFormat::markdown, ReportFormat::svg};

    const auto records = run_benchmark(config);
    emit_report(records, config.output_dir, formats);

    std::size_t failed = 0;
    for (const auto& rec : records) failed += rec.failed() ? 1 : 0;
    std::cerr << records.size() << " records (" << failed << " failed) written to " << config.output_dir
              << "\n";
    return 0;
}

int cmd_report(const std::string& from, const std::string& out_dir,
               const std::vector<std::string>& format_names) {
    const auto records = load_records_csv(from);
    std::set<ReportFormat> formats;
    for (const auto& f : format_names) {
        if (f == "csv") formats.insert(ReportFormat::csv);
        else if (f == "markdown") formats.insert(ReportFormat::markdown);
        else if (f == "svg") formats.insert(ReportFormat::svg);
        else throw std::invalid_argument("unknown format: " + f);
    }
    if (formats.empty()) formats = {ReportFormat::markdown, ReportFormat::svg};
    emit_report(records, out_dir, formats);
    std::cerr << "report written to " << out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"fsel: feature selection toolkit and benchmark harness"};
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand("generate", "generate a synthetic dataset as CSV");
    SyntheticSpec spec;
    std::string generate_out;
    attach_synthetic_flags(generate, spec);
    generate->add_option("--out", generate_out, "output CSV path (default: stdout)");

    // profile
    auto* profile = app.add_subcommand("profile", "print the statistical summary row for a dataset");
    CsvInputFlags profile_input;
    profile_input.attach(profile);
    std::uint64_t profile_seed = 0;
    bool profile_markdown = false;
    profile->add_option("--seed", profile_seed, "seed for outlier detection and pair sampling");
    profile->add_flag("--markdown", profile_markdown, "emit a markdown row instead of CSV");

    // select
    auto* select = app.add_subcommand("select", "run one feature selector on a CSV dataset");
    CsvInputFlags select_input;
    select_input.attach(select);
    SelectorConfig sel_config;
    std::string sel_method = "frame";
    std::string sel_estimator = "gbt";
    std::string sel_score_fn = "auto";
    std::string sel_trace = "stage_trace.csv";
    unsigned sel_threads = 1;
    select->add_option("--method", sel_method,
                       "variance_threshold|select_k_best|mutual_info|model_select|rfe|forward|frame");
    select->add_option("--k", sel_config.k, "target feature count");
    select->add_option("--estimator", sel_estimator, "estimator algorithm for wrapper methods");
    select->add_option("--score-fn", sel_score_fn, "auto|anova_f|f_regression|mutual_info");
    select->add_option("--threshold", sel_config.threshold, "variance threshold cutoff");
    select->add_option("--pool", sel_config.frame_pool, "FRAME pool size (0 = auto)");
    select->add_option("--step", sel_config.rfe_step_fraction, "RFE drop fraction per round");
    select->add_option("--epsilon", sel_config.epsilon, "forward-selection improvement tolerance");
    select->add_option("--cv-folds", sel_config.cv_folds, "cross-validation folds");
    select->add_option("--seed", sel_config.seed, "selector seed");
    select->add_option("--trace", sel_trace, "stage trace output file (empty to skip)");
    select->add_option("--threads", sel_threads, "worker threads for candidate evaluation");

    // bench
    auto* bench = app.add_subcommand("bench", "run the benchmark matrix from a config file");
    std::string bench_config;
    unsigned bench_threads = 0;
    std::vector<std::string> bench_formats;
    std::string bench_out;
    bench->add_option("--config", bench_config, "JSON config file")->required();
    auto* bench_threads_opt = bench->add_option("--threads", bench_threads, "worker threads (0 = all cores)");
    bench->add_option("--formats", bench_formats, "subset of csv,markdown,svg")->delimiter(',');
    bench->add_option("--out", bench_out, "output directory (overrides config and FSEL_OUTPUT_DIR)");

    // report
    auto* report = app.add_subcommand("report", "re-render reports from a records CSV");
    std::string report_from, report_out = "bench_out";
    std::vector<std::string> report_formats;
    report->add_option("--from", report_from, "records.csv produced by bench")->required();
    report->add_option("--out", report_out, "output directory");
    report->add_option("--formats", report_formats, "subset of csv,markdown,svg")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (generate->parsed()) return cmd_generate(spec, generate_out);
        if (profile->parsed()) return cmd_profile(profile_input, profile_seed, profile_markdown);
        if (select->parsed()) {
            sel_config.method = selector_method_from_string(sel_method);
            return cmd_select(select_input, sel_config, sel_estimator, sel_score_fn, sel_trace,
                              sel_threads);
        }
        if (bench->parsed())
            return cmd_bench(bench_config, bench_threads, bench_threads_opt->count() > 0, bench_formats,
                             bench_out);
        if (report->parsed()) return cmd_report(report_from, report_out, report_formats);
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const CsvError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
