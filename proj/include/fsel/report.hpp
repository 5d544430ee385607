#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "fsel/bench.hpp"

namespace fsel {

enum class ReportFormat { csv, markdown, svg };

// Long-form records CSV with the fixed header
//   dataset,selector,model,task,n_selected,sel_seconds,train_seconds,metric_name,metric_value
// one metric per row; doubles carry full round-trip precision.
std::string records_to_csv(const std::vector<BenchRecord>& records);
std::vector<BenchRecord> records_from_csv(const std::string& text);
std::vector<BenchRecord> load_records_csv(const std::filesystem::path& path);

// Per-dataset markdown tables sorted by the primary metric (accuracy for
// classification, R^2 for regression), repeats averaged.
std::string render_markdown(const std::vector<BenchRecord>& records);

// Self-contained grouped bar chart (x = selector, one bar per model) for one
// dataset's records; every bar carries a data-value attribute.
std::string render_svg_chart(const std::string& dataset, const std::vector<BenchRecord>& records);

// Writes records.csv (+ records_meta.json with the hyperparameter echo),
// report.md, and one chart_<dataset>.svg per dataset into `dir`.
void emit_report(const std::vector<BenchRecord>& records, const std::filesystem::path& dir,
                 const std::set<ReportFormat>& formats);

std::string primary_metric_name(Task task);

}  // namespace fsel
