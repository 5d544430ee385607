#include "fsel/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "fsel/csv.hpp"

namespace fsel {

namespace {

const char* kRecordsHeader =
    "dataset,selector,model,task,n_selected,sel_seconds,train_seconds,metric_name,metric_value";

std::string fmt_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

double parse_double(const std::string& s) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw std::invalid_argument("records csv: bad number \"" + s + "\"");
    return v;
}

// Rows aggregated over repeats for display.
struct DisplayRow {
    std::string selector;
    std::string model;
    Task task = Task::regression;
    double n_selected = 0.0;
    double sel_seconds = 0.0;
    double train_seconds = 0.0;
    std::map<std::string, double> metrics;
    std::size_t count = 0;
};

std::vector<DisplayRow> aggregate_rows(const std::vector<BenchRecord>& records) {
    std::vector<DisplayRow> rows;
    for (const auto& rec : records) {
        if (rec.failed()) continue;
        auto it = std::find_if(rows.begin(), rows.end(), [&](const DisplayRow& r) {
            return r.selector == rec.selector && r.model == rec.model;
        });
        if (it == rows.end()) {
            rows.push_back({rec.selector, rec.model, rec.task, 0, 0, 0, {}, 0});
            it = rows.end() - 1;
        }
        it->n_selected += static_cast<double>(rec.n_features_selected);
        it->sel_seconds += rec.selection_seconds;
        it->train_seconds += rec.train_seconds;
        for (const auto& [k, v] : rec.metrics) it->metrics[k] += v;
        ++it->count;
    }
    for (auto& r : rows) {
        const auto c = static_cast<double>(r.count);
        r.n_selected /= c;
        r.sel_seconds /= c;
        r.train_seconds /= c;
        for (auto& [k, v] : r.metrics) v /= c;
    }
    return rows;
}

std::vector<std::string> dataset_order(const std::vector<BenchRecord>& records) {
    std::vector<std::string> order;
    for (const auto& rec : records)
        if (std::find(order.begin(), order.end(), rec.dataset) == order.end())
            order.push_back(rec.dataset);
    return order;
}

std::vector<BenchRecord> records_of(const std::vector<BenchRecord>& records, const std::string& dataset) {
    std::vector<BenchRecord> out;
    for (const auto& rec : records)
        if (rec.dataset == dataset) out.push_back(rec);
    return out;
}

}  // namespace

std::string primary_metric_name(Task task) { return task == Task::regression ? "r2" : "accuracy"; }

std::string records_to_csv(const std::vector<BenchRecord>& records) {
    std::ostringstream out;
    out << kRecordsHeader << '\n';
    for (const auto& rec : records) {
        auto prefix = [&](const std::string& metric_name, double value) {
            out << csv_escape(rec.dataset) << ',' << csv_escape(rec.selector) << ','
                << csv_escape(rec.model) << ',' << to_string(rec.task) << ','
                << rec.n_features_selected << ',' << fmt_full(rec.selection_seconds) << ','
                << fmt_full(rec.train_seconds) << ',' << csv_escape(metric_name) << ','
                << fmt_full(value) << '\n';
        };
        if (rec.failed()) {
            prefix("error", 1.0);
            continue;
        }
        for (const auto& [name, value] : rec.metrics) prefix(name, value);
    }
    return out.str();
}

std::vector<BenchRecord> records_from_csv(const std::string& text) {
    const auto rows = parse_csv_text(text, ',');
    if (rows.empty()) throw std::invalid_argument("records csv: empty file");
    {
        std::string header;
        for (std::size_t i = 0; i < rows[0].size(); ++i) {
            if (i) header += ',';
            header += rows[0][i];
        }
        if (header != kRecordsHeader)
            throw std::invalid_argument("records csv: unexpected header \"" + header + "\"");
    }

    std::vector<BenchRecord> records;
    std::map<std::string, std::size_t> repeats_seen;
    BenchRecord* current = nullptr;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const auto& row = rows[r];
        if (row.size() != 9)
            throw std::invalid_argument("records csv: row " + std::to_string(r + 1) +
                                        " has " + std::to_string(row.size()) + " fields");
        const std::string& metric_name = row[7];
        const bool same_cell = current != nullptr && current->dataset == row[0] &&
                               current->selector == row[1] && current->model == row[2];
        const bool metric_repeated =
            same_cell && std::any_of(current->metrics.begin(), current->metrics.end(),
                                     [&](const auto& kv) { return kv.first == metric_name; });
        if (!same_cell || metric_repeated || (current != nullptr && current->failed())) {
            BenchRecord rec;
            rec.dataset = row[0];
            rec.selector = row[1];
            rec.model = row[2];
            rec.task = task_from_string(row[3]);
            rec.n_features_selected = static_cast<std::size_t>(parse_double(row[4]));
            rec.selection_seconds = parse_double(row[5]);
            rec.train_seconds = parse_double(row[6]);
            rec.repeat = repeats_seen[row[0] + "\x1f" + row[1] + "\x1f" + row[2]]++;
            records.push_back(std::move(rec));
            current = &records.back();
        }
        if (metric_name == "error")
            current->error = "error";  // the fixed schema cannot carry the message
        else
            current->metrics.emplace_back(metric_name, parse_double(row[8]));
    }
    return records;
}

std::vector<BenchRecord> load_records_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open records csv: " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return records_from_csv(buf.str());
}

std::string render_markdown(const std::vector<BenchRecord>& records) {
    std::ostringstream md;
    md << "# Benchmark report\n";
    for (const auto& dataset : dataset_order(records)) {
        const auto subset = records_of(records, dataset);
        auto rows = aggregate_rows(subset);
        const Task task = subset.front().task;
        const std::string primary = primary_metric_name(task);
        std::sort(rows.begin(), rows.end(), [&](const DisplayRow& a, const DisplayRow& b) {
            const double av = a.metrics.count(primary) ? a.metrics.at(primary) : -1.0;
            const double bv = b.metrics.count(primary) ? b.metrics.at(primary) : -1.0;
            if (av != bv) return av > bv;
            if (a.selector != b.selector) return a.selector < b.selector;
            return a.model < b.model;
        });

        md << "\n## " << dataset << "\n\n";
        auto metric_cell = [&](const DisplayRow& r, const char* name) {
            auto it = r.metrics.find(name);
            return it == r.metrics.end() ? std::string("-") : fmt_short(it->second);
        };
        if (task == Task::regression) {
            md << "| Feature Selection Method | Model | R2 | MSE | RMSE | MAE | MSLE | MAPE (%) | "
                  "Time Taken (s) | Features Selected |\n";
            md << "|---|---|---|---|---|---|---|---|---|---|\n";
            for (const auto& r : rows)
                md << "| " << r.selector << " | " << r.model << " | " << metric_cell(r, "r2") << " | "
                   << metric_cell(r, "mse") << " | " << metric_cell(r, "rmse") << " | "
                   << metric_cell(r, "mae") << " | " << metric_cell(r, "msle") << " | "
                   << metric_cell(r, "mape_percent") << " | " << fmt_short(r.sel_seconds) << " | "
                   << fmt_short(r.n_selected) << " |\n";
        } else {
            md << "| Feature Selection Method | Model | Accuracy | Precision | Recall | F1 Score | "
                  "AUC-ROC | Time Taken (s) | Features Selected |\n";
            md << "|---|---|---|---|---|---|---|---|---|\n";
            for (const auto& r : rows) {
                char acc[32];
                const double a = r.metrics.count("accuracy") ? r.metrics.at("accuracy") : 0.0;
                std::snprintf(acc, sizeof acc, "%.2f%%", 100.0 * a);
                md << "| " << r.selector << " | " << r.model << " | " << acc << " | "
                   << metric_cell(r, "precision") << " | " << metric_cell(r, "recall") << " | "
                   << metric_cell(r, "f1") << " | " << metric_cell(r, "auc_roc") << " | "
                   << fmt_short(r.sel_seconds) << " | " << fmt_short(r.n_selected) << " |\n";
            }
        }

        bool any_failed = false;
        for (const auto& rec : subset) any_failed = any_failed || rec.failed();
        if (any_failed) {
            md << "\nFailed cells:\n\n";
            for (const auto& rec : subset)
                if (rec.failed())
                    md << "- " << rec.selector << " / " << rec.model << " (repeat " << rec.repeat
                       << "): " << rec.error << "\n";
        }
    }
    return md.str();
}

std::string render_svg_chart(const std::string& dataset, const std::vector<BenchRecord>& records) {
    const auto subset = records_of(records, dataset);
    if (subset.empty()) throw std::invalid_argument("render_svg_chart: no records for " + dataset);
    const Task task = subset.front().task;
    const std::string primary = primary_metric_name(task);
    const auto rows = aggregate_rows(subset);

    std::vector<std::string> selectors, models;
    for (const auto& r : rows) {
        if (std::find(selectors.begin(), selectors.end(), r.selector) == selectors.end())
            selectors.push_back(r.selector);
        if (std::find(models.begin(), models.end(), r.model) == models.end()) models.push_back(r.model);
    }

    double max_value = 0.0;
    for (const auto& r : rows)
        if (r.metrics.count(primary)) max_value = std::max(max_value, r.metrics.at(primary));
    if (max_value <= 0.0) max_value = 1.0;
    const double y_max = max_value * 1.05;

    const double margin_left = 70, margin_top = 50, margin_bottom = 70;
    const double plot_w = std::max<double>(360, 80.0 * static_cast<double>(selectors.size()));
    const double plot_h = 300;
    const double legend_w = 170;
    const double width = margin_left + plot_w + 30 + legend_w;
    const double height = margin_top + plot_h + margin_bottom;

    static const char* kPalette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                                     "#76b7b2", "#edc948", "#b07aa1", "#9c755f"};
    const std::size_t n_colors = sizeof(kPalette) / sizeof(kPalette[0]);

    std::ostringstream svg;
    svg.precision(12);
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" viewBox=\"0 0 " << width << " " << height << "\">\n";
    svg << "<text x=\"" << margin_left + plot_w / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << dataset << "</text>\n";

    // axes
    svg << "<line x1=\"" << margin_left << "\" y1=\"" << margin_top << "\" x2=\"" << margin_left
        << "\" y2=\"" << margin_top + plot_h << "\" stroke=\"#333\"/>\n";
    svg << "<line x1=\"" << margin_left << "\" y1=\"" << margin_top + plot_h << "\" x2=\""
        << margin_left + plot_w << "\" y2=\"" << margin_top + plot_h << "\" stroke=\"#333\"/>\n";
    svg << "<text x=\"18\" y=\"" << margin_top + plot_h / 2
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 "
        << 18 << " " << margin_top + plot_h / 2 << ")\">" << primary << "</text>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double frac = static_cast<double>(tick) / 4.0;
        const double y = margin_top + plot_h - frac * plot_h;
        svg << "<line x1=\"" << margin_left - 4 << "\" y1=\"" << y << "\" x2=\"" << margin_left
            << "\" y2=\"" << y << "\" stroke=\"#333\"/>\n";
        svg << "<text x=\"" << margin_left - 8 << "\" y=\"" << y + 4
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">"
            << fmt_short(frac * y_max) << "</text>\n";
    }

    const double group_w = plot_w / static_cast<double>(selectors.size());
    const double bar_w = group_w * 0.8 / static_cast<double>(models.size());
    for (std::size_t s = 0; s < selectors.size(); ++s) {
        const double group_x = margin_left + group_w * static_cast<double>(s) + group_w * 0.1;
        for (std::size_t m = 0; m < models.size(); ++m) {
            const auto it = std::find_if(rows.begin(), rows.end(), [&](const DisplayRow& r) {
                return r.selector == selectors[s] && r.model == models[m];
            });
            if (it == rows.end() || !it->metrics.count(primary)) continue;
            const double value = it->metrics.at(primary);
            const double h = std::max(0.0, value / y_max * plot_h);
            const double x = group_x + bar_w * static_cast<double>(m);
            const double y = margin_top + plot_h - h;
            svg << "<rect class=\"bar\" x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar_w * 0.92
                << "\" height=\"" << h << "\" fill=\"" << kPalette[m % n_colors] << "\" data-selector=\""
                << selectors[s] << "\" data-model=\"" << models[m] << "\" data-value=\"" << fmt_full(value)
                << "\"/>\n";
        }
        svg << "<text x=\"" << margin_left + group_w * (static_cast<double>(s) + 0.5) << "\" y=\""
            << margin_top + plot_h + 18 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            << "font-size=\"11\">" << selectors[s] << "</text>\n";
    }
    svg << "<text x=\"" << margin_left + plot_w / 2 << "\" y=\"" << height - 16
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">selector</text>\n";

    const double legend_x = margin_left + plot_w + 24;
    for (std::size_t m = 0; m < models.size(); ++m) {
        const double y = margin_top + 18.0 * static_cast<double>(m);
        svg << "<rect x=\"" << legend_x << "\" y=\"" << y << "\" width=\"12\" height=\"12\" fill=\""
            << kPalette[m % n_colors] << "\"/>\n";
        svg << "<text x=\"" << legend_x + 18 << "\" y=\"" << y + 10
            << "\" font-family=\"sans-serif\" font-size=\"11\">" << models[m] << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_report(const std::vector<BenchRecord>& records, const std::filesystem::path& dir,
                 const std::set<ReportFormat>& formats) {
    if (records.empty()) throw std::invalid_argument("emit_report: no records");
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    auto write_file = [&](const std::filesystem::path& path, const std::string& content) {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << content;
    };

    if (formats.count(ReportFormat::csv)) {
        write_file(dir / "records.csv", records_to_csv(records));
        nlohmann::json meta = nlohmann::json::array();
        for (const auto& rec : records) {
            nlohmann::json entry{{"dataset", rec.dataset}, {"selector", rec.selector},
                                 {"model", rec.model},     {"repeat", rec.repeat},
                                 {"seed", rec.seed},       {"error", rec.error}};
            if (!rec.params_json.empty()) entry["params"] = nlohmann::json::parse(rec.params_json);
            meta.push_back(std::move(entry));
        }
        write_file(dir / "records_meta.json", meta.dump(2) + "\n");
    }
    if (formats.count(ReportFormat::markdown)) write_file(dir / "report.md", render_markdown(records));
    if (formats.count(ReportFormat::svg)) {
        for (const auto& dataset : dataset_order(records)) {
            std::string safe;
            for (char c : dataset) safe += (std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
            write_file(dir / ("chart_" + safe + ".svg"), render_svg_chart(dataset, records));
        }
    }
}

}  // namespace fsel
