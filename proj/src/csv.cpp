#include "fsel/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace fsel {

namespace {

std::string trimmed(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

bool parse_number(const std::string& cell, double& out) {
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last && cell.size() > 0;
}

// Splits the stream into records honoring quotes; embedded delimiters,
// escaped quotes ("") and newlines inside quoted fields are preserved.
std::vector<std::vector<std::string>> read_records(std::istream& in, char delimiter) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool row_started = false;
    char c;
    while (in.get(c)) {
        if (quoted) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get();
                    field.push_back('"');
                } else {
                    quoted = false;
                }
            } else {
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && field.empty()) {
            quoted = true;
            row_started = true;
        } else if (c == delimiter) {
            row.push_back(std::move(field));
            field.clear();
            row_started = true;
        } else if (c == '\n') {
            if (row_started || !field.empty()) {
                row.push_back(std::move(field));
                field.clear();
                records.push_back(std::move(row));
                row.clear();
                row_started = false;
            }
        } else if (c == '\r') {
            // swallowed; \r\n ends the row at the \n
        } else {
            field.push_back(c);
            row_started = true;
        }
    }
    if (row_started || !field.empty()) {
        row.push_back(std::move(field));
        records.push_back(std::move(row));
    }
    return records;
}

struct TargetEncoding {
    std::vector<double> values;
    Task task;
};

TargetEncoding encode_target(const std::vector<std::string>& cells, bool all_numeric,
                             const std::vector<double>& numeric, const CsvOptions& options,
                             const std::string& origin) {
    constexpr int kAutoClassLevels = 20;
    const bool want_regression = options.task && *options.task == Task::regression;
    const bool want_classification = options.task && *options.task != Task::regression;

    if (!all_numeric && want_regression)
        throw CsvError(CsvError::Kind::bad_target,
                       origin + ": target column is not numeric but task=regression was requested");

    bool classify = want_classification;
    if (!options.task) {
        if (!all_numeric) {
            classify = true;
        } else {
            // A discrete target must actually repeat levels; without repeats a
            // small integer column is treated as a plain numeric target.
            std::set<double> distinct(numeric.begin(), numeric.end());
            const bool integral = std::all_of(distinct.begin(), distinct.end(),
                                              [](double v) { return v == std::floor(v); });
            classify = integral && distinct.size() <= kAutoClassLevels && distinct.size() >= 2 &&
                       distinct.size() < numeric.size();
        }
    }

    TargetEncoding out;
    if (!classify) {
        out.task = Task::regression;
        out.values = numeric;
        return out;
    }

    // Codes assigned by sorted value so they are independent of row order.
    std::map<std::string, int> str_codes;
    std::map<double, int> num_codes;
    if (all_numeric) {
        for (double v : numeric) num_codes.emplace(v, 0);
        int code = 0;
        for (auto& [v, c] : num_codes) c = code++;
    } else {
        for (const auto& cell : cells) str_codes.emplace(cell, 0);
        int code = 0;
        for (auto& [v, c] : str_codes) c = code++;
    }
    const std::size_t n_classes = all_numeric ? num_codes.size() : str_codes.size();
    if (n_classes < 2)
        throw CsvError(CsvError::Kind::bad_target,
                       origin + ": classification target has a single level");
    out.task = n_classes == 2 ? Task::binary : Task::multiclass;
    out.values.reserve(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i)
        out.values.push_back(all_numeric ? num_codes.at(numeric[i]) : str_codes.at(cells[i]));
    return out;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw CsvError(CsvError::Kind::unreadable, "cannot open CSV file: " + path.string());
    return load_csv(in, options, path.string());
}

Dataset load_csv(std::istream& in, const CsvOptions& options, const std::string& origin) {
    auto records = read_records(in, options.delimiter);
    if (records.empty()) throw CsvError(CsvError::Kind::empty, origin + ": file contains no rows");

    std::vector<std::string> header = records.front();
    for (auto& h : header) h = trimmed(h);
    const std::size_t n_cols_total = header.size();

    const std::size_t n_rows = records.size() - 1;
    if (n_rows < 2)
        throw CsvError(CsvError::Kind::empty,
                       origin + ": need at least 2 data rows, found " + std::to_string(n_rows));

    for (std::size_t r = 1; r < records.size(); ++r)
        if (records[r].size() != n_cols_total)
            throw CsvError(CsvError::Kind::ragged_row,
                           origin + ": row " + std::to_string(r + 1) + " has " +
                               std::to_string(records[r].size()) + " fields, expected " +
                               std::to_string(n_cols_total));

    std::size_t target_col;
    if (options.target_index) {
        target_col = *options.target_index;
        if (target_col >= n_cols_total)
            throw CsvError(CsvError::Kind::missing_target,
                           origin + ": target index " + std::to_string(target_col) + " out of range");
    } else {
        auto it = std::find(header.begin(), header.end(), options.target_column);
        if (it == header.end())
            throw CsvError(CsvError::Kind::missing_target,
                           origin + ": target column \"" + options.target_column + "\" not in header");
        target_col = static_cast<std::size_t>(it - header.begin());
    }

    const auto is_missing_token = [&](const std::string& cell) {
        return std::find(options.missing_tokens.begin(), options.missing_tokens.end(), cell) !=
               options.missing_tokens.end();
    };

    // Trim every cell once; interpretation below works on the trimmed form.
    std::vector<std::vector<std::string>> cells(n_rows);
    for (std::size_t r = 0; r < n_rows; ++r) {
        cells[r].reserve(n_cols_total);
        for (const auto& raw : records[r + 1]) cells[r].push_back(trimmed(raw));
    }

    // Target column first: missing targets are fatal.
    std::vector<std::string> target_cells(n_rows);
    std::vector<double> target_numeric(n_rows, 0.0);
    bool target_all_numeric = true;
    for (std::size_t r = 0; r < n_rows; ++r) {
        const std::string& cell = cells[r][target_col];
        if (is_missing_token(cell))
            throw CsvError(CsvError::Kind::bad_target,
                           origin + ": missing target value at row " + std::to_string(r + 2));
        target_cells[r] = cell;
        double v;
        if (target_all_numeric && parse_number(cell, v))
            target_numeric[r] = v;
        else
            target_all_numeric = false;
    }
    TargetEncoding target = encode_target(target_cells, target_all_numeric, target_numeric, options, origin);

    const std::size_t d = n_cols_total - 1;
    Dataset out;
    out.features = Matrix(n_rows, d, 0.0);
    out.missing.assign(n_rows * d, 0);
    out.task = target.task;
    out.target = std::move(target.values);
    out.target_name = header[target_col];

    std::size_t out_col = 0;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t c = 0; c < n_cols_total; ++c) {
        if (c == target_col) continue;
        out.feature_names.push_back(header[c]);

        bool numeric = true;
        std::vector<double> parsed(n_rows, nan);
        for (std::size_t r = 0; r < n_rows && numeric; ++r) {
            const std::string& cell = cells[r][c];
            if (is_missing_token(cell)) continue;
            numeric = parse_number(cell, parsed[r]);
        }

        if (numeric) {
            for (std::size_t r = 0; r < n_rows; ++r) {
                if (is_missing_token(cells[r][c])) {
                    out.features(r, out_col) = nan;
                    out.set_missing(r, out_col, true);
                } else {
                    out.features(r, out_col) = parsed[r];
                }
            }
        } else {
            std::vector<std::string> raw(n_rows);
            for (std::size_t r = 0; r < n_rows; ++r) {
                out.features(r, out_col) = nan;
                if (is_missing_token(cells[r][c]))
                    out.set_missing(r, out_col, true);
                else
                    raw[r] = cells[r][c];
            }
            out.raw_categoricals.emplace(out_col, std::move(raw));
        }
        ++out_col;
    }

    out.validate();
    return out;
}

namespace {

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_field(std::ostream& out, const std::string& field, char delimiter) {
    const bool needs_quotes = field.find_first_of(std::string{delimiter} + "\"\n\r") != std::string::npos;
    if (!needs_quotes) {
        out << field;
        return;
    }
    out << '"';
    for (char c : field) {
        if (c == '"') out << '"';
        out << c;
    }
    out << '"';
}

}  // namespace

void write_csv(const Dataset& data, std::ostream& out, char delimiter) {
    for (std::size_t c = 0; c < data.n_cols(); ++c) {
        write_field(out, data.feature_names[c], delimiter);
        out << delimiter;
    }
    write_field(out, data.target_name, delimiter);
    out << '\n';
    for (std::size_t r = 0; r < data.n_rows(); ++r) {
        for (std::size_t c = 0; c < data.n_cols(); ++c) {
            if (data.is_missing(r, c)) {
                // empty field, reloads as missing
            } else if (auto it = data.raw_categoricals.find(c); it != data.raw_categoricals.end()) {
                write_field(out, it->second[r], delimiter);
            } else {
                out << format_value(data.features(r, c));
            }
            out << delimiter;
        }
        out << format_value(data.target[r]) << '\n';
    }
}

void write_csv(const Dataset& data, const std::filesystem::path& path, char delimiter) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    write_csv(data, out, delimiter);
}

std::vector<std::vector<std::string>> parse_csv_text(const std::string& text, char delimiter) {
    std::istringstream in(text);
    return read_records(in, delimiter);
}

}  // namespace fsel
