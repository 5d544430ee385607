#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fsel/dataset.hpp"

namespace fsel {

struct CsvOptions {
    char delimiter = ',';
    // Target column by header name, or by 0-based index when target_index is set.
    std::string target_column;
    std::optional<std::size_t> target_index;
    std::vector<std::string> missing_tokens = {"", "?", "NA", "nan"};
    std::optional<Task> task;  // empty = auto-detect
};

class CsvError : public std::runtime_error {
public:
    enum class Kind { unreadable, missing_target, ragged_row, empty, bad_target };
    CsvError(Kind kind, const std::string& msg) : std::runtime_error(msg), kind(kind) {}
    Kind kind;
};

// Parses an RFC-4180-style CSV (configurable delimiter, quoted fields, header
// row required). Columns where every observed cell parses as a number become
// feature columns; anything else is kept as raw strings for later encoding.
// Cells matching a missing token are masked and hold NaN.
//
// Task auto-detection: a numeric target with at most 20 distinct integer
// values becomes classification (codes assigned by sorted value), any other
// numeric target is regression, and a textual target is always classification
// (codes assigned by sorted distinct string).
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options);
Dataset load_csv(std::istream& in, const CsvOptions& options, const std::string& origin = "<stream>");

// Inverse of load_csv for numeric data; doubles are printed with enough digits
// to round-trip exactly. Masked cells are written as empty fields.
void write_csv(const Dataset& data, std::ostream& out, char delimiter = ',');
void write_csv(const Dataset& data, const std::filesystem::path& path, char delimiter = ',');

// Raw record splitting with RFC-4180 quoting, shared with the report reader.
std::vector<std::vector<std::string>> parse_csv_text(const std::string& text, char delimiter = ',');

}  // namespace fsel
