#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace horizonlab::app {

/// Shortest text that is byte-stable across runs: printf %.17g, with
/// inf, -inf and nan spelled out.
std::string format_double(double v);

/// Single-header CSV table.  Cells are numbers (17 significant digits) or
/// strings; fields are quoted per RFC 4180 and records end with CRLF.
class CsvTable {
public:
    using Cell = std::variant<double, long long, std::string>;

    explicit CsvTable(std::vector<std::string> header);

    void add_row(std::vector<Cell> row);
    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& header() const { return header_; }
    std::string str() const;

private:
    std::vector<std::string> header_;
    std::vector<std::vector<Cell>> rows_;
};

/// RFC 4180 field escaping: quotes the field when it holds a comma, quote, CR
/// or LF, doubling embedded quotes.
std::string csv_escape(const std::string& field);

/// Parsed CSV with the first record as header.
struct CsvData {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// RFC 4180 parser (quoted fields, embedded separators and line breaks,
/// CRLF or LF record ends).  Throws std::runtime_error on malformed quoting.
CsvData parse_csv(const std::string& text);

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partial file.  Creates missing parent directories.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace horizonlab::app
