#ifndef NAMLITE_TABLE_HPP
#define NAMLITE_TABLE_HPP

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace namlite {

// True for the tokens treated as missing: empty, "NA", "NaN", "null"
// (case-insensitive, surrounding whitespace ignored).
bool is_missing_token(std::string_view token);

// Parses a complete token as a finite or infinite double. Missing tokens and
// partially numeric tokens return nullopt.
std::optional<double> parse_number(std::string_view token);

// Shortest round-trip decimal representation; NaN formats as "" (missing).
std::string format_number(double value);

struct Column {
  std::string name;
  std::vector<std::string> cells;

  std::size_t size() const { return cells.size(); }
  bool is_missing(std::size_t row) const { return is_missing_token(cells[row]); }

  static Column numeric(std::string name, std::span<const double> values);
  static Column text(std::string name, std::vector<std::string> values);
};

// Column-oriented table of raw text cells.
class Table {
 public:
  Table() = default;
  explicit Table(std::vector<Column> columns);

  std::size_t rows() const { return columns_.empty() ? 0 : columns_.front().size(); }
  std::size_t cols() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }

  bool has_column(std::string_view name) const;
  const Column& column(std::string_view name) const;  // DataError if absent
  std::vector<std::string> column_names() const;

  void add_column(Column column);
  Table without(std::span<const std::string> names) const;
  Table select_rows(std::span<const std::size_t> rows) const;

 private:
  std::vector<Column> columns_;
};

// RFC-4180 reader: comma delimiter, header row, double-quote escaping, CRLF or LF.
Table parse_csv(std::string_view text);
Table read_csv(const std::filesystem::path& path);

// Quotes a field when it contains a delimiter, quote or newline.
std::string csv_escape(std::string_view field);

}  // namespace namlite

#endif  // NAMLITE_TABLE_HPP
