#include "namlite/table.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_set>

#include "namlite/error.hpp"

namespace namlite {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

bool is_missing_token(std::string_view token) {
  token = trim(token);
  return token.empty() || iequals(token, "na") || iequals(token, "nan") ||
         iequals(token, "null");
}

std::optional<double> parse_number(std::string_view token) {
  token = trim(token);
  if (is_missing_token(token)) return std::nullopt;
  if (token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size()) return std::nullopt;
  if (std::isnan(value)) return std::nullopt;
  return value;
}

std::string format_number(double value) {
  if (std::isnan(value)) return {};
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, ptr);
}

Column Column::numeric(std::string name, std::span<const double> values) {
  Column column{std::move(name), {}};
  column.cells.reserve(values.size());
  for (double v : values) column.cells.push_back(format_number(v));
  return column;
}

Column Column::text(std::string name, std::vector<std::string> values) {
  return Column{std::move(name), std::move(values)};
}

Table::Table(std::vector<Column> columns) {
  for (auto& c : columns) add_column(std::move(c));
}

bool Table::has_column(std::string_view name) const {
  return std::any_of(columns_.begin(), columns_.end(),
                     [&](const Column& c) { return c.name == name; });
}

const Column& Table::column(std::string_view name) const {
  for (const auto& c : columns_) {
    if (c.name == name) return c;
  }
  throw DataError("missing column '" + std::string(name) + "'");
}

std::vector<std::string> Table::column_names() const {
  std::vector<std::string> names;
  names.reserve(columns_.size());
  for (const auto& c : columns_) names.push_back(c.name);
  return names;
}

void Table::add_column(Column column) {
  if (!columns_.empty() && column.size() != rows()) {
    throw DataError("column '" + column.name + "' has " + std::to_string(column.size()) +
                    " rows, expected " + std::to_string(rows()));
  }
  if (has_column(column.name)) throw DataError("duplicate column name '" + column.name + "'");
  columns_.push_back(std::move(column));
}

Table Table::without(std::span<const std::string> names) const {
  std::set<std::string, std::less<>> drop(names.begin(), names.end());
  Table out;
  for (const auto& c : columns_) {
    if (!drop.count(c.name)) out.columns_.push_back(c);
  }
  return out;
}

Table Table::select_rows(std::span<const std::size_t> rows) const {
  Table out;
  for (const auto& c : columns_) {
    Column picked{c.name, {}};
    picked.cells.reserve(rows.size());
    for (std::size_t r : rows) picked.cells.push_back(c.cells.at(r));
    out.columns_.push_back(std::move(picked));
  }
  return out;
}

Table parse_csv(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t line = 1;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    // A blank line yields a single empty field; skip it.
    if (!(record.size() == 1 && record.front().empty())) records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line;
        field.push_back(ch);
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (field_started && !field.empty()) {
          throw DataError("stray quote in unquoted field on line " + std::to_string(line));
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        ++line;
        break;
      case '\n':
        end_record();
        ++line;
        break;
      default:
        field.push_back(ch);
        field_started = true;
    }
  }
  if (in_quotes) throw DataError("unterminated quoted field");
  if (!field.empty() || !record.empty()) end_record();

  if (records.empty()) throw DataError("empty CSV input: no header row");
  const auto& header = records.front();
  std::vector<Column> columns;
  columns.reserve(header.size());
  std::unordered_set<std::string> seen;
  for (const auto& name : header) {
    if (!seen.insert(name).second) throw DataError("duplicate column name '" + name + "'");
    columns.push_back(Column{name, {}});
  }
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != header.size()) {
      throw DataError("row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                      " fields, expected " + std::to_string(header.size()));
    }
    for (std::size_t c = 0; c < header.size(); ++c) {
      columns[c].cells.push_back(std::move(records[r][c]));
    }
  }
  return Table(std::move(columns));
}

Table read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_csv(buffer.str());
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out.push_back('"');
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

}  // namespace namlite
