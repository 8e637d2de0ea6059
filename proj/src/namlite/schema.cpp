#include "namlite/schema.hpp"

#include <set>

#include "namlite/error.hpp"

namespace namlite {

std::string_view to_string(FeatureKind kind) {
  switch (kind) {
    case FeatureKind::kContinuous:
      return "continuous";
    case FeatureKind::kCategorical:
      return "categorical";
    case FeatureKind::kBinary:
      return "binary";
  }
  return "continuous";
}

FeatureKind feature_kind_from_string(std::string_view text) {
  if (text == "continuous") return FeatureKind::kContinuous;
  if (text == "categorical") return FeatureKind::kCategorical;
  if (text == "binary") return FeatureKind::kBinary;
  throw ConfigError("unknown feature kind '" + std::string(text) + "'");
}

FeatureSchema infer_feature(const Column& column) {
  bool numeric = true;
  std::set<std::string> text_values;
  std::set<double> numeric_values;
  std::size_t observed = 0;
  for (const auto& cell : column.cells) {
    if (is_missing_token(cell)) continue;
    ++observed;
    if (numeric) {
      if (auto v = parse_number(cell)) {
        numeric_values.insert(*v);
      } else {
        numeric = false;
      }
    }
    if (text_values.size() <= 2) text_values.insert(cell);
  }
  if (observed == 0) throw DataError("all-missing feature '" + column.name + "'");

  const std::size_t distinct = numeric ? numeric_values.size() : text_values.size();
  FeatureSchema schema{column.name, FeatureKind::kContinuous};
  if (distinct == 2) {
    schema.kind = FeatureKind::kBinary;
  } else if (!numeric) {
    schema.kind = FeatureKind::kCategorical;
  }
  return schema;
}

std::vector<FeatureSchema> infer_schema(
    const Table& table, const std::map<std::string, FeatureKind, std::less<>>& overrides) {
  if (table.cols() == 0 || table.rows() == 0) throw DataError("empty table");
  std::set<std::string> names;
  std::vector<FeatureSchema> schema;
  schema.reserve(table.cols());
  for (const auto& column : table.columns()) {
    if (!names.insert(column.name).second) {
      throw DataError("duplicate column name '" + column.name + "'");
    }
    FeatureSchema feature = infer_feature(column);
    if (auto it = overrides.find(column.name); it != overrides.end()) feature.kind = it->second;
    schema.push_back(std::move(feature));
  }
  return schema;
}

}  // namespace namlite
