#ifndef NAMLITE_SCHEMA_HPP
#define NAMLITE_SCHEMA_HPP

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "namlite/table.hpp"

namespace namlite {

enum class FeatureKind { kContinuous, kCategorical, kBinary };

std::string_view to_string(FeatureKind kind);
FeatureKind feature_kind_from_string(std::string_view text);  // ConfigError on unknown

struct FeatureSchema {
  std::string name;
  FeatureKind kind = FeatureKind::kContinuous;

  bool operator==(const FeatureSchema&) const = default;
};

// Categorical when any non-missing cell is non-numeric, binary when exactly two
// distinct non-missing values occur, continuous otherwise.
FeatureSchema infer_feature(const Column& column);

// Infers every column of `table`. Entries of `overrides` replace the inferred
// kind for the named columns.
std::vector<FeatureSchema> infer_schema(
    const Table& table, const std::map<std::string, FeatureKind, std::less<>>& overrides = {});

}  // namespace namlite

#endif  // NAMLITE_SCHEMA_HPP
