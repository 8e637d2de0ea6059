#include "namlite/binning.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "namlite/error.hpp"

namespace namlite {
namespace {

std::string format_edge(double value) {
  if (std::isinf(value)) return value < 0 ? "-inf" : "inf";
  char buffer[32];
  std::snprintf(buffer, sizeof(buffer), "%.4g", value);
  return buffer;
}

bool categories_numeric(const std::vector<std::string>& categories) {
  return std::all_of(categories.begin(), categories.end(),
                     [](const std::string& c) { return parse_number(c).has_value(); });
}

}  // namespace

int default_min_samples_per_bin(std::size_t n_samples) {
  const auto one_percent = static_cast<int>(std::ceil(0.01 * static_cast<double>(n_samples)));
  return std::max(1, std::min(50, one_percent));
}

std::vector<double> linear_quantiles(std::span<const double> sorted, std::span<const double> probs) {
  std::vector<double> out;
  out.reserve(probs.size());
  if (sorted.empty()) return out;
  const double last = static_cast<double>(sorted.size() - 1);
  for (double q : probs) {
    const double pos = std::clamp(q, 0.0, 1.0) * last;
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = pos - static_cast<double>(lo);
    out.push_back(sorted[lo] + frac * (sorted[hi] - sorted[lo]));
  }
  return out;
}

BinMap fit_bins(const Column& column, const FeatureSchema& schema, int max_bins,
                int min_samples_per_bin) {
  if (max_bins < 1) throw ConfigError("max_bins must be at least 1");
  if (min_samples_per_bin < 1) throw ConfigError("min_samples_per_bin must be at least 1");

  BinMap map;
  map.feature = schema.name;
  map.kind = schema.kind;

  if (schema.kind == FeatureKind::kContinuous) {
    std::vector<double> values;
    values.reserve(column.size());
    for (const auto& cell : column.cells) {
      if (is_missing_token(cell)) continue;
      auto v = parse_number(cell);
      if (!v) {
        throw DataError("unparseable value '" + cell + "' in continuous column '" + column.name + "'");
      }
      values.push_back(*v);
    }
    if (static_cast<int>(values.size()) < min_samples_per_bin) {
      throw DataError("feature '" + column.name + "' has " + std::to_string(values.size()) +
                      " non-missing values, fewer than min_samples_per_bin=" +
                      std::to_string(min_samples_per_bin));
    }
    std::sort(values.begin(), values.end());
    map.lower = values.front();
    map.upper = values.back();

    std::vector<double> probs;
    for (int k = 1; k < max_bins; ++k) probs.push_back(static_cast<double>(k) / max_bins);
    std::vector<double> edges = linear_quantiles(values, probs);
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::vector<long> counts(edges.size() + 1, 0);
    for (double v : values) {
      counts[std::lower_bound(edges.begin(), edges.end(), v) - edges.begin()]++;
    }
    while (counts.size() > 1) {
      const auto smallest = std::min_element(counts.begin(), counts.end()) - counts.begin();
      if (counts[smallest] >= min_samples_per_bin) break;
      std::size_t left = 0;
      if (smallest == 0) {
        left = 0;
      } else if (static_cast<std::size_t>(smallest) == counts.size() - 1) {
        left = smallest - 1;
      } else {
        left = counts[smallest - 1] <= counts[smallest + 1] ? smallest - 1 : smallest;
      }
      counts[left] += counts[left + 1];
      counts.erase(counts.begin() + static_cast<long>(left) + 1);
      edges.erase(edges.begin() + static_cast<long>(left));
    }
    map.edges = std::move(edges);
    map.n_bins = static_cast<int>(map.edges.size()) + 1;
    return map;
  }

  // Numeric tokens are keyed canonically so "1" and "1.0" share a category.
  std::map<std::string, long> counts;
  long observed = 0;
  for (const auto& cell : column.cells) {
    if (is_missing_token(cell)) continue;
    auto v = parse_number(cell);
    ++counts[v ? format_number(*v) : cell];
    ++observed;
  }
  if (observed < min_samples_per_bin) {
    throw DataError("feature '" + column.name + "' has " + std::to_string(observed) +
                    " non-missing values, fewer than min_samples_per_bin=" +
                    std::to_string(min_samples_per_bin));
  }
  std::vector<std::string> categories;
  for (const auto& [value, count] : counts) categories.push_back(value);
  if (schema.kind == FeatureKind::kBinary && categories.size() != 2) {
    throw DataError("binary feature '" + column.name + "' has " +
                    std::to_string(categories.size()) + " distinct values");
  }
  if (categories_numeric(categories)) {
    std::stable_sort(categories.begin(), categories.end(), [](const auto& a, const auto& b) {
      return *parse_number(a) < *parse_number(b);
    });
  }
  std::vector<std::string> kept;
  for (const auto& c : categories) {
    if (counts[c] >= min_samples_per_bin) kept.push_back(c);
  }
  if (kept.empty()) {
    throw DataError("no category of feature '" + column.name + "' has at least " +
                    std::to_string(min_samples_per_bin) + " samples");
  }
  map.categories = std::move(kept);
  map.n_bins = static_cast<int>(map.categories.size());
  return map;
}

int BinMap::transform_value(std::string_view cell) const {
  if (is_missing_token(cell)) return kMissingBin;
  if (kind == FeatureKind::kContinuous) {
    auto v = parse_number(cell);
    if (!v) {
      throw DataError("unparseable value '" + std::string(cell) + "' in continuous column '" +
                      feature + "'");
    }
    return 1 + static_cast<int>(std::lower_bound(edges.begin(), edges.end(), *v) - edges.begin());
  }
  for (std::size_t k = 0; k < categories.size(); ++k) {
    if (categories[k] == cell) return static_cast<int>(k) + 1;
  }
  // "1.0" should match a category stored as "1".
  if (auto v = parse_number(cell)) {
    for (std::size_t k = 0; k < categories.size(); ++k) {
      auto c = parse_number(categories[k]);
      if (c && *c == *v) return static_cast<int>(k) + 1;
    }
  }
  return kMissingBin;
}

std::vector<std::int32_t> BinMap::transform(const Column& column) const {
  std::vector<std::int32_t> out(column.size());
  if (kind == FeatureKind::kContinuous) {
    for (std::size_t i = 0; i < column.size(); ++i) out[i] = transform_value(column.cells[i]);
    return out;
  }
  std::map<std::string, int, std::less<>> lookup;
  for (std::size_t i = 0; i < column.size(); ++i) {
    const auto& cell = column.cells[i];
    auto it = lookup.find(cell);
    if (it == lookup.end()) it = lookup.emplace(cell, transform_value(cell)).first;
    out[i] = it->second;
  }
  return out;
}

double BinMap::bin_lower(int index) const {
  if (index <= 1 || edges.empty()) return lower;
  return edges[index - 2];
}

double BinMap::bin_upper(int index) const {
  if (index < 1 || index > static_cast<int>(edges.size())) return upper;
  return edges[index - 1];
}

std::string BinMap::label(int index) const {
  if (index == kMissingBin) return "missing";
  if (kind != FeatureKind::kContinuous) return categories.at(index - 1);
  const double lo = index == 1 ? -std::numeric_limits<double>::infinity() : edges[index - 2];
  const double hi = index == n_bins ? std::numeric_limits<double>::infinity() : edges[index - 1];
  return "(" + format_edge(lo) + ", " + format_edge(hi) + "]";
}

double BinMap::midpoint(int index) const {
  if (kind != FeatureKind::kContinuous || index == kMissingBin) return index;
  return 0.5 * (bin_lower(index) + bin_upper(index));
}

BinnedMatrix transform_table(const Table& table, std::span<const BinMap> bins) {
  BinnedMatrix out;
  out.n_samples = table.rows();
  out.columns.reserve(bins.size());
  for (const auto& map : bins) out.columns.push_back(map.transform(table.column(map.feature)));
  return out;
}

}  // namespace namlite
