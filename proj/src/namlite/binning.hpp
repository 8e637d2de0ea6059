#ifndef NAMLITE_BINNING_HPP
#define NAMLITE_BINNING_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "namlite/schema.hpp"
#include "namlite/table.hpp"

namespace namlite {

inline constexpr int kMissingBin = 0;
inline constexpr int kDefaultMaxBins = 32;

// min(50, ceil(0.01 * n_samples)), never below 1.
int default_min_samples_per_bin(std::size_t n_samples);

// Quantiles of a sorted sample using linear interpolation between order
// statistics: position q * (n - 1), interpolated between its floor and ceil.
std::vector<double> linear_quantiles(std::span<const double> sorted, std::span<const double> probs);

// Discretization of one feature. Index 0 is reserved for missing values; the
// non-missing bins occupy indices 1..n_bins.
//
// Continuous features use half-open intervals (edge[k-1], edge[k]]: a value
// equal to a cut point lands in the lower bin. Categorical and binary
// features get one bin per retained category, in sorted order.
struct BinMap {
  std::string feature;
  FeatureKind kind = FeatureKind::kContinuous;
  std::vector<double> edges;
  std::vector<std::string> categories;
  double lower = 0.0;  // smallest observed value at fit time (continuous)
  double upper = 0.0;  // largest observed value at fit time (continuous)
  int n_bins = 1;

  int index_space() const { return n_bins + 1; }
  bool is_continuous() const { return kind == FeatureKind::kContinuous; }

  int transform_value(std::string_view cell) const;
  std::vector<std::int32_t> transform(const Column& column) const;

  // Human-readable bin description: "missing", "(a, b]" or the category.
  std::string label(int index) const;
  // Representative x position of a continuous bin; the index for categories.
  double midpoint(int index) const;
  double bin_lower(int index) const;
  double bin_upper(int index) const;

  bool operator==(const BinMap&) const = default;
};

// Fits the bin map for one column.
//
// Continuous: cut points at quantiles 1/max_bins, ..., (max_bins-1)/max_bins,
// duplicates collapsed, then the smallest under-populated bin is repeatedly
// merged into its less populated neighbour until every bin holds at least
// min_samples_per_bin training values.
// Categorical/binary: categories seen fewer than min_samples_per_bin times are
// not given a bin and map to the missing bin, like unseen categories.
BinMap fit_bins(const Column& column, const FeatureSchema& schema, int max_bins,
                int min_samples_per_bin);

// Column-major matrix of bin indices.
struct BinnedMatrix {
  std::size_t n_samples = 0;
  std::vector<std::vector<std::int32_t>> columns;

  std::size_t n_features() const { return columns.size(); }
  std::int32_t at(std::size_t row, std::size_t feature) const { return columns[feature][row]; }
};

// Applies `bins` to the columns of `table` named by each BinMap.
BinnedMatrix transform_table(const Table& table, std::span<const BinMap> bins);

}  // namespace namlite

#endif  // NAMLITE_BINNING_HPP
