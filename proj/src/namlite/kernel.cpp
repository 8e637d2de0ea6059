#include "namlite/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "namlite/error.hpp"

namespace namlite {
namespace {

// Offsets o such that index + o is a valid non-missing row. Missing input
// keeps only o == 0.
struct OffsetRange {
  int first;
  int last;
};

OffsetRange valid_offsets(int index, int rows, int size) {
  if (index == 0) return {0, 0};
  return {std::max(-size, 1 - index), std::min(size, rows - 1 - index)};
}

void check_index(int index, int rows) {
  if (index < 0 || index >= rows) {
    throw std::out_of_range("bin index " + std::to_string(index) + " outside 0.." +
                            std::to_string(rows - 1));
  }
}

int radius(std::span<const double> weights) { return static_cast<int>(weights.size() / 2); }

}  // namespace

std::vector<double> kernel_weights(int size, double phi) {
  if (size < 0) throw ConfigError("kernel size must be non-negative");
  if (!(phi >= 0.0)) throw ConfigError("kernel weight phi must be non-negative");
  std::vector<double> w(2 * static_cast<std::size_t>(size) + 1, 0.0);
  for (int o = -size; o <= size; ++o) {
    if (phi == 0.0) {
      w[o + size] = o == 0 ? 1.0 : 0.0;
    } else {
      w[o + size] = std::exp(-static_cast<double>(o * o) / (2.0 * phi));
    }
  }
  return w;
}

void smoothed_embedding(std::span<const double> table, int rows, int dim, int index,
                        std::span<const double> weights, std::span<double> out) {
  check_index(index, rows);
  const int k = radius(weights);
  std::fill(out.begin(), out.begin() + dim, 0.0);
  const auto range = valid_offsets(index, rows, k);
  for (int o = range.first; o <= range.last; ++o) {
    const double w = weights[o + k];
    if (w == 0.0) continue;
    const double* row = table.data() + static_cast<std::size_t>(index + o) * dim;
    for (int c = 0; c < dim; ++c) out[c] += w * row[c];
  }
}

void smoothed_embedding_backward(std::span<double> table_grad, int rows, int dim, int index,
                                 std::span<const double> weights,
                                 std::span<const double> grad_out) {
  check_index(index, rows);
  const int k = radius(weights);
  const auto range = valid_offsets(index, rows, k);
  for (int o = range.first; o <= range.last; ++o) {
    const double w = weights[o + k];
    if (w == 0.0) continue;
    double* row = table_grad.data() + static_cast<std::size_t>(index + o) * dim;
    for (int c = 0; c < dim; ++c) row[c] += w * grad_out[c];
  }
}

void pair_smoothed_embedding(std::span<const double> table, int rows_a, int rows_b, int dim,
                             int index_a, int index_b, std::span<const double> weights,
                             std::span<double> out) {
  check_index(index_a, rows_a);
  check_index(index_b, rows_b);
  const int k = radius(weights);
  std::fill(out.begin(), out.begin() + dim, 0.0);
  const auto ra = valid_offsets(index_a, rows_a, k);
  const auto rb = valid_offsets(index_b, rows_b, k);
  for (int a = ra.first; a <= ra.last; ++a) {
    const double wa = weights[a + k];
    if (wa == 0.0) continue;
    for (int b = rb.first; b <= rb.last; ++b) {
      const double w = wa * weights[b + k];
      if (w == 0.0) continue;
      const std::size_t cell = static_cast<std::size_t>(index_a + a) * rows_b + (index_b + b);
      const double* row = table.data() + cell * dim;
      for (int c = 0; c < dim; ++c) out[c] += w * row[c];
    }
  }
}

void pair_smoothed_embedding_backward(std::span<double> table_grad, int rows_a, int rows_b,
                                      int dim, int index_a, int index_b,
                                      std::span<const double> weights,
                                      std::span<const double> grad_out) {
  check_index(index_a, rows_a);
  check_index(index_b, rows_b);
  const int k = radius(weights);
  const auto ra = valid_offsets(index_a, rows_a, k);
  const auto rb = valid_offsets(index_b, rows_b, k);
  for (int a = ra.first; a <= ra.last; ++a) {
    const double wa = weights[a + k];
    if (wa == 0.0) continue;
    for (int b = rb.first; b <= rb.last; ++b) {
      const double w = wa * weights[b + k];
      if (w == 0.0) continue;
      const std::size_t cell = static_cast<std::size_t>(index_a + a) * rows_b + (index_b + b);
      double* row = table_grad.data() + cell * dim;
      for (int c = 0; c < dim; ++c) row[c] += w * grad_out[c];
    }
  }
}

}  // namespace namlite
