#ifndef NAMLITE_KERNEL_HPP
#define NAMLITE_KERNEL_HPP

#include <span>
#include <vector>

namespace namlite {

struct KernelConfig {
  double phi = 3.0;  // Gaussian variance; 0 disables smoothing
  int size = 5;      // neighbourhood radius K

  bool operator==(const KernelConfig&) const = default;
};

// Weights for offsets -K..K (index o + K): exp(-o^2 / (2 phi)), or one-hot at
// offset 0 when phi == 0. Not normalized.
std::vector<double> kernel_weights(int size, double phi);

// Embedding tables are row-major (rows x dim) with row 0 the missing bin.
//
// Smoothed embedding of bin `index`: the missing row is returned as is; any
// other bin sums weighted rows index+o restricted to 1..rows-1, so the
// neighbourhood never reaches into the missing row and is clipped at both ends.
void smoothed_embedding(std::span<const double> table, int rows, int dim, int index,
                        std::span<const double> weights, std::span<double> out);

// Adjoint of smoothed_embedding: scatters grad_out into table_grad.
void smoothed_embedding_backward(std::span<double> table_grad, int rows, int dim, int index,
                                 std::span<const double> weights,
                                 std::span<const double> grad_out);

// Two-dimensional version over a (rows_a x rows_b x dim) table, weight
// w[a] * w[b] per offset pair, with the same clipping applied on each axis.
void pair_smoothed_embedding(std::span<const double> table, int rows_a, int rows_b, int dim,
                             int index_a, int index_b, std::span<const double> weights,
                             std::span<double> out);

void pair_smoothed_embedding_backward(std::span<double> table_grad, int rows_a, int rows_b,
                                      int dim, int index_a, int index_b,
                                      std::span<const double> weights,
                                      std::span<const double> grad_out);

}  // namespace namlite

#endif  // NAMLITE_KERNEL_HPP
