#ifndef NAMLITE_FOLDS_HPP
#define NAMLITE_FOLDS_HPP

#include <cstddef>
#include <cstdint>
#include <vector>

namespace namlite {

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

// Shuffles 0..n_samples-1 with `seed` and cuts the permutation into
// n_val_splits contiguous validation blocks whose sizes differ by at most one.
// Fold k trains on everything outside block k. Indices inside each list are
// sorted ascending.
std::vector<Fold> split_folds(std::size_t n_samples, int n_val_splits, std::uint64_t seed);

}  // namespace namlite

#endif  // NAMLITE_FOLDS_HPP
