#include "namlite/folds.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "namlite/error.hpp"
#include "namlite/rng.hpp"

namespace namlite {

std::vector<Fold> split_folds(std::size_t n_samples, int n_val_splits, std::uint64_t seed) {
  if (n_val_splits < 2) throw ConfigError("n_val_splits must be at least 2");
  if (static_cast<std::size_t>(n_val_splits) > n_samples) {
    throw ConfigError("n_val_splits=" + std::to_string(n_val_splits) + " exceeds n_samples=" +
                      std::to_string(n_samples));
  }
  std::vector<std::size_t> order(n_samples);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(mix_seed(seed, 0xf01d));
  rng.shuffle(order);

  const auto k = static_cast<std::size_t>(n_val_splits);
  std::vector<int> owner(n_samples);
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t begin = f * n_samples / k;
    const std::size_t end = (f + 1) * n_samples / k;
    for (std::size_t p = begin; p < end; ++p) owner[order[p]] = static_cast<int>(f);
  }
  std::vector<Fold> folds(k);
  for (std::size_t i = 0; i < n_samples; ++i) {
    for (std::size_t f = 0; f < k; ++f) {
      (owner[i] == static_cast<int>(f) ? folds[f].validation : folds[f].train).push_back(i);
    }
  }
  return folds;
}

}  // namespace namlite
