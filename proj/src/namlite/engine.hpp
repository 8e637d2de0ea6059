#ifndef NAMLITE_ENGINE_HPP
#define NAMLITE_ENGINE_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "namlite/additive_model.hpp"
#include "namlite/binning.hpp"

namespace namlite {

// Loss on unlinked predictions. Rows are global sample indices into whatever
// label storage the objective owns.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual int output_dim() const = 0;
  // Mean loss over `rows`; eta is rows.size() x output_dim. When grad is
  // non-empty it receives d(mean loss)/d(eta) with the same layout.
  virtual double evaluate(std::span<const std::size_t> rows, std::span<const double> eta,
                          std::span<double> grad) const = 0;
};

// Which terms participate and which receive gradients.
struct PassOptions {
  std::span<const char> active;     // per term; empty = all active
  std::span<const char> trainable;  // per term; empty = all trainable
  bool train_gates = false;
  double feature_reg = 0.0;  // lambda on sum of main-effect gates
  double pair_reg = 0.0;     // lambda on sum of pair gates
  // Optional n_samples x out offsets added to eta (contributions of frozen
  // terms). Terms covered by it must be marked inactive.
  std::span<const double> base_eta;
};

struct BatchResult {
  double data_loss = 0.0;
  double penalty = 0.0;
  double total() const { return data_loss + penalty; }
};

// Unlinked predictions for `rows` (rows.size() x out).
std::vector<double> compute_eta(const AdditiveModel& model, const BinnedMatrix& x,
                                std::span<const std::size_t> rows, const PassOptions& options = {});

// Loss (plus sparsity penalty on active gates when train_gates is set) of the
// batch and, when grads is non-empty, its exact gradient accumulated into
// grads (same layout as model.params()). NumericError on non-finite values.
BatchResult evaluate_batch(const AdditiveModel& model, const BinnedMatrix& x,
                           std::span<const std::size_t> rows, const Objective& objective,
                           const PassOptions& options, std::span<double> grads);

}  // namespace namlite

#endif  // NAMLITE_ENGINE_HPP
