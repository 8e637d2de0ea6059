#ifndef NAMLITE_TRAINER_HPP
#define NAMLITE_TRAINER_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "namlite/additive_model.hpp"
#include "namlite/binning.hpp"
#include "namlite/engine.hpp"
#include "namlite/rng.hpp"

namespace namlite {

struct AdamConfig {
  double learning_rate = 5e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

using ParamRange = std::pair<std::size_t, std::size_t>;  // [begin, end)

class Adam {
 public:
  Adam(std::size_t n_params, AdamConfig config);
  // One update of the parameters inside `ranges`; everything else is left
  // alone, moments included.
  void step(std::span<double> params, std::span<const double> grads,
            std::span<const ParamRange> ranges);
  void reset();

 private:
  AdamConfig config_;
  std::vector<double> m_;
  std::vector<double> v_;
  long step_ = 0;
};

struct TrainOptions {
  int batch_size = 128;
  int max_epochs = 100;
  int patience = 5;
  AdamConfig adam;
};

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;  // mean batch objective (data loss + penalty)
  double val_loss = 0.0;    // data loss on the validation rows
  int active_terms = 0;
};

struct TrainResult {
  std::vector<EpochRecord> history;
  int best_epoch = -1;  // -1 when no epoch ran
  double best_val_loss = 0.0;
};

// Parameter ranges updated for a term: everything but the gate, plus the
// gate when `with_gate` is set.
std::vector<ParamRange> term_ranges(const AdditiveModel& model, int term, bool with_gate);

// Mean data loss over `rows`, evaluated in chunks.
double dataset_loss(const AdditiveModel& model, const BinnedMatrix& x,
                    std::span<const std::size_t> rows, const Objective& objective,
                    const PassOptions& options);

// Minibatch Adam on the trainable terms with gates held fixed. After every
// epoch the validation loss is recorded; training stops after `patience`
// epochs without improvement and the best epoch's parameters are restored.
TrainResult train_early_stopping(AdditiveModel& model, const BinnedMatrix& x,
                                 std::span<const std::size_t> train,
                                 std::span<const std::size_t> validation,
                                 const Objective& objective, const TrainOptions& options,
                                 const PassOptions& pass, Rng& rng);

// Minibatch Adam with trainable gates and the sparsity penalty. A term whose
// gate reaches exactly 0 is dropped from `active` for good. Stops once every
// active gate is saturated (0 or 1) or after options.max_epochs epochs.
struct GatedTraining {
  double feature_reg = 0.0;
  double pair_reg = 0.0;
  std::span<const char> trainable;  // per term; empty = all
  std::span<const double> base_eta;
};
TrainResult train_gated(AdditiveModel& model, const BinnedMatrix& x,
                        std::span<const std::size_t> train,
                        std::span<const std::size_t> validation, const Objective& objective,
                        const TrainOptions& options, const GatedTraining& gated,
                        std::vector<char>& active, Rng& rng);

// Bin (or cell) occupancy of each term over `rows`.
std::vector<std::vector<std::int64_t>> term_counts(const AdditiveModel& model,
                                                   const BinnedMatrix& x,
                                                   std::span<const std::size_t> rows);

// Sets the centering constant of each term to the mean of s * f over the
// counted samples and the intercept to their sum.
void finalize(AdditiveModel& model, std::span<const std::vector<std::int64_t>> counts);

}  // namespace namlite

#endif  // NAMLITE_TRAINER_HPP
