#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "recobert/catalog.hpp"
#include "recobert/encoder.hpp"
#include "recobert/objectives.hpp"
#include "recobert/tokenizer.hpp"

namespace recobert {

struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainerConfig {
  double p_s = 0.5;
  int batch_size = 16;
  int max_steps = 2000;
  int eval_every = 100;
  int patience = 5;
  double learning_rate = 3e-4;
  /// Negative selects 1% of max_steps (at least one step).
  int warmup_steps = -1;
  AdamConfig adam;
  std::uint64_t seed = 0;
  Objective objective = Objective::recobert;
  MaskingOptions masking;
  /// Global gradient-norm clip; 0 disables.
  double clip_norm = 0.0;
  int threads = 1;

  void validate() const;
  int effective_warmup() const;
};

/// Item catalog with titles and descriptions tokenized once.
struct TokenizedCatalog {
  std::vector<std::string> ids;
  std::vector<std::vector<std::string>> titles;
  std::vector<std::vector<std::string>> descriptions;

  explicit TokenizedCatalog(const Catalog& catalog);
  std::size_t size() const { return ids.size(); }
};

struct TrainingPair {
  std::vector<std::string> title;
  std::vector<std::string> description;
  int label = 1;
  std::size_t title_item = 0;
  std::size_t description_item = 0;
};

/// Keeps the item's own description (label 1) with probability 1 - p_s,
/// otherwise swaps in the description of a uniformly drawn other item
/// (label 0). Throws CatalogTooSmall for catalogs under two items.
TrainingPair make_training_pair(std::size_t item, const TokenizedCatalog& catalog, double p_s, Rng& rng);
TrainingPair make_training_pair(const CatalogItem& item, const Catalog& catalog, double p_s, Rng& rng);

template <typename Real>
class Adam {
 public:
  explicit Adam(const Parameters<Real>& shape_like, AdamConfig config = {})
      : config_(config), m_(shape_like.zeros_like()), v_(shape_like.zeros_like()) {}

  void step(Parameters<Real>& params, const Parameters<Real>& grads, double learning_rate);
  long steps() const { return t_; }

 private:
  AdamConfig config_;
  Parameters<Real> m_, v_;
  long t_ = 0;
};

struct EvalRecord {
  int step = 0;
  /// Exponential moving average of the training loss; NaN before step 1.
  double train_loss = 0.0;
  LossBreakdown val;
  bool best = false;
};

struct TrainingHistory {
  std::vector<EvalRecord> records;
  int best_step = 0;
  std::string stop_reason;
};

struct TrainResult {
  Model best;
  Model final;
  TrainingHistory history;
};

/// Validation examples: fixed pairs and masks derived from `seed`.
std::vector<TrainingExample> make_validation_examples(const TokenizedCatalog& val, const Vocabulary& vocab,
                                                      const EncoderConfig& model, const TrainerConfig& cfg);

TrainResult train(const Model& init, const EncoderConfig& model, const Catalog& train_catalog,
                  const Catalog& val_catalog, const Vocabulary& vocab, const TrainerConfig& cfg,
                  const std::function<void(const EvalRecord&)>& on_eval = {});

}  // namespace recobert
