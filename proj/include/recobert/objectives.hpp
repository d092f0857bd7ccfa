#pragma once

#include <cstdint>
#include <span>

#include "recobert/encoder.hpp"
#include "recobert/tokenizer.hpp"

namespace recobert {

enum class Objective { recobert, mlm_only };

/// Scores are clamped into [kProbabilityClamp, 1 - kProbabilityClamp] before logs.
inline constexpr double kProbabilityClamp = 1e-7;
/// Vectors with a smaller L2 norm have no defined cosine.
inline constexpr double kZeroNorm = 1e-12;

struct LossBreakdown {
  double l_tdm = 0.0;
  double l_mlm = 0.0;
  double l_total = 0.0;
};

/// Cosine similarity; throws ZeroVector when either norm is below kZeroNorm.
template <typename Real>
double cosine(const RowVector<Real>& a, const RowVector<Real>& b);

/// (1 + cosine(title, description)) / 2, in [0, 1].
template <typename Real>
double c_tdm(const RowVector<Real>& title, const RowVector<Real>& description);

/// Cosine head applied to pooled features, including the optional projection.
template <typename Real>
double tdm_score(const Parameters<Real>& params, const EncoderConfig& config, const ItemEmbedding<Real>& features);

/// Mean binary cross-entropy. Throws LengthMismatch.
double loss_tdm(std::span<const double> scores, std::span<const int> labels);

/// Rows of `states` at `positions` projected onto the tied token embeddings,
/// plus the output bias: [positions x vocab]. Throws PositionOutOfRange.
template <typename Real>
Matrix<Real> mlm_logits(const Matrix<Real>& states, std::span<const int> positions, const Parameters<Real>& params);

/// Mean over rows of -log softmax(row)[target]. Throws LengthMismatch.
template <typename Real>
double loss_mlm(const Matrix<Real>& logits, std::span<const TokenId> targets);

struct TrainingExample {
  MaskedSequence sequence;
  int label = 1;  // 1: title and description from the same item
  std::uint64_t dropout_seed = 0;
};

struct LossOptions {
  Objective objective = Objective::recobert;
  /// Enables dropout (seeded per example).
  bool train_mode = false;
  int threads = 1;
};

/// One forward pass per example feeds both losses. L_TDM is averaged over
/// examples, L_MLM over all targets in the batch. When `grads` is non-null it
/// is overwritten with d(l_total)/d(params); per-example gradients are summed
/// in example order, so results do not depend on `threads`.
/// For Objective::mlm_only, l_tdm is reported as 0 and contributes nothing.
template <typename Real>
LossBreakdown total_loss_and_gradients(const Parameters<Real>& params, const EncoderConfig& config,
                                       std::span<const TrainingExample> batch, const LossOptions& options,
                                       Parameters<Real>* grads);

}  // namespace recobert
