#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "recobert/random.hpp"
#include "recobert/tokenizer.hpp"

namespace recobert {

template <typename Real>
using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
template <typename Real>
using RowVector = Eigen::Matrix<Real, 1, Eigen::Dynamic>;

struct EncoderConfig {
  int vocab_size = 0;
  int max_len = 256;
  int hidden = 64;
  int layers = 2;
  int heads = 4;
  int ffn = 256;
  double dropout = 0.1;
  double layer_norm_epsilon = 1e-12;
  bool segment_embeddings = true;
  /// Learned h->h projections on F_t and F_d before the cosine head.
  bool tdm_projection = false;
  int title_cap = kDefaultTitleCap;

  /// Throws InvalidConfig.
  void validate() const;
  std::string to_json() const;
  static EncoderConfig from_json(std::string_view json);
  bool operator==(const EncoderConfig&) const = default;
};

template <typename Real>
struct LayerParameters {
  Matrix<Real> query_weight, query_bias;
  Matrix<Real> key_weight, key_bias;
  Matrix<Real> value_weight, value_bias;
  Matrix<Real> output_weight, output_bias;
  Matrix<Real> attention_ln_gain, attention_ln_bias;
  Matrix<Real> ffn_in_weight, ffn_in_bias;
  Matrix<Real> ffn_out_weight, ffn_out_bias;
  Matrix<Real> ffn_ln_gain, ffn_ln_bias;
};

template <typename Real>
struct NamedTensor {
  std::string name;
  Matrix<Real>* value;
};

template <typename Real>
struct ConstNamedTensor {
  std::string name;
  const Matrix<Real>* value;
};

/// All trainable tensors. Biases and layer-norm vectors are stored as 1 x n
/// matrices. The MLM projection reuses `token_embedding`; only its bias is
/// separate. Optional tensors are empty (0 x 0) and skipped by `tensors()`.
template <typename Real>
struct Parameters {
  Matrix<Real> token_embedding;     // vocab x h
  Matrix<Real> position_embedding;  // max_len x h
  Matrix<Real> segment_embedding;   // 2 x h
  Matrix<Real> embedding_ln_gain, embedding_ln_bias;
  std::vector<LayerParameters<Real>> layers;
  Matrix<Real> mlm_bias;  // 1 x vocab
  Matrix<Real> tdm_title_weight, tdm_title_bias;
  Matrix<Real> tdm_desc_weight, tdm_desc_bias;

  /// Fixed order; this is the checkpoint order too.
  std::vector<NamedTensor<Real>> tensors();
  std::vector<ConstNamedTensor<Real>> tensors() const;

  /// Same shapes, all zeros.
  Parameters zeros_like() const;
  std::size_t parameter_count() const;
  bool all_finite() const;

  template <typename Other>
  Parameters<Other> cast() const;
};

/// Per-layer intermediates kept for backpropagation.
template <typename Real>
struct LayerTrace {
  Matrix<Real> input;
  Matrix<Real> query, key, value;
  std::vector<Matrix<Real>> probs;  // per head: rows x keys
  Matrix<Real> context;
  Matrix<Real> attention_dropout;
  Matrix<Real> ln1_xhat;
  RowVector<Real> ln1_inv_std;
  Matrix<Real> ln1_out;
  Matrix<Real> ffn_pre;
  Matrix<Real> ffn_act;
  Matrix<Real> ffn_dropout;
  Matrix<Real> ln2_xhat;
  RowVector<Real> ln2_inv_std;
};

/// Forward pass record for one sequence. `rows` leading positions were
/// computed; attention keys are restricted to the `keys` non-PAD positions.
template <typename Real>
struct EncoderTrace {
  int rows = 0;
  int keys = 0;
  Matrix<Real> embedding_xhat;
  RowVector<Real> embedding_inv_std;
  Matrix<Real> embedding_dropout;
  std::vector<LayerTrace<Real>> layers;
  Matrix<Real> output;  // rows x h
};

template <typename Real>
Parameters<Real> init_model(const EncoderConfig& config, std::uint64_t seed);

/// Encodes the first `rows` positions of `seq` (rows <= max_len). PAD keys are
/// masked out, so rows beyond the active length never influence earlier ones.
/// Dropout is applied only when `dropout_rng` is non-null.
template <typename Real>
EncoderTrace<Real> encode_sequence(const Parameters<Real>& params, const EncoderConfig& config,
                                   const InputSequence& seq, int rows, Rng* dropout_rng);

/// Backpropagates d(loss)/d(trace.output) into `grads` (accumulating).
template <typename Real>
void backward_sequence(const Parameters<Real>& params, const EncoderConfig& config, const InputSequence& seq,
                       const EncoderTrace<Real>& trace, const Matrix<Real>& d_output, Parameters<Real>& grads);

/// Hidden states [max_len x h] per sequence. `train_mode` enables dropout
/// driven by `rng`, which must then be non-null.
template <typename Real>
std::vector<Matrix<Real>> forward(const Parameters<Real>& params, const EncoderConfig& config,
                                  std::span<const InputSequence> batch, bool train_mode = false, Rng* rng = nullptr);

template <typename Real>
struct ItemEmbedding {
  RowVector<Real> title;
  RowVector<Real> description;
};

/// Mean of hidden rows over the title span and over the description span.
template <typename Real>
ItemEmbedding<Real> pool_features(const Matrix<Real>& states, const InputSequence& seq);

using Model = Parameters<float>;

struct Checkpoint {
  Model params;
  EncoderConfig config;
  std::uint64_t vocab_hash = 0;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

std::string checkpoint_serialize(const Model& params, const EncoderConfig& config, std::uint64_t vocab_hash);
/// Rejects a vocab hash different from `expected_vocab_hash` when supplied.
Checkpoint checkpoint_parse(std::string_view bytes, std::optional<std::uint64_t> expected_vocab_hash = std::nullopt);
void checkpoint_save(const Model& params, const EncoderConfig& config, std::uint64_t vocab_hash,
                     const std::filesystem::path& path);
Checkpoint checkpoint_load(const std::filesystem::path& path,
                           std::optional<std::uint64_t> expected_vocab_hash = std::nullopt);

}  // namespace recobert
