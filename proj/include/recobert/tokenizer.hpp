#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "recobert/random.hpp"

namespace recobert {

using TokenId = std::int32_t;

inline constexpr TokenId kPad = 0;
inline constexpr TokenId kUnk = 1;
inline constexpr TokenId kCls = 2;
inline constexpr TokenId kSep = 3;
inline constexpr TokenId kMask = 4;
inline constexpr TokenId kNumSpecials = 5;

/// Token <-> id map. Ids 0..4 are the fixed specials; corpus tokens follow.
class Vocabulary {
 public:
  Vocabulary();
  /// `tokens` are the non-special entries in id order (first gets id 5).
  explicit Vocabulary(std::vector<std::string> tokens);

  TokenId id(std::string_view token) const;
  const std::string& token(TokenId id) const { return id_to_token_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return id_to_token_.size(); }
  bool contains(std::string_view token) const;

  /// File form: `#recobert-vocab v1` header, then one non-special token per line.
  std::string serialize() const;
  static Vocabulary parse(std::string_view text);
  void save(const std::filesystem::path& path) const;
  static Vocabulary load(const std::filesystem::path& path);

  /// FNV-1a over the serialized file bytes.
  std::uint64_t hash() const;

  bool operator==(const Vocabulary& other) const { return id_to_token_ == other.id_to_token_; }

 private:
  std::vector<std::string> id_to_token_;
  std::unordered_map<std::string, TokenId> token_to_id_;
};

/// NFKC, lowercase, whitespace split, punctuation as separate tokens.
std::vector<std::string> tokenize(std::string_view text);

/// Tokens with frequency >= min_freq, ordered by (frequency desc, token asc),
/// capped so the vocabulary including specials has at most max_size entries.
Vocabulary build_vocab(std::span<const std::string> corpus, int min_freq, std::size_t max_size);

/// Half-open position range [begin, end).
struct Span {
  int begin = 0;
  int end = 0;

  int size() const { return end - begin; }
  bool empty() const { return end <= begin; }
  bool contains(int pos) const { return pos >= begin && pos < end; }
  bool operator==(const Span&) const = default;
};

/// [CLS] title [SEP] description [PAD...], fixed length.
struct InputSequence {
  std::vector<TokenId> ids;
  std::vector<int> segments;
  Span title_span;
  Span desc_span;
  int pad_len = 0;

  int max_len() const { return static_cast<int>(ids.size()); }
  int active_len() const { return max_len() - pad_len; }
};

inline constexpr int kDefaultTitleCap = 32;

InputSequence encode_pair(std::span<const std::string> title_tokens, std::span<const std::string> desc_tokens,
                          const Vocabulary& vocab, int max_len, int title_cap = kDefaultTitleCap);

struct MaskTarget {
  int position = 0;
  TokenId original = 0;
  bool operator==(const MaskTarget&) const = default;
};

struct MaskedSequence {
  InputSequence base;
  std::vector<MaskTarget> targets;
};

struct MaskingOptions {
  double rate = 0.15;
  double replace_with_mask = 0.8;
  double replace_with_random = 0.1;
};

/// Selects content positions with probability `rate` (at least one when
/// rate > 0) and applies the mask / random / keep replacement rule.
MaskedSequence apply_masking(const InputSequence& seq, const MaskingOptions& options, std::size_t vocab_size,
                             Rng& rng);

}  // namespace recobert
