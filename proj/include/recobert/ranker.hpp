#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "recobert/catalog.hpp"
#include "recobert/encoder.hpp"
#include "recobert/tokenizer.hpp"
#include "recobert/trainer.hpp"

namespace recobert {

using Embedding = ItemEmbedding<float>;

/// Title/description features for every item, tagged with the producing
/// checkpoint's fingerprint.
class EmbeddingStore {
 public:
  std::uint64_t fingerprint = 0;
  int hidden = 0;
  std::vector<std::string> skipped;  // items that failed to encode, with reason

  void add(std::string id, Embedding embedding);
  std::size_t size() const { return ids_.size(); }
  const std::vector<std::string>& ids() const { return ids_; }
  const Embedding& operator[](std::size_t i) const { return embeddings_[i]; }
  bool contains(const std::string& id) const { return index_.contains(id); }
  /// Throws UnknownId.
  const Embedding& at(const std::string& id) const;

  /// `RCBE` v1: fingerprint, hidden size, then (id, F_t, F_d) records as
  /// little-endian f32.
  std::string serialize() const;
  static EmbeddingStore parse(std::string_view bytes);
  void save(const std::filesystem::path& path) const;
  static EmbeddingStore load(const std::filesystem::path& path);

 private:
  std::vector<std::string> ids_;
  std::vector<Embedding> embeddings_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Unmasked forward pass and mean pooling for each item, `batch_size` items
/// at a time. Items that fail to encode are skipped and listed in `skipped`.
EmbeddingStore embed_catalog(const Model& params, const EncoderConfig& config, const Catalog& catalog,
                             const Vocabulary& vocab, int batch_size, std::uint64_t fingerprint, int threads = 1);

/// Score columns, in the order of the weighted sum.
enum Column : std::size_t { kCosD = 0, kCosT = 1, kTdmSeedDesc = 2, kTdmSeedTitle = 3 };
inline constexpr std::array<const char*, 4> kColumnNames = {"cos_d", "cos_t", "tdm_sd", "tdm_st"};

struct Lambdas {
  std::array<double, 4> values = {1.0, 1.0, 1.0, 1.0};

  bool needs_cross() const { return values[kTdmSeedDesc] != 0.0 || values[kTdmSeedTitle] != 0.0; }
  /// Parses "l1,l2,l3,l4".
  static Lambdas parse(std::string_view text);
  std::string to_string() const;
};

struct ScoreTable {
  std::string seed_id;
  std::vector<std::string> candidates;
  std::array<std::vector<double>, 4> raw;
  bool has_cross = false;
};

struct RankedEntry {
  std::string id;
  double total = 0.0;
  std::array<double, 4> raw{};
};

struct RankedList {
  std::string seed_id;
  std::vector<RankedEntry> entries;

  std::vector<std::string> ids() const;
};

/// Population z-score; zero-variance (std < 1e-12) and single-element
/// columns map to zeros.
std::vector<double> znormalize(std::span<const double> column);

/// (cos_d, cos_t) of the seed against each candidate. Throws ZeroVector.
std::pair<std::vector<double>, std::vector<double>> base_scores(const Embedding& seed,
                                                                std::span<const Embedding* const> candidates);

/// Sums the weighted normalized columns and sorts descending; ties break on
/// ascending id.
RankedList rank_table(const ScoreTable& table, const Lambdas& lambdas);

/// Item-to-item ranking over a catalog and its embedding store.
class Ranker {
 public:
  Ranker(const Model& params, const EncoderConfig& config, const Vocabulary& vocab, const Catalog& catalog,
         const EmbeddingStore& store, int threads = 1);

  /// Raw columns for `seed_id` against the candidate pool (the whole catalog,
  /// or `pool` when given), seed excluded. Cross columns are computed only
  /// when `with_cross`; otherwise they are zero.
  ScoreTable score(const std::string& seed_id, bool with_cross,
                   const std::vector<std::string>* pool = nullptr) const;

  RankedList rank(const std::string& seed_id, const Lambdas& lambdas, bool skip_cross = false,
                  const std::vector<std::string>* pool = nullptr) const;

  /// (C_TDM(B(t_m, d_s)), C_TDM(B(t_s, d_m))) for each candidate m.
  std::pair<std::vector<double>, std::vector<double>> cross_scores(std::size_t seed,
                                                                   std::span<const std::size_t> candidates) const;

  /// C_TDM of an unmasked (title of `title_item`, description of `desc_item`) pair.
  double pair_score(std::size_t title_item, std::size_t desc_item) const;

  std::uint64_t cross_passes() const { return cross_passes_.load(); }
  const Catalog& catalog() const { return catalog_; }
  const EmbeddingStore& store() const { return store_; }

 private:
  const Model& params_;
  const EncoderConfig& config_;
  const Vocabulary& vocab_;
  const Catalog& catalog_;
  const EmbeddingStore& store_;
  TokenizedCatalog tokens_;
  int threads_;
  mutable std::atomic<std::uint64_t> cross_passes_{0};
};

/// One JSONL line {seed_id, ranked: [...]} with at most `top` entries; a
/// `note` field records clamping when `top` exceeds the pool.
std::string recommendation_json(const RankedList& list, std::size_t top);

}  // namespace recobert
