#include "recobert/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numeric>
#include <sstream>

#include "recobert/error.hpp"
#include "recobert/io.hpp"
#include "recobert/objectives.hpp"
#include "recobert/parallel.hpp"

namespace recobert {

using json = nlohmann::ordered_json;

// ------------------------------------------------------------------ store ---

void EmbeddingStore::add(std::string id, Embedding embedding) {
  if (index_.contains(id)) throw Error(ErrorKind::DuplicateId, id);
  if (hidden == 0) hidden = static_cast<int>(embedding.title.size());
  if (embedding.title.size() != hidden || embedding.description.size() != hidden)
    throw Error(ErrorKind::ShapeMismatch, "embedding width for " + id);
  index_.emplace(id, ids_.size());
  ids_.push_back(std::move(id));
  embeddings_.push_back(std::move(embedding));
}

const Embedding& EmbeddingStore::at(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw Error(ErrorKind::UnknownId, id);
  return embeddings_[it->second];
}

namespace {
constexpr std::string_view kStoreMagic = "RCBE";
constexpr std::uint32_t kStoreVersion = 1;
}  // namespace

std::string EmbeddingStore::serialize() const {
  ByteWriter w;
  w.bytes(kStoreMagic);
  w.u32(kStoreVersion);
  w.u64(fingerprint);
  w.u32(static_cast<std::uint32_t>(hidden));
  w.u32(static_cast<std::uint32_t>(ids_.size()));
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    w.str(ids_[i]);
    for (float v : embeddings_[i].title) w.f32(v);
    for (float v : embeddings_[i].description) w.f32(v);
  }
  return w.data();
}

EmbeddingStore EmbeddingStore::parse(std::string_view bytes) {
  ByteReader r(bytes);
  std::string_view magic;
  if (!r.bytes(4, magic) || magic != kStoreMagic) throw Error(ErrorKind::BadMagic, "not an RCBE embedding store");
  std::uint32_t version = 0, hidden = 0, count = 0;
  EmbeddingStore store;
  if (!r.u32(version)) throw Error(ErrorKind::CorruptTensor, "store header");
  if (version != kStoreVersion) throw Error(ErrorKind::VersionUnsupported, std::to_string(version));
  if (!r.u64(store.fingerprint) || !r.u32(hidden) || !r.u32(count))
    throw Error(ErrorKind::CorruptTensor, "store header");
  store.hidden = static_cast<int>(hidden);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string id;
    if (!r.str(id)) throw Error(ErrorKind::CorruptTensor, "record " + std::to_string(i));
    Embedding e{RowVector<float>(hidden), RowVector<float>(hidden)};
    for (std::uint32_t k = 0; k < hidden; ++k)
      if (!r.f32(e.title(k))) throw Error(ErrorKind::CorruptTensor, id);
    for (std::uint32_t k = 0; k < hidden; ++k)
      if (!r.f32(e.description(k))) throw Error(ErrorKind::CorruptTensor, id);
    store.add(std::move(id), std::move(e));
  }
  if (r.remaining() != 0) throw Error(ErrorKind::CorruptTensor, "trailing bytes");
  return store;
}

void EmbeddingStore::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

EmbeddingStore EmbeddingStore::load(const std::filesystem::path& path) { return parse(read_file(path)); }

EmbeddingStore embed_catalog(const Model& params, const EncoderConfig& config, const Catalog& catalog,
                             const Vocabulary& vocab, int batch_size, std::uint64_t fingerprint, int threads) {
  if (batch_size < 1) throw Error(ErrorKind::InvalidArgument, "batch_size must be >= 1");
  const TokenizedCatalog tokens(catalog);
  std::vector<std::optional<Embedding>> out(catalog.size());
  std::vector<std::string> errors(catalog.size());

  for (std::size_t start = 0; start < catalog.size(); start += static_cast<std::size_t>(batch_size)) {
    const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(batch_size), catalog.size() - start);
    parallel_for(n, threads, [&](std::size_t k) {
      const std::size_t i = start + k;
      try {
        const InputSequence seq =
            encode_pair(tokens.titles[i], tokens.descriptions[i], vocab, config.max_len, config.title_cap);
        const auto trace = encode_sequence<float>(params, config, seq, seq.active_len(), nullptr);
        out[i] = pool_features<float>(trace.output, seq);
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    });
  }

  EmbeddingStore store;
  store.fingerprint = fingerprint;
  store.hidden = config.hidden;
  for (std::size_t i = 0; i < catalog.size(); ++i) {
    if (out[i])
      store.add(catalog[i].id, std::move(*out[i]));
    else
      store.skipped.push_back(catalog[i].id + ": " + errors[i]);
  }
  return store;
}

// ---------------------------------------------------------------- scoring ---

Lambdas Lambdas::parse(std::string_view text) {
  Lambdas l;
  std::stringstream ss{std::string(text)};
  std::string part;
  std::size_t i = 0;
  while (std::getline(ss, part, ',')) {
    if (i >= 4) throw Error(ErrorKind::InvalidArgument, "expected 4 lambda values");
    try {
      std::size_t used = 0;
      l.values[i] = std::stod(part, &used);
      if (used != part.size()) throw std::invalid_argument(part);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "lambda '" + part + "' is not a number");
    }
    if (!std::isfinite(l.values[i])) throw Error(ErrorKind::InvalidArgument, "lambda must be finite");
    ++i;
  }
  if (i != 4) throw Error(ErrorKind::InvalidArgument, "expected 4 lambda values");
  return l;
}

std::string Lambdas::to_string() const {
  std::ostringstream ss;
  for (std::size_t i = 0; i < 4; ++i) ss << (i ? "," : "") << values[i];
  return ss.str();
}

std::vector<std::string> RankedList::ids() const {
  std::vector<std::string> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.id);
  return out;
}

std::vector<double> znormalize(std::span<const double> column) {
  const std::size_t n = column.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  const double mean = std::accumulate(column.begin(), column.end(), 0.0) / static_cast<double>(n);
  double var = 0.0;
  for (double x : column) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));
  if (sd < 1e-12) return out;
  for (std::size_t i = 0; i < n; ++i) out[i] = (column[i] - mean) / sd;
  return out;
}

std::pair<std::vector<double>, std::vector<double>> base_scores(const Embedding& seed,
                                                                std::span<const Embedding* const> candidates) {
  std::vector<double> cos_d, cos_t;
  cos_d.reserve(candidates.size());
  cos_t.reserve(candidates.size());
  for (const Embedding* c : candidates) {
    cos_d.push_back(cosine<float>(seed.description, c->description));
    cos_t.push_back(cosine<float>(seed.title, c->title));
  }
  return {std::move(cos_d), std::move(cos_t)};
}

RankedList rank_table(const ScoreTable& table, const Lambdas& lambdas) {
  const std::size_t n = table.candidates.size();
  std::array<std::vector<double>, 4> norm;
  for (std::size_t c = 0; c < 4; ++c) {
    if (table.raw[c].size() != n) throw Error(ErrorKind::LengthMismatch, std::string("column ") + kColumnNames[c]);
    norm[c] = znormalize(table.raw[c]);
  }
  RankedList list;
  list.seed_id = table.seed_id;
  list.entries.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto& e = list.entries[i];
    e.id = table.candidates[i];
    for (std::size_t c = 0; c < 4; ++c) {
      e.raw[c] = table.raw[c][i];
      e.total += lambdas.values[c] * norm[c][i];
    }
  }
  std::sort(list.entries.begin(), list.entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
    if (a.total != b.total) return a.total > b.total;
    return a.id < b.id;
  });
  return list;
}

// ----------------------------------------------------------------- ranker ---

Ranker::Ranker(const Model& params, const EncoderConfig& config, const Vocabulary& vocab, const Catalog& catalog,
               const EmbeddingStore& store, int threads)
    : params_(params), config_(config), vocab_(vocab), catalog_(catalog), store_(store), tokens_(catalog),
      threads_(threads) {}

double Ranker::pair_score(std::size_t title_item, std::size_t desc_item) const {
  const InputSequence seq = encode_pair(tokens_.titles[title_item], tokens_.descriptions[desc_item], vocab_,
                                        config_.max_len, config_.title_cap);
  const auto trace = encode_sequence<float>(params_, config_, seq, seq.active_len(), nullptr);
  return tdm_score<float>(params_, config_, pool_features<float>(trace.output, seq));
}

std::pair<std::vector<double>, std::vector<double>> Ranker::cross_scores(
    std::size_t seed, std::span<const std::size_t> candidates) const {
  std::vector<double> seed_desc(candidates.size()), seed_title(candidates.size());
  parallel_for(candidates.size(), threads_, [&](std::size_t k) {
    const std::size_t m = candidates[k];
    seed_desc[k] = pair_score(m, seed);
    seed_title[k] = pair_score(seed, m);
    cross_passes_.fetch_add(2, std::memory_order_relaxed);
  });
  return {std::move(seed_desc), std::move(seed_title)};
}

ScoreTable Ranker::score(const std::string& seed_id, bool with_cross, const std::vector<std::string>* pool) const {
  const auto seed_pos = catalog_.find(seed_id);
  if (!seed_pos) throw Error(ErrorKind::UnknownSeed, seed_id);
  if (!store_.contains(seed_id)) throw Error(ErrorKind::UnknownSeed, seed_id + " (not in embedding store)");

  ScoreTable table;
  table.seed_id = seed_id;
  table.has_cross = with_cross;
  std::vector<std::size_t> positions;
  std::vector<const Embedding*> embeddings;
  auto consider = [&](const std::string& id) {
    if (id == seed_id || !store_.contains(id)) return;
    const auto pos = catalog_.find(id);
    if (!pos) throw Error(ErrorKind::UnknownId, id);
    table.candidates.push_back(id);
    positions.push_back(*pos);
    embeddings.push_back(&store_.at(id));
  };
  if (pool) {
    for (const auto& id : *pool) consider(id);
  } else {
    for (const auto& item : catalog_.items()) consider(item.id);
  }
  if (table.candidates.empty()) throw Error(ErrorKind::EmptyCandidates, seed_id);

  auto [cos_d, cos_t] = base_scores(store_.at(seed_id), embeddings);
  table.raw[kCosD] = std::move(cos_d);
  table.raw[kCosT] = std::move(cos_t);
  if (with_cross) {
    auto [sd, st] = cross_scores(*seed_pos, positions);
    table.raw[kTdmSeedDesc] = std::move(sd);
    table.raw[kTdmSeedTitle] = std::move(st);
  } else {
    table.raw[kTdmSeedDesc].assign(table.candidates.size(), 0.0);
    table.raw[kTdmSeedTitle].assign(table.candidates.size(), 0.0);
  }
  return table;
}

RankedList Ranker::rank(const std::string& seed_id, const Lambdas& lambdas, bool skip_cross,
                        const std::vector<std::string>* pool) const {
  return rank_table(score(seed_id, !skip_cross && lambdas.needs_cross(), pool), lambdas);
}

std::string recommendation_json(const RankedList& list, std::size_t top) {
  json ranked = json::array();
  const std::size_t n = std::min(top, list.entries.size());
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = list.entries[i];
    ranked.push_back({{"id", e.id},
                      {"total", e.total},
                      {"cos_d", e.raw[kCosD]},
                      {"cos_t", e.raw[kCosT]},
                      {"tdm_sd", e.raw[kTdmSeedDesc]},
                      {"tdm_st", e.raw[kTdmSeedTitle]}});
  }
  json line = {{"seed_id", list.seed_id}, {"ranked", std::move(ranked)}};
  if (top > list.entries.size())
    line["note"] = "requested top " + std::to_string(top) + ", pool has " + std::to_string(list.entries.size()) +
                   " candidates";
  return line.dump();
}

}  // namespace recobert
