#include "recobert/tokenizer.hpp"

#include <algorithm>
#include <map>

#include "recobert/error.hpp"
#include "recobert/io.hpp"
#include "recobert/text.hpp"

namespace recobert {
namespace {

constexpr std::string_view kVocabHeader = "#recobert-vocab v1";

}  // namespace

Vocabulary::Vocabulary() : Vocabulary(std::vector<std::string>{}) {}

Vocabulary::Vocabulary(std::vector<std::string> tokens) {
  id_to_token_ = {"[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"};
  id_to_token_.insert(id_to_token_.end(), std::make_move_iterator(tokens.begin()),
                      std::make_move_iterator(tokens.end()));
  for (std::size_t i = 0; i < id_to_token_.size(); ++i) {
    const auto& tok = id_to_token_[i];
    if (i >= static_cast<std::size_t>(kNumSpecials) &&
        (tok.empty() || tok.find_first_of("\n\r") != std::string::npos))
      throw Error(ErrorKind::InvalidArgument, "vocabulary token at id " + std::to_string(i) + " is not a line");
    if (!token_to_id_.emplace(tok, static_cast<TokenId>(i)).second)
      throw Error(ErrorKind::InvalidArgument, "duplicate vocabulary token '" + tok + "'");
  }
}

TokenId Vocabulary::id(std::string_view token) const {
  auto it = token_to_id_.find(std::string(token));
  return it == token_to_id_.end() ? kUnk : it->second;
}

bool Vocabulary::contains(std::string_view token) const { return token_to_id_.contains(std::string(token)); }

std::string Vocabulary::serialize() const {
  std::string out(kVocabHeader);
  out += '\n';
  for (std::size_t i = kNumSpecials; i < id_to_token_.size(); ++i) {
    out += id_to_token_[i];
    out += '\n';
  }
  return out;
}

Vocabulary Vocabulary::parse(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t pos = 0;
  bool header = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    if (header) {
      if (line != kVocabHeader) throw Error(ErrorKind::BadMagic, "vocabulary header");
      header = false;
      continue;
    }
    tokens.emplace_back(line);
  }
  if (header) throw Error(ErrorKind::BadMagic, "vocabulary header");
  return Vocabulary(std::move(tokens));
}

void Vocabulary::save(const std::filesystem::path& path) const { write_file(path, serialize()); }

Vocabulary Vocabulary::load(const std::filesystem::path& path) { return parse(read_file(path)); }

std::uint64_t Vocabulary::hash() const { return fnv1a64(serialize()); }

std::vector<std::string> tokenize(std::string_view input) { return text::split_words(text::nfkc_lower(input)); }

Vocabulary build_vocab(std::span<const std::string> corpus, int min_freq, std::size_t max_size) {
  if (corpus.empty()) throw Error(ErrorKind::EmptyVocabulary, "empty corpus");
  std::map<std::string, std::size_t> counts;
  for (const auto& doc : corpus)
    for (auto& tok : tokenize(doc)) ++counts[std::move(tok)];

  std::vector<std::pair<std::string, std::size_t>> kept;
  for (auto& [tok, n] : counts)
    if (n >= static_cast<std::size_t>(std::max(min_freq, 1))) kept.emplace_back(tok, n);
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  const std::size_t cap = max_size > static_cast<std::size_t>(kNumSpecials) ? max_size - kNumSpecials : 0;
  if (kept.size() > cap) kept.resize(cap);
  if (kept.empty()) throw Error(ErrorKind::EmptyVocabulary, "no token reaches min_freq " + std::to_string(min_freq));

  std::vector<std::string> tokens;
  tokens.reserve(kept.size());
  for (auto& [tok, n] : kept) tokens.push_back(std::move(tok));
  return Vocabulary(std::move(tokens));
}

InputSequence encode_pair(std::span<const std::string> title_tokens, std::span<const std::string> desc_tokens,
                          const Vocabulary& vocab, int max_len, int title_cap) {
  if (max_len < 4) throw Error(ErrorKind::InvalidArgument, "max_len must be >= 4");
  if (title_tokens.empty()) throw Error(ErrorKind::EmptySide, "title");
  if (desc_tokens.empty()) throw Error(ErrorKind::EmptySide, "description");

  const int n_title = std::min({static_cast<int>(title_tokens.size()), std::max(title_cap, 1), max_len - 3});
  const int n_desc = std::min(static_cast<int>(desc_tokens.size()), max_len - 2 - n_title);

  InputSequence seq;
  seq.ids.assign(max_len, kPad);
  seq.segments.assign(max_len, 0);
  int pos = 0;
  seq.ids[pos++] = kCls;
  seq.title_span.begin = pos;
  for (int i = 0; i < n_title; ++i) seq.ids[pos++] = vocab.id(title_tokens[i]);
  seq.title_span.end = pos;
  seq.ids[pos++] = kSep;
  seq.desc_span.begin = pos;
  for (int i = 0; i < n_desc; ++i) {
    seq.segments[pos] = 1;
    seq.ids[pos++] = vocab.id(desc_tokens[i]);
  }
  seq.desc_span.end = pos;
  seq.pad_len = max_len - pos;
  return seq;
}

MaskedSequence apply_masking(const InputSequence& seq, const MaskingOptions& options, std::size_t vocab_size,
                             Rng& rng) {
  MaskedSequence out{seq, {}};
  if (options.rate <= 0.0) return out;

  std::vector<int> content;
  for (const Span& span : {seq.title_span, seq.desc_span})
    for (int p = span.begin; p < span.end; ++p) content.push_back(p);
  if (content.empty()) return out;

  std::vector<int> selected;
  for (int p : content)
    if (rng.bernoulli(options.rate)) selected.push_back(p);
  if (selected.empty()) selected.push_back(content[rng.below(content.size())]);

  const std::size_t n_regular = vocab_size > static_cast<std::size_t>(kNumSpecials) ? vocab_size - kNumSpecials : 0;
  for (int p : selected) {
    out.targets.push_back({p, seq.ids[p]});
    const double u = rng.uniform();
    if (u < options.replace_with_mask) {
      out.base.ids[p] = kMask;
    } else if (u < options.replace_with_mask + options.replace_with_random && n_regular > 0) {
      out.base.ids[p] = static_cast<TokenId>(kNumSpecials + rng.below(n_regular));
    }
  }
  return out;
}

}  // namespace recobert
