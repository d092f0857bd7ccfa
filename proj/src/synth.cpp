#include "recobert/synth.hpp"

#include <algorithm>
#include <set>

#include "recobert/error.hpp"
#include "recobert/random.hpp"

namespace recobert {
namespace {

constexpr std::uint64_t kSynthTag = 0x73796e7468657469ULL;

/// Unique pronounceable pseudo-words.
class WordFactory {
 public:
  explicit WordFactory(Rng& rng) : rng_(rng) {}

  std::string make(int syllables) {
    static constexpr const char* onsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "br", "dr", "gl", "kr", "pl", "st", "tr", "sh"};
    static constexpr const char* vowels[] = {"a", "e", "i", "o", "u", "ai", "ou", "ei"};
    static constexpr const char* codas[] = {"", "", "n", "r", "l", "s", "x", "m"};
    for (;;) {
      std::string w;
      for (int s = 0; s < syllables; ++s) {
        w += onsets[rng_.below(std::size(onsets))];
        w += vowels[rng_.below(std::size(vowels))];
      }
      w += codas[rng_.below(std::size(codas))];
      if (used_.insert(w).second) return w;
    }
  }

 private:
  Rng& rng_;
  std::set<std::string> used_;
};

struct Attribute {
  std::string name;
  std::vector<std::string> paraphrases;
};

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace

void SynthConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::InvalidArgument, "synth: " + why); };
  if (clusters < 1 || items < 2 * clusters) fail("need at least two items per cluster");
  if (description_attributes < 1 || description_attributes > attributes_per_cluster)
    fail("description_attributes must lie in [1, attributes_per_cluster]");
  if (title_attributes < 1 || title_attributes > description_attributes)
    fail("title_attributes must lie in [1, description_attributes]");
  if (paraphrases_per_attribute < 1 || brands < 1 || noise_words < 0) fail("bad vocabulary sizes");
  if (seeds_per_cluster < 1 || seeds_per_cluster > items / clusters) fail("seeds_per_cluster out of range");
}

SynthData generate_synthetic(const SynthConfig& config) {
  config.validate();
  Rng rng(derive_seed(config.seed, kSynthTag));
  WordFactory words(rng);

  std::vector<std::vector<Attribute>> attributes(config.clusters);
  for (auto& cluster : attributes) {
    cluster.resize(config.attributes_per_cluster);
    for (auto& a : cluster) {
      a.name = words.make(2);
      for (int p = 0; p < config.paraphrases_per_attribute; ++p) a.paraphrases.push_back(words.make(2));
    }
  }
  std::vector<std::string> brands, noise;
  for (int i = 0; i < config.brands; ++i) brands.push_back(words.make(3));
  for (int i = 0; i < 40; ++i) noise.push_back(words.make(2));
  static const std::vector<std::string> connectors = {"notes of", "hints of", "a touch of", "layers of",
                                                      "a core of", "shows",    "offers",     "with"};

  SynthData data;
  std::vector<CatalogItem> items;
  for (int i = 0; i < config.items; ++i) {
    const int c = i % config.clusters;
    data.cluster_of.push_back(c);
    std::vector<int> picks(config.attributes_per_cluster);
    for (int k = 0; k < config.attributes_per_cluster; ++k) picks[k] = k;
    shuffle(picks, rng);
    picks.resize(config.description_attributes);

    std::string title = brands[rng.below(brands.size())] + " " + std::to_string(1990 + rng.below(30));
    for (int k = 0; k < config.title_attributes; ++k) title += " " + attributes[c][picks[k]].name;

    std::vector<std::string> phrases;
    for (int k : picks) {
      const auto& a = attributes[c][k];
      phrases.push_back(connectors[rng.below(connectors.size())] + " " + a.paraphrases[rng.below(a.paraphrases.size())]);
    }
    for (int k = 0; k < config.noise_words; ++k) phrases.push_back(noise[rng.below(noise.size())]);
    shuffle(phrases, rng);
    std::string desc;
    for (std::size_t k = 0; k < phrases.size(); ++k) desc += (k ? ", " : "") + phrases[k];
    desc += ".";

    char id[16];
    std::snprintf(id, sizeof id, "s%03d", i);
    items.push_back({id, std::move(title), std::move(desc)});
  }
  data.catalog = Catalog(std::move(items));

  for (int c = 0; c < config.clusters; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < data.cluster_of.size(); ++i)
      if (data.cluster_of[i] == c) members.push_back(i);
    shuffle(members, rng);
    for (int s = 0; s < config.seeds_per_cluster; ++s) {
      auto& positives = data.annotations.entries[data.catalog[members[s]].id];
      for (std::size_t m : members)
        if (m != members[s]) positives.insert(data.catalog[m].id);
    }
  }
  return data;
}

}  // namespace recobert
