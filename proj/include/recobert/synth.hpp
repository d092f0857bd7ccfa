#pragma once

#include <cstdint>

#include "recobert/catalog.hpp"

namespace recobert {

/// Synthetic catalog with latent attribute clusters. Every cluster owns a set
/// of attributes; each attribute has a canonical name (used in titles) and
/// several paraphrase words (used in descriptions). Brands and filler words
/// are shared by all clusters.
struct SynthConfig {
  int items = 200;
  int clusters = 10;
  int attributes_per_cluster = 8;
  int paraphrases_per_attribute = 3;
  int title_attributes = 2;
  int description_attributes = 5;
  int noise_words = 3;
  int brands = 30;
  int seeds_per_cluster = 2;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SynthData {
  Catalog catalog;
  /// Positives of a seed: every other item of its cluster.
  AnnotationSet annotations;
  std::vector<int> cluster_of;  // per catalog item
};

SynthData generate_synthetic(const SynthConfig& config);

}  // namespace recobert
