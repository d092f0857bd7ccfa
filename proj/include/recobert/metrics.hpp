#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "recobert/catalog.hpp"
#include "recobert/ranker.hpp"

namespace recobert {

using Rankings = std::map<std::string, RankedList>;

/// Every metric averages over (seed, positive) pairs. Ranks are 1-based
/// positions in the seed's ranked list. Throws MissingRanking when an
/// annotated seed has no ranking or a positive is absent from it.
double hit_ratio_at_k(const Rankings& rankings, const AnnotationSet& annotations, int k);
double mean_reciprocal_rank(const Rankings& rankings, const AnnotationSet& annotations);
/// Mean of (N - rank) / (N - 1): 1 when positives rank first, 0 when last.
double mean_percentile_rank(const Rankings& rankings, const AnnotationSet& annotations);

enum class EvalMode { full, subset };

std::string to_string(EvalMode mode);
EvalMode parse_eval_mode(std::string_view text);

struct EvalReport {
  std::string name = "recobert";
  EvalMode mode = EvalMode::full;
  Lambdas lambdas;
  std::vector<int> ks;
  double mpr = 0.0;
  double mrr = 0.0;
  std::map<int, double> hr;
  std::size_t seeds = 0;
  std::size_t pairs = 0;
  std::map<std::string, std::size_t> pool_sizes;
  std::uint64_t checkpoint_fingerprint = 0;

  std::string to_json() const;
};

EvalReport report_from_rankings(const Rankings& rankings, const AnnotationSet& annotations, std::vector<int> ks);

/// Ranks every annotated seed under `lambdas` and computes all metrics. In
/// subset mode the pool is restricted to annotated items (seeds and positives).
EvalReport evaluate(const Ranker& ranker, const AnnotationSet& annotations, const Lambdas& lambdas,
                    std::vector<int> ks, EvalMode mode);

struct AblationConfig {
  std::string name;
  Lambdas lambdas;
};

/// Full inference plus the six zeroed-lambda variants.
std::vector<AblationConfig> ablation_grid();

/// Evaluates every ablation configuration, computing each seed's score table once.
std::vector<EvalReport> ablate(const Ranker& ranker, const AnnotationSet& annotations, std::vector<int> ks,
                               EvalMode mode);

/// Aligned text table: model, MPR, MRR, then HR@k with k descending.
std::string render_table(std::span<const EvalReport> reports);

}  // namespace recobert
