#include "recobert/metrics.hpp"

#include <algorithm>
#include <iomanip>
#include <nlohmann/json.hpp>
#include <sstream>
#include <unordered_map>

#include "recobert/error.hpp"
#include "recobert/io.hpp"

namespace recobert {

using json = nlohmann::ordered_json;

namespace {

struct PairRank {
  std::size_t rank = 0;  // 1-based
  std::size_t pool = 0;
};

std::vector<PairRank> pair_ranks(const Rankings& rankings, const AnnotationSet& annotations) {
  std::vector<PairRank> out;
  for (const auto& [seed, positives] : annotations.entries) {
    auto it = rankings.find(seed);
    if (it == rankings.end()) throw Error(ErrorKind::MissingRanking, seed);
    std::unordered_map<std::string, std::size_t> position;
    const auto& entries = it->second.entries;
    for (std::size_t i = 0; i < entries.size(); ++i) position.emplace(entries[i].id, i + 1);
    for (const auto& pos : positives) {
      auto p = position.find(pos);
      if (p == position.end()) throw Error(ErrorKind::MissingRanking, seed + " -> " + pos);
      out.push_back({p->second, entries.size()});
    }
  }
  if (out.empty()) throw Error(ErrorKind::MissingRanking, "no annotated pairs");
  return out;
}

template <typename Fn>
double mean_over_pairs(const Rankings& rankings, const AnnotationSet& annotations, Fn&& fn) {
  const auto ranks = pair_ranks(rankings, annotations);
  double sum = 0.0;
  for (const auto& r : ranks) sum += fn(r);
  return sum / static_cast<double>(ranks.size());
}

}  // namespace

double hit_ratio_at_k(const Rankings& rankings, const AnnotationSet& annotations, int k) {
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
  return mean_over_pairs(rankings, annotations,
                         [k](const PairRank& r) { return r.rank <= static_cast<std::size_t>(k) ? 1.0 : 0.0; });
}

double mean_reciprocal_rank(const Rankings& rankings, const AnnotationSet& annotations) {
  return mean_over_pairs(rankings, annotations, [](const PairRank& r) { return 1.0 / static_cast<double>(r.rank); });
}

double mean_percentile_rank(const Rankings& rankings, const AnnotationSet& annotations) {
  return mean_over_pairs(rankings, annotations, [](const PairRank& r) {
    if (r.pool < 2) throw Error(ErrorKind::EmptyCandidates, "percentile rank needs a pool of >= 2");
    return static_cast<double>(r.pool - r.rank) / static_cast<double>(r.pool - 1);
  });
}

std::string to_string(EvalMode mode) { return mode == EvalMode::full ? "full-catalog" : "annotated-subset"; }

EvalMode parse_eval_mode(std::string_view text) {
  if (text == "full" || text == "full-catalog") return EvalMode::full;
  if (text == "subset" || text == "annotated-subset") return EvalMode::subset;
  throw Error(ErrorKind::InvalidArgument, "mode must be full or subset");
}

std::string EvalReport::to_json() const {
  json hr_json = json::object();
  for (const auto& [k, v] : hr) hr_json["hr@" + std::to_string(k)] = v;
  json j = {{"name", name},
            {"mode", recobert::to_string(mode)},
            {"lambdas", lambdas.values},
            {"ks", ks},
            {"metrics", {{"mpr", mpr}, {"mrr", mrr}, {"hr", hr_json}}},
            {"mpr_orientation", "(N - rank) / (N - 1); 1.0 = positives ranked first"},
            {"counts", {{"seeds", seeds}, {"pairs", pairs}, {"pool_size", pool_sizes}}},
            {"checkpoint_fingerprint", hex64(checkpoint_fingerprint)}};
  return j.dump(2);
}

EvalReport report_from_rankings(const Rankings& rankings, const AnnotationSet& annotations, std::vector<int> ks) {
  std::sort(ks.begin(), ks.end());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
  EvalReport report;
  report.ks = ks;
  report.mpr = mean_percentile_rank(rankings, annotations);
  report.mrr = mean_reciprocal_rank(rankings, annotations);
  for (int k : ks) report.hr[k] = hit_ratio_at_k(rankings, annotations, k);
  report.seeds = annotations.entries.size();
  report.pairs = annotations.pair_count();
  for (const auto& [seed, list] : rankings) report.pool_sizes[seed] = list.entries.size();
  return report;
}

namespace {

std::vector<std::string> subset_pool(const AnnotationSet& annotations) {
  const auto ids = annotations.item_ids();
  return {ids.begin(), ids.end()};
}

}  // namespace

EvalReport evaluate(const Ranker& ranker, const AnnotationSet& annotations, const Lambdas& lambdas,
                    std::vector<int> ks, EvalMode mode) {
  const std::vector<std::string> pool = subset_pool(annotations);
  Rankings rankings;
  for (const auto& [seed, positives] : annotations.entries)
    rankings.emplace(seed, ranker.rank(seed, lambdas, false, mode == EvalMode::subset ? &pool : nullptr));
  EvalReport report = report_from_rankings(rankings, annotations, std::move(ks));
  report.mode = mode;
  report.lambdas = lambdas;
  report.checkpoint_fingerprint = ranker.store().fingerprint;
  return report;
}

std::vector<AblationConfig> ablation_grid() {
  return {
      {"recobert(l3,l4=0)", {{1, 1, 0, 0}}}, {"recobert(l1,l2=0)", {{0, 0, 1, 1}}},
      {"recobert(l1=0)", {{0, 1, 1, 1}}},    {"recobert(l2=0)", {{1, 0, 1, 1}}},
      {"recobert(l3=0)", {{1, 1, 0, 1}}},    {"recobert(l4=0)", {{1, 1, 1, 0}}},
      {"recobert", {{1, 1, 1, 1}}},
  };
}

std::vector<EvalReport> ablate(const Ranker& ranker, const AnnotationSet& annotations, std::vector<int> ks,
                               EvalMode mode) {
  const std::vector<std::string> pool = subset_pool(annotations);
  std::vector<ScoreTable> tables;
  for (const auto& [seed, positives] : annotations.entries)
    tables.push_back(ranker.score(seed, true, mode == EvalMode::subset ? &pool : nullptr));

  std::vector<EvalReport> reports;
  for (const auto& config : ablation_grid()) {
    Rankings rankings;
    for (const auto& table : tables) rankings.emplace(table.seed_id, rank_table(table, config.lambdas));
    EvalReport report = report_from_rankings(rankings, annotations, ks);
    report.name = config.name;
    report.mode = mode;
    report.lambdas = config.lambdas;
    report.checkpoint_fingerprint = ranker.store().fingerprint;
    reports.push_back(std::move(report));
  }
  return reports;
}

std::string render_table(std::span<const EvalReport> reports) {
  std::vector<int> ks;
  for (const auto& r : reports)
    for (int k : r.ks) ks.push_back(k);
  std::sort(ks.begin(), ks.end(), std::greater<>());
  ks.erase(std::unique(ks.begin(), ks.end()), ks.end());

  std::size_t name_width = 5;
  for (const auto& r : reports) name_width = std::max(name_width, r.name.size());

  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(name_width)) << "model" << std::right;
  out << std::setw(9) << "MPR" << std::setw(9) << "MRR";
  for (int k : ks) out << std::setw(9) << ("HR@" + std::to_string(k));
  out << '\n';
  out << std::fixed << std::setprecision(1);
  for (const auto& r : reports) {
    out << std::left << std::setw(static_cast<int>(name_width)) << r.name << std::right;
    out << std::setw(8) << 100.0 * r.mpr << '%' << std::setw(8) << 100.0 * r.mrr << '%';
    for (int k : ks) {
      auto it = r.hr.find(k);
      if (it == r.hr.end())
        out << std::setw(9) << "-";
      else
        out << std::setw(8) << 100.0 * it->second << '%';
    }
    out << '\n';
  }
  out << "MPR = mean of (N - rank) / (N - 1); higher is better.\n";
  return out.str();
}

}  // namespace recobert
