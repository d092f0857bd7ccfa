#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>

#include "recobert/error.hpp"
#include "recobert/metrics.hpp"
#include "recobert/synth.hpp"

using namespace recobert;

namespace {

RankedList ranked(const std::string& seed, const std::vector<std::string>& ids) {
  RankedList r;
  r.seed_id = seed;
  double total = static_cast<double>(ids.size());
  for (const auto& id : ids) r.entries.push_back({id, total--, {}});
  return r;
}

AnnotationSet annotations(std::map<std::string, std::set<std::string>> entries) {
  AnnotationSet a;
  a.entries = std::move(entries);
  return a;
}

// Numbered candidates c1..cN with the given positives placed at `ranks` (1-based).
std::pair<Rankings, AnnotationSet> placed(const std::vector<std::vector<int>>& ranks_per_seed, int n) {
  Rankings r;
  AnnotationSet a;
  for (std::size_t s = 0; s < ranks_per_seed.size(); ++s) {
    const std::string seed = "s" + std::to_string(s);
    std::vector<std::string> ids;
    for (int i = 1; i <= n; ++i) ids.push_back("c" + std::to_string(i));
    r[seed] = ranked(seed, ids);
    for (int rank : ranks_per_seed[s]) a.entries[seed].insert("c" + std::to_string(rank));
  }
  return {r, a};
}

}  // namespace

TEST_CASE("hit ratio") {
  Rankings r = {{"s", ranked("s", {"a", "b", "c"})}};
  const AnnotationSet a = annotations({{"s", {"b"}}});
  CHECK(hit_ratio_at_k(r, a, 1) == 0.0);
  CHECK(hit_ratio_at_k(r, a, 2) == 1.0);
  CHECK(hit_ratio_at_k(r, a, 10) == 1.0);

  const auto [r2, a2] = placed({{1}, {1, 5}}, 6);
  CHECK(hit_ratio_at_k(r2, a2, 3) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("reciprocal rank") {
  const auto [r1, a1] = placed({{3}}, 5);
  CHECK(mean_reciprocal_rank(r1, a1) == doctest::Approx(1.0 / 3.0));
  const auto [r2, a2] = placed({{1}, {1}, {1}}, 5);
  CHECK(mean_reciprocal_rank(r2, a2) == 1.0);
  const auto [r3, a3] = placed({{1, 2}, {4}}, 5);
  CHECK(mean_reciprocal_rank(r3, a3) == doctest::Approx((1 + 0.5 + 0.25) / 3));
}

TEST_CASE("percentile rank") {
  CHECK(mean_percentile_rank(placed({{1}}, 100).first, placed({{1}}, 100).second) == 1.0);
  CHECK(mean_percentile_rank(placed({{100}}, 100).first, placed({{100}}, 100).second) == 0.0);
  CHECK(mean_percentile_rank(placed({{50}}, 100).first, placed({{50}}, 100).second) ==
        doctest::Approx(50.0 / 99.0));
}

TEST_CASE("missing rankings are reported") {
  Rankings r = {{"s", ranked("s", {"a", "b"})}};
  try {
    mean_reciprocal_rank(r, annotations({{"t", {"a"}}}));
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::MissingRanking);
  }
  CHECK_THROWS_AS(hit_ratio_at_k(r, annotations({{"s", {"zz"}}}), 1), Error);
}

TEST_CASE("metrics agree with brute-force enumeration") {
  Rng rng(77);
  for (int trial = 0; trial < 500; ++trial) {
    Rankings rankings;
    AnnotationSet ann;
    const int seeds = 1 + static_cast<int>(rng.below(3));
    double hr_num[9] = {};
    double rr = 0, pr = 0;
    int pairs = 0;
    for (int s = 0; s < seeds; ++s) {
      const std::string seed = "s" + std::to_string(s);
      const int n = 2 + static_cast<int>(rng.below(7));
      std::vector<std::string> ids;
      for (int i = 0; i < n; ++i) ids.push_back("c" + std::to_string(i));
      for (int i = n - 1; i > 0; --i) std::swap(ids[i], ids[rng.below(i + 1)]);
      rankings[seed] = ranked(seed, ids);
      const int npos = 1 + static_cast<int>(rng.below(std::min(3, n)));
      std::set<std::string> pos;
      while (static_cast<int>(pos.size()) < npos) pos.insert("c" + std::to_string(rng.below(n)));
      ann.entries[seed] = pos;
      for (const auto& p : pos) {
        int rank = 0;
        for (int i = 0; i < n; ++i)
          if (ids[i] == p) rank = i + 1;
        ++pairs;
        rr += 1.0 / rank;
        pr += static_cast<double>(n - rank) / (n - 1);
        for (int k = 1; k <= 8; ++k) hr_num[k] += rank <= k ? 1 : 0;
      }
    }
    CHECK(mean_reciprocal_rank(rankings, ann) == doctest::Approx(rr / pairs).epsilon(1e-14));
    CHECK(mean_percentile_rank(rankings, ann) == doctest::Approx(pr / pairs).epsilon(1e-14));
    for (int k = 1; k <= 8; ++k) CHECK(hit_ratio_at_k(rankings, ann, k) == hr_num[k] / pairs);
  }
}

TEST_CASE("random ranking control has MPR near one half") {
  Rng rng(5);
  double total = 0;
  double hr10 = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    std::vector<std::string> ids;
    for (int i = 0; i < 200; ++i) ids.push_back("c" + std::to_string(i));
    for (int i = 199; i > 0; --i) std::swap(ids[i], ids[rng.below(i + 1)]);
    const Rankings r = {{"s", ranked("s", ids)}};
    const AnnotationSet a = annotations({{"s", {"c0", "c1", "c2"}}});
    total += mean_percentile_rank(r, a);
    hr10 += hit_ratio_at_k(r, a, 10);
  }
  CHECK(std::abs(total / trials - 0.5) <= 0.05);
  CHECK(std::abs(hr10 / trials - 10.0 / 200.0) <= 0.02);
}

TEST_CASE("report keys and monotone hit ratios") {
  const auto [r, a] = placed({{2, 7}, {30, 60}}, 80);
  const EvalReport rep = report_from_rankings(r, a, {50, 5, 10});
  CHECK(rep.ks == std::vector<int>{5, 10, 50});
  CHECK(rep.hr.at(5) <= rep.hr.at(10));
  CHECK(rep.hr.at(10) <= rep.hr.at(50));
  CHECK(rep.pairs == 4);
  const auto j = nlohmann::ordered_json::parse(rep.to_json());
  std::vector<std::string> keys;
  for (const auto& [k, v] : j["metrics"]["hr"].items()) keys.push_back(k);
  CHECK(keys == std::vector<std::string>{"hr@5", "hr@10", "hr@50"});
  CHECK(j["mode"] == "full-catalog");
}

TEST_CASE("eval modes") {
  CHECK(parse_eval_mode("full") == EvalMode::full);
  CHECK(parse_eval_mode("subset") == EvalMode::subset);
  CHECK_THROWS_AS(parse_eval_mode("partial"), Error);
  CHECK(to_string(EvalMode::subset) == "annotated-subset");
}

TEST_CASE("ablation grid") {
  const auto grid = ablation_grid();
  REQUIRE(grid.size() == 7);
  CHECK(grid.back().name == "recobert");
  CHECK(grid.back().lambdas.values == std::array<double, 4>{1, 1, 1, 1});
  CHECK(grid[0].lambdas.values == std::array<double, 4>{1, 1, 0, 0});
  CHECK(grid[1].lambdas.values == std::array<double, 4>{0, 0, 1, 1});
  for (int i = 2; i < 6; ++i) {
    int zeros = 0;
    for (double x : grid[i].lambdas.values) zeros += x == 0.0;
    CHECK(zeros == 1);
    CHECK(grid[i].lambdas.values[i - 2] == 0.0);
  }
}

TEST_CASE("ablate matches evaluate per configuration") {
  SynthConfig sc;
  sc.items = 30;
  sc.clusters = 3;
  sc.seeds_per_cluster = 1;
  sc.seed = 2;
  const SynthData data = generate_synthetic(sc);
  std::vector<std::string> corpus;
  for (const auto& item : data.catalog.items()) {
    corpus.push_back(item.title);
    corpus.push_back(item.description);
  }
  const Vocabulary vocab = build_vocab(corpus, 1, 10000);
  EncoderConfig cfg;
  cfg.vocab_size = static_cast<int>(vocab.size());
  cfg.max_len = 32;
  cfg.hidden = 16;
  cfg.heads = 2;
  cfg.ffn = 32;
  cfg.layers = 1;
  const Model params = init_model<float>(cfg, 3);
  const EmbeddingStore store = embed_catalog(params, cfg, data.catalog, vocab, 8, 0);
  const Ranker ranker(params, cfg, vocab, data.catalog, store);

  const auto reports = ablate(ranker, data.annotations, {1, 5}, EvalMode::full);
  const auto grid = ablation_grid();
  REQUIRE(reports.size() == grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const EvalReport single = evaluate(ranker, data.annotations, grid[i].lambdas, {1, 5}, EvalMode::full);
    CHECK(reports[i].name == grid[i].name);
    CHECK(reports[i].mrr == single.mrr);
    CHECK(reports[i].mpr == single.mpr);
    CHECK(reports[i].hr == single.hr);
  }

  const AnnotationSet few = annotations({{data.catalog[0].id, {data.catalog[3].id, data.catalog[6].id}},
                                         {data.catalog[1].id, {data.catalog[4].id}}});
  const EvalReport subset = evaluate(ranker, few, Lambdas{}, {1}, EvalMode::subset);
  CHECK(subset.mode == EvalMode::subset);
  // annotated items are 0,1,3,4,6; the seed itself is never a candidate
  CHECK(subset.pool_sizes.at(data.catalog[0].id) == 4);
  CHECK(subset.pool_sizes.at(data.catalog[1].id) == 4);
  CHECK(evaluate(ranker, few, Lambdas{}, {1}, EvalMode::full).pool_sizes.at(data.catalog[1].id) == 29);

  const std::string table = render_table(reports);
  CHECK(table.find("recobert(l3,l4=0)") != std::string::npos);
  CHECK(table.find("HR@5") < table.find("HR@1 "));
}
