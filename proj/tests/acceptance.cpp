// Acceptance suite: one PASS/FAIL line per criterion.
//
//   acceptance --workdir DIR [--steps N] [--eval-every N] [--only 1,5,...]

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include "recobert/catalog.hpp"
#include "recobert/cli.hpp"
#include "recobert/io.hpp"
#include "recobert/metrics.hpp"
#include "recobert/objectives.hpp"
#include "recobert/ranker.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace recobert;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double x, int precision = 4) {
  std::ostringstream s;
  s << std::setprecision(precision) << x;
  return s.str();
}

// ------------------------------------------------------------ gradient check

std::vector<TrainingExample> random_batch(const Vocabulary& vocab, int max_len, int n, Rng& rng) {
  std::vector<std::string> words;
  for (std::size_t id = kNumSpecials; id < vocab.size(); ++id) words.push_back(vocab.token(static_cast<TokenId>(id)));
  std::vector<TrainingExample> batch;
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> title, desc;
    const int nt = 1 + static_cast<int>(rng.below(4));
    const int nd = 2 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_len - nt - 3)));
    for (int k = 0; k < nt; ++k) title.push_back(words[rng.below(words.size())]);
    for (int k = 0; k < nd; ++k) desc.push_back(words[rng.below(words.size())]);
    const InputSequence seq = encode_pair(title, desc, vocab, max_len);
    batch.push_back({apply_masking(seq, {}, vocab.size(), rng), i % 2, rng.next()});
  }
  return batch;
}

Vocabulary numbered_vocab(int size) {
  std::vector<std::string> words;
  for (int i = kNumSpecials; i < size; ++i) words.push_back("w" + std::to_string(i));
  return Vocabulary(words);
}

/// Worst per-tensor relative error: max |analytic - numeric| over the larger
/// of the two gradients' max magnitudes, every element probed, with and
/// without the tdm projection.
Outcome gradient_check() {
  const Vocabulary vocab = numbered_vocab(50);
  double worst = 0.0;
  std::string worst_name;
  std::size_t probed = 0;
  bool zero_ok = true;
  std::set<std::string> zero_tensors;
  for (bool projection : {false, true}) {
    EncoderConfig cfg;
    cfg.vocab_size = 50;
    cfg.max_len = 16;
    cfg.hidden = 16;
    cfg.layers = 2;
    cfg.heads = 2;
    cfg.ffn = 32;
    cfg.dropout = 0.0;
    cfg.tdm_projection = projection;
    Parameters<double> params = init_model<double>(cfg, 101);
    // move away from the symmetric init (unit gains, zero biases)
    Rng noise(202);
    for (auto& t : params.tensors())
      for (Eigen::Index i = 0; i < t.value->size(); ++i) t.value->data()[i] += 0.05 * noise.normal();

    Rng rng(303);
    const auto batch = random_batch(vocab, cfg.max_len, 4, rng);
    const LossOptions opts{Objective::recobert, false, 1};
    Parameters<double> grads = params.zeros_like();
    total_loss_and_gradients<double>(params, cfg, batch, opts, &grads);

    auto w = params.tensors();
    auto g = grads.tensors();
    const double step = 1e-5;
    for (std::size_t t = 0; t < w.size(); ++t) {
      double max_diff = 0.0, max_mag = 0.0;
      for (Eigen::Index i = 0; i < w[t].value->size(); ++i) {
        double& x = w[t].value->data()[i];
        const double saved = x;
        x = saved + step;
        const double up = total_loss_and_gradients<double>(params, cfg, batch, opts, nullptr).l_total;
        x = saved - step;
        const double down = total_loss_and_gradients<double>(params, cfg, batch, opts, nullptr).l_total;
        x = saved;
        const double numeric = (up - down) / (2 * step);
        const double analytic = g[t].value->data()[i];
        max_diff = std::max(max_diff, std::abs(numeric - analytic));
        max_mag = std::max({max_mag, std::abs(numeric), std::abs(analytic)});
        ++probed;
      }
      // the key bias has an identically zero gradient (softmax ignores a
      // per-row shift); such tensors are compared in absolute terms
      if (max_mag < 1e-12) {
        zero_ok &= max_diff < 1e-12;
        zero_tensors.insert(w[t].name);
        continue;
      }
      const double rel = max_diff / max_mag;
      if (rel > worst) {
        worst = rel;
        worst_name = w[t].name;
      }
    }
  }
  std::string zeros;
  for (const auto& name : zero_tensors) zeros += (zeros.empty() ? "" : ", ") + name;
  return {worst <= 1e-4 && zero_ok, "max relative error " + fmt(worst, 3) + " (" + worst_name + "), " +
                                        std::to_string(probed) + " entries; zero-gradient tensors: " + zeros};
}

// ----------------------------------------------------------- analytic losses

Outcome analytic_losses() {
  bool pass = true;
  std::ostringstream detail;

  // uniform logits from a zero hidden state and zero output bias
  EncoderConfig cfg;
  cfg.vocab_size = 1000;
  cfg.max_len = 32;
  cfg.hidden = 64;
  cfg.heads = 4;
  Parameters<double> params = init_model<double>(cfg, 7);
  params.mlm_bias.setZero();
  const Matrix<double> zero_states = Matrix<double>::Zero(cfg.max_len, cfg.hidden);
  const std::vector<int> positions = {1, 5, 9};
  const std::vector<TokenId> targets = {17, 400, 999};
  const double uniform = loss_mlm<double>(mlm_logits<double>(zero_states, positions, params), targets);
  const double uniform_err = std::abs(uniform - std::log(1000.0));
  pass &= uniform_err <= 1e-6;
  detail << "uniform " << fmt(uniform, 8) << " (err " << fmt(uniform_err, 2) << ")";

  // freshly initialized model on random sequences
  const Parameters<double> fresh = init_model<double>(cfg, 8);
  const Vocabulary vocab = numbered_vocab(1000);
  Rng rng(9);
  const auto batch = random_batch(vocab, cfg.max_len, 16, rng);
  const double init_mlm = total_loss_and_gradients<double>(fresh, cfg, batch, {Objective::mlm_only}, nullptr).l_mlm;
  const double init_ratio = init_mlm / std::log(1000.0);
  pass &= std::abs(init_ratio - 1.0) <= 0.15;
  detail << ", init " << fmt(init_mlm) << " (" << fmt(100 * (init_ratio - 1), 3) << "% off ln|V|)";

  const std::vector<double> half(64, 0.5);
  std::vector<int> labels(64);
  for (std::size_t i = 0; i < labels.size(); ++i) labels[i] = static_cast<int>(i % 3 == 0);
  const double tdm_err = std::abs(loss_tdm(half, labels) - std::log(2.0));
  pass &= tdm_err <= 1e-9;
  detail << ", tdm at 0.5 err " << fmt(tdm_err, 2);
  return {pass, detail.str()};
}

// --------------------------------------------------------- z-normalization

ScoreTable random_table(Rng& rng, int n) {
  ScoreTable t;
  t.seed_id = "seed";
  for (int i = 0; i < n; ++i) t.candidates.push_back("c" + std::to_string(i));
  for (auto& col : t.raw) {
    const double scale = 0.01 + rng.uniform();
    const double shift = rng.normal();
    for (int i = 0; i < n; ++i) col.push_back(shift + scale * rng.normal());
  }
  t.has_cross = true;
  return t;
}

Outcome znormalization() {
  Rng rng(41);
  double worst_mean = 0, worst_var = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const int n = 2 + static_cast<int>(rng.below(300));
    std::vector<double> col(n);
    const double scale = std::pow(10.0, 4 * rng.uniform() - 2);
    const double shift = 100 * rng.normal();
    for (auto& x : col) x = shift + scale * rng.normal();
    const auto z = znormalize(col);
    double mean = 0, var = 0;
    for (double x : z) mean += x;
    mean /= n;
    for (double x : z) var += (x - mean) * (x - mean);
    var /= n;
    worst_mean = std::max(worst_mean, std::abs(mean));
    worst_var = std::max(worst_var, std::abs(var - 1));
  }
  bool degenerate_ok = true;
  for (const auto& flat : {std::vector<double>{3, 3, 3, 3}, std::vector<double>{1.5}}) {
    for (double x : znormalize(flat)) degenerate_ok &= x == 0.0;
  }

  int identical = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const ScoreTable t = random_table(rng, 2 + static_cast<int>(rng.below(199)));
    ScoreTable u = t;
    const std::size_t col = rng.below(4);
    const double a = std::pow(10.0, 4 * rng.uniform() - 2);
    const double b = 50 * rng.normal();
    for (double& x : u.raw[col]) x = a * x + b;
    Lambdas l;
    for (auto& v : l.values) v = rng.uniform();
    identical += rank_table(t, l).ids() == rank_table(u, l).ids();
  }
  const bool pass = worst_mean <= 1e-9 && worst_var <= 1e-6 && degenerate_ok && identical == 100;
  return {pass, "max |mean| " + fmt(worst_mean, 2) + ", max |var-1| " + fmt(worst_var, 2) + ", affine " +
                    std::to_string(identical) + "/100 identical" + (degenerate_ok ? "" : ", degenerate columns wrong")};
}

// ---------------------------------------------------------- metric oracles

RankedList ranked_list(const std::string& seed, const std::vector<std::string>& ids) {
  RankedList r;
  r.seed_id = seed;
  for (std::size_t i = 0; i < ids.size(); ++i) r.entries.push_back({ids[i], -static_cast<double>(i), {}});
  return r;
}

Outcome metric_oracles() {
  Rng rng(53);
  int agree = 0;
  for (int trial = 0; trial < 500; ++trial) {
    Rankings rankings;
    AnnotationSet ann;
    // enumerate every (seed, positive) pair by scanning the ranked ids
    std::vector<std::pair<std::size_t, std::size_t>> pairs;  // (rank, pool)
    const int seeds = 1 + static_cast<int>(rng.below(3));
    for (int s = 0; s < seeds; ++s) {
      const std::string seed = "s" + std::to_string(s);
      const int n = 2 + static_cast<int>(rng.below(7));
      std::vector<std::string> ids;
      for (int i = 0; i < n; ++i) ids.push_back("c" + std::to_string(i));
      for (int i = n - 1; i > 0; --i) std::swap(ids[i], ids[rng.below(i + 1)]);
      rankings[seed] = ranked_list(seed, ids);
      std::set<std::string> pos;
      const int npos = 1 + static_cast<int>(rng.below(std::min(3, n)));
      while (static_cast<int>(pos.size()) < npos) pos.insert("c" + std::to_string(rng.below(n)));
      ann.entries[seed] = pos;
      for (const auto& p : pos)
        for (int i = 0; i < n; ++i)
          if (ids[i] == p) pairs.push_back({static_cast<std::size_t>(i + 1), static_cast<std::size_t>(n)});
    }
    double rr = 0, pr = 0;
    std::array<double, 9> hits{};
    for (const auto& [rank, pool] : pairs) {
      rr += 1.0 / static_cast<double>(rank);
      pr += static_cast<double>(pool - rank) / static_cast<double>(pool - 1);
      for (std::size_t k = 1; k <= 8; ++k) hits[k] += rank <= k ? 1.0 : 0.0;
    }
    const double count = static_cast<double>(pairs.size());
    bool same = mean_reciprocal_rank(rankings, ann) == rr / count && mean_percentile_rank(rankings, ann) == pr / count;
    for (int k = 1; k <= 8; ++k) same &= hit_ratio_at_k(rankings, ann, k) == hits[k] / count;
    agree += same;
  }

  // random scores through the real ranking path
  double mpr_total = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    ScoreTable t;
    t.seed_id = "s";
    for (int i = 0; i < 200; ++i) t.candidates.push_back("c" + std::to_string(i));
    for (auto& col : t.raw)
      for (int i = 0; i < 200; ++i) col.push_back(rng.uniform());
    const Rankings r = {{"s", rank_table(t, {})}};
    AnnotationSet a;
    while (a.entries["s"].size() < 3) a.entries["s"].insert("c" + std::to_string(rng.below(200)));
    mpr_total += mean_percentile_rank(r, a);
  }
  const double mpr = mpr_total / 1000;
  return {agree == 500 && std::abs(mpr - 0.5) <= 0.05,
          std::to_string(agree) + "/500 exact matches, random-control MPR " + fmt(mpr)};
}

// ------------------------------------------------------------ end to end

struct Pipeline {
  fs::path dir;
  bool ok = true;
  std::string failure;
  double train_seconds = 0;
  double total_seconds = 0;
};

struct E2EOptions {
  int steps = 8000;
  int eval_every = 250;
  int patience = 5;
  std::string lr = "3e-4";
};

bool run_cli(const std::vector<std::string>& args, Pipeline& p) {
  std::ostringstream out, err;
  if (cli::run(args, out, err) == 0) return true;
  p.ok = false;
  p.failure = args.front() + ": " + err.str();
  return false;
}

Pipeline run_pipeline(const fs::path& dir, const E2EOptions& opt) {
  Pipeline p;
  p.dir = dir;
  fs::remove_all(dir);
  const auto start = Clock::now();
  const std::string data = (dir / "data").string();
  const std::string catalog = data + "/catalog.jsonl";
  const std::string annotations = data + "/annotations.jsonl";
  if (!run_cli({"synth", "--out", data, "--items", "200", "--clusters", "10", "--seed", "1"}, p)) return p;

  const auto train_start = Clock::now();
  for (const std::string objective : {"recobert", "mlm-only"}) {
    const std::string out = (dir / objective).string();
    if (!run_cli({"train", "--catalog", catalog, "--out", out, "--objective", objective, "--steps",
                  std::to_string(opt.steps), "--eval-every", std::to_string(opt.eval_every), "--patience",
                  std::to_string(opt.patience), "--lr", opt.lr, "--layers", "2", "--hidden", "64", "--heads", "4",
                  "--max-len", "48", "--seed", "3", "--threads", "1"},
                 p))
      return p;
  }
  p.train_seconds = seconds_since(train_start);

  for (const std::string objective : {"recobert", "mlm-only"}) {
    const std::string model = (dir / objective).string();
    const std::string ckpt = model + "/checkpoint.best.rcbt";
    const std::string emb = model + "/embed";
    if (!run_cli({"embed", "--checkpoint", ckpt, "--catalog", catalog, "--out", emb, "--threads", "1"}, p)) return p;
    const std::string store = emb + "/embeddings.rcbe";
    const std::string lambda = objective == "recobert" ? "1,1,1,1" : "1,1,0,0";
    if (!run_cli({"evaluate", "--checkpoint", ckpt, "--catalog", catalog, "--annotations", annotations, "--store",
                  store, "--lambda", lambda, "--ks", "1,10,50", "--out", model + "/eval", "--threads", "1"},
                 p))
      return p;
    if (objective == "recobert" &&
        !run_cli({"ablate", "--checkpoint", ckpt, "--catalog", catalog, "--annotations", annotations, "--store",
                  store, "--ks", "1,10,50", "--out", model + "/ablate", "--threads", "1"},
                 p))
      return p;
  }
  p.total_seconds = seconds_since(start);
  return p;
}

json read_json(const fs::path& path) { return json::parse(read_file(path)); }

Outcome table1_direction(const Pipeline& p) {
  if (!p.ok) return {false, p.failure};
  const json rb = read_json(p.dir / "recobert" / "eval" / "report.json");
  const json mlm = read_json(p.dir / "mlm-only" / "eval" / "report.json");
  const double rb_mrr = rb["metrics"]["mrr"];
  const double mlm_mrr = mlm["metrics"]["mrr"];
  const double hr10 = rb["metrics"]["hr"]["hr@10"];
  const double random_hr10 = 10.0 / 199.0;
  const bool pass = rb_mrr > mlm_mrr && hr10 >= 2 * random_hr10;
  return {pass, "MRR recobert " + fmt(rb_mrr) + " vs specialist " + fmt(mlm_mrr) + "; HR@10 " + fmt(hr10) +
                    " vs 2x random " + fmt(2 * random_hr10) + "; pipeline " + fmt(p.total_seconds, 3) + " s"};
}

Outcome table3_direction(const Pipeline& p) {
  if (!p.ok) return {false, p.failure};
  const json reports = read_json(p.dir / "recobert" / "ablate" / "ablation.json");
  std::map<std::string, double> mrr;
  for (const auto& r : reports) mrr[r["name"]] = r["metrics"]["mrr"];
  const double full = mrr.at("recobert");
  bool pass = full >= mrr.at("recobert(l3,l4=0)");
  std::ostringstream detail;
  detail << "full " << fmt(full) << ", l3,l4=0 " << fmt(mrr.at("recobert(l3,l4=0)"));
  for (const char* name : {"recobert(l1=0)", "recobert(l2=0)", "recobert(l3=0)", "recobert(l4=0)"}) {
    pass &= mrr.at(name) <= full + 0.02;
    detail << ", " << std::string(name).substr(9, 4) << " " << fmt(mrr.at(name));
  }
  return {pass, detail.str()};
}

Outcome tdm_discrimination(const Pipeline& p) {
  if (!p.ok) return {false, p.failure};
  const fs::path model = p.dir / "recobert";
  const Catalog catalog = load_catalog(p.dir / "data" / "catalog.jsonl", CatalogFormat::jsonl);
  const Vocabulary vocab = Vocabulary::load(model / "vocab.txt");
  const Checkpoint ckpt = checkpoint_load(model / "checkpoint.best.rcbt", vocab.hash());
  const std::vector<std::string> val_list = read_json(model / "split.json")["val"];
  const std::set<std::string> val_ids(val_list.begin(), val_list.end());
  const Catalog held_out = catalog.subset(val_ids);
  const EmbeddingStore empty;
  const Ranker ranker(ckpt.params, ckpt.config, vocab, held_out, empty);
  std::vector<double> pos, neg;
  for (std::size_t t = 0; t < held_out.size(); ++t)
    for (std::size_t d = 0; d < held_out.size(); ++d) (t == d ? pos : neg).push_back(ranker.pair_score(t, d));
  double auc = 0;
  for (double a : pos)
    for (double b : neg) auc += a > b ? 1.0 : a == b ? 0.5 : 0.0;
  auc /= static_cast<double>(pos.size() * neg.size());
  const auto mean = [](const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); };
  const double gap = mean(pos) - mean(neg);
  return {gap >= 0.2 && auc >= 0.9, std::to_string(held_out.size()) + " held-out items: mean C_TDM positive " +
                                        fmt(mean(pos)) + ", negative " + fmt(mean(neg)) + ", gap " + fmt(gap) +
                                        ", AUC " + fmt(auc)};
}

Outcome determinism(const Pipeline& a, const Pipeline& b) {
  if (!a.ok) return {false, a.failure};
  if (!b.ok) return {false, b.failure};
  std::vector<std::string> files;
  for (const std::string model : {"recobert", "mlm-only"}) {
    for (const char* f : {"vocab.txt", "split.json", "history.jsonl", "checkpoint.best.rcbt", "checkpoint.final.rcbt",
                          "embed/embeddings.rcbe", "eval/report.json", "eval/report.txt"})
      files.push_back(model + "/" + f);
  }
  files.push_back("recobert/ablate/ablation.json");
  files.push_back("recobert/ablate/ablation.txt");
  files.push_back("data/catalog.jsonl");
  files.push_back("data/annotations.jsonl");
  std::vector<std::string> differing;
  for (const auto& f : files)
    if (!fs::exists(a.dir / f) || read_file(a.dir / f) != read_file(b.dir / f)) differing.push_back(f);
  std::string detail = std::to_string(files.size() - differing.size()) + "/" + std::to_string(files.size()) +
                       " artifacts bit-identical";
  for (const auto& f : differing) detail += "; differs: " + f;
  return {differing.empty(), detail};
}

Outcome inference_cost(const Pipeline& p) {
  if (!p.ok) return {false, p.failure};
  const fs::path model = p.dir / "recobert";
  const Catalog catalog = load_catalog(p.dir / "data" / "catalog.jsonl", CatalogFormat::jsonl);
  const Vocabulary vocab = Vocabulary::load(model / "vocab.txt");
  const Checkpoint ckpt = checkpoint_load(model / "checkpoint.best.rcbt", vocab.hash());
  const EmbeddingStore store = EmbeddingStore::load(model / "embed" / "embeddings.rcbe");
  const Ranker ranker(ckpt.params, ckpt.config, vocab, catalog, store, 1);
  const std::vector<std::string> seeds = {catalog[0].id, catalog[57].id, catalog[123].id};

  const Lambdas bi = Lambdas::parse("1,1,0,0");
  const int reps = 50;
  std::size_t candidates = 0;
  auto start = Clock::now();
  for (int r = 0; r < reps; ++r)
    for (const auto& s : seeds) candidates = ranker.rank(s, bi).entries.size();
  const double bi_seconds = seconds_since(start) / (reps * seeds.size());
  const std::uint64_t passes_after_bi = ranker.cross_passes();

  start = Clock::now();
  for (const auto& s : seeds) ranker.rank(s, Lambdas{});
  const double full_seconds = seconds_since(start) / seeds.size();
  const double speedup = full_seconds / bi_seconds;
  return {passes_after_bi == 0 && candidates == 199 && speedup >= 50,
          "cross passes with l3=l4=0: " + std::to_string(passes_after_bi) + "; per seed over " +
              std::to_string(candidates) + " candidates: bi-encoder " + fmt(bi_seconds * 1e3, 3) + " ms, full " +
              fmt(full_seconds * 1e3, 4) + " ms, speedup " + fmt(speedup, 4) + "x"};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recobert acceptance suite"};
  std::string workdir;
  E2EOptions opt;
  std::vector<int> only;
  app.add_option("--workdir", workdir, "Scratch directory for end-to-end runs")->required();
  app.add_option("--steps", opt.steps, "Training steps per model")->capture_default_str();
  app.add_option("--eval-every", opt.eval_every)->capture_default_str();
  app.add_option("--patience", opt.patience)->capture_default_str();
  app.add_option("--lr", opt.lr)->capture_default_str();
  app.add_option("--only", only, "Criteria to run (default: all)")->delimiter(',');
  CLI11_PARSE(app, argc, argv);

  const auto wanted = [&](int c) { return only.empty() || std::find(only.begin(), only.end(), c) != only.end(); };
  int failures = 0;
  const auto report = [&](int id, const std::string& name, const std::function<Outcome()>& fn) {
    if (!wanted(id)) return;
    const auto start = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << "criterion " << id << ": " << (o.pass ? "PASS" : "FAIL") << "  " << name << " -- " << o.detail
              << " [" << fmt(seconds_since(start), 3) << " s]" << std::endl;
  };

  report(1, "gradient check", gradient_check);
  report(2, "analytic loss values", analytic_losses);
  report(3, "z-normalization", znormalization);
  report(4, "metric oracle equivalence", metric_oracles);

  const bool needs_run = wanted(5) || wanted(6) || wanted(7) || wanted(8) || wanted(9);
  Pipeline first, second;
  if (needs_run) {
    first = run_pipeline(fs::path(workdir) / "run1", opt);
    std::cout << "end-to-end run 1: " << (first.ok ? "ok" : "failed") << ", training " << fmt(first.train_seconds, 4)
              << " s, total " << fmt(first.total_seconds, 4) << " s" << std::endl;
  }
  report(5, "synthetic ranking beats the specialist", [&] { return table1_direction(first); });
  report(6, "ablation ordering", [&] { return table3_direction(first); });
  report(7, "TDM discrimination on held-out pairs", [&] { return tdm_discrimination(first); });
  report(8, "determinism", [&] {
    second = run_pipeline(fs::path(workdir) / "run2", opt);
    return determinism(first, second);
  });
  report(9, "bi-encoder inference cost", [&] { return inference_cost(first); });

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
