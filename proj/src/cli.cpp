#include "recobert/cli.hpp"

#include <algorithm>
#include <CLI11.hpp>
#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "recobert/catalog.hpp"
#include "recobert/encoder.hpp"
#include "recobert/error.hpp"
#include "recobert/io.hpp"
#include "recobert/metrics.hpp"
#include "recobert/parallel.hpp"
#include "recobert/ranker.hpp"
#include "recobert/synth.hpp"
#include "recobert/tokenizer.hpp"
#include "recobert/trainer.hpp"

namespace recobert::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

// Sub-seed tags; every random stream of a command derives from --seed.
constexpr std::uint64_t kSplitTag = 0x73706c6974000001ULL;
constexpr std::uint64_t kInitTag = 0x696e697400000002ULL;
constexpr std::uint64_t kTrainTag = 0x747261696e000003ULL;

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

/// Records what a command was run with; written as manifest.json in --out.
class Manifest {
 public:
  explicit Manifest(const CLI::App& command) : started_(utc_now()) {
    doc_["command"] = command.get_name();
    doc_["tool_version"] = kToolVersion;
    json flags = json::object();
    for (const CLI::Option* opt : command.get_options()) {
      if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
      const std::string name = opt->get_name();
      if (opt->count() > 0) {
        const auto& res = opt->results();
        flags[name] = res.size() == 1 ? json(res.front()) : json(res);
      } else {
        flags[name] = opt->get_default_str();
      }
    }
    doc_["flags"] = std::move(flags);
    doc_["inputs"] = json::object();
    doc_["seeds"] = json::object();
  }

  void input(const fs::path& path) { doc_["inputs"][path.string()] = hex64(hash_file(path)); }
  void seed(const std::string& name, std::uint64_t value) { doc_["seeds"][name] = value; }

  void write(const fs::path& dir) {
    doc_["started_at"] = started_;
    doc_["finished_at"] = utc_now();
    write_file(dir / "manifest.json", doc_.dump(2) + "\n");
  }

 private:
  json doc_;
  std::string started_;
};

std::vector<int> parse_ks(const std::string& text) {
  std::vector<int> ks;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      const int k = std::stoi(part);
      if (k < 1) throw std::invalid_argument(part);
      ks.push_back(k);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidArgument, "--ks entry '" + part + "' is not a positive integer");
    }
  }
  if (ks.empty()) throw Error(ErrorKind::InvalidArgument, "--ks is empty");
  return ks;
}

CatalogFormat parse_format(const std::string& f) { return f == "csv" ? CatalogFormat::csv : CatalogFormat::jsonl; }

fs::path vocab_path_for(const std::string& vocab_flag, const fs::path& checkpoint) {
  if (!vocab_flag.empty()) return vocab_flag;
  return checkpoint.parent_path() / "vocab.txt";
}

struct Options {
  std::string config;
  std::string catalog, format = "jsonl", annotations, checkpoint, vocab, store, out, csv;
  std::string objective = "recobert", mode = "full", lambda = "1,1,1,1", ks = "5,10,50,100,1000";
  std::vector<std::string> seed_ids;
  std::uint64_t seed = 0;
  int threads = default_threads();
  int steps = 2000, batch_size = 16, eval_every = 100, patience = 5, warmup = -1;
  double val_frac = 0.1, ps = 0.5, mask_rate = 0.15, lr = 3e-4, clip_norm = 0.0;
  int hidden = 64, layers = 2, heads = 4, ffn = 256, max_len = 256, title_cap = kDefaultTitleCap;
  double dropout = 0.1;
  bool tdm_projection = false, no_segments = false, skip_cross = false;
  int min_freq = 1;
  std::size_t max_size = 30000;
  std::size_t top = 10;
  int embed_batch = 16;
  SynthConfig synth;
  WineCsvColumns columns;
};

void add_common(CLI::App* cmd, Options& o, bool with_seed, bool out_required = true) {
  cmd->add_option("--config", o.config, "TOML file with the same keys as the flags; flags take precedence");
  auto* out = cmd->add_option("--out", o.out, "Output directory");
  if (out_required) out->required();
  cmd->add_option("--threads", o.threads, "Worker threads (results do not depend on this)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  if (with_seed) cmd->add_option("--seed", o.seed, "Base seed for every random stream")->capture_default_str();
}

Catalog load_catalog_flag(const Options& o, Manifest& manifest) {
  manifest.input(o.catalog);
  return load_catalog(o.catalog, parse_format(o.format));
}

struct LoadedModel {
  Checkpoint checkpoint;
  Vocabulary vocab;
  std::uint64_t fingerprint = 0;
};

LoadedModel load_model(const Options& o, Manifest& manifest) {
  const fs::path vocab_path = vocab_path_for(o.vocab, o.checkpoint);
  manifest.input(o.checkpoint);
  manifest.input(vocab_path);
  LoadedModel m;
  m.vocab = Vocabulary::load(vocab_path);
  const std::string bytes = read_file(o.checkpoint);
  m.fingerprint = fnv1a64(bytes);
  m.checkpoint = checkpoint_parse(bytes, m.vocab.hash());
  return m;
}

EmbeddingStore store_for(const Options& o, const LoadedModel& m, const Catalog& catalog, Manifest& manifest,
                         std::ostream& err) {
  if (!o.store.empty()) {
    manifest.input(o.store);
    EmbeddingStore store = EmbeddingStore::load(o.store);
    if (store.fingerprint != m.fingerprint)
      throw Error(ErrorKind::VocabMismatch, "embedding store fingerprint does not match checkpoint");
    return store;
  }
  EmbeddingStore store = embed_catalog(m.checkpoint.params, m.checkpoint.config, catalog, m.vocab, o.embed_batch,
                                       m.fingerprint, o.threads);
  for (const auto& s : store.skipped) err << "warning: skipped " << s << '\n';
  return store;
}

// ---------------------------------------------------------------- commands ---

void cmd_synth(const CLI::App& cmd, Options& o, std::ostream& out) {
  Manifest manifest(cmd);
  o.synth.seed = o.seed;
  manifest.seed("synth", o.seed);
  const SynthData data = generate_synthetic(o.synth);
  const fs::path dir = o.out;
  save_catalog_jsonl(data.catalog, dir / "catalog.jsonl");
  save_annotations_jsonl(data.annotations, dir / "annotations.jsonl");
  manifest.write(dir);
  out << "synth: " << data.catalog.size() << " items, " << data.annotations.entries.size() << " seeds, "
      << data.annotations.pair_count() << " pairs -> " << dir.string() << '\n';
}

void cmd_import_wines(const CLI::App& cmd, Options& o, std::ostream& out) {
  Manifest manifest(cmd);
  manifest.input(o.csv);
  const WineImport result = import_wine_csv(o.csv, o.columns);
  const fs::path dir = o.out;
  save_catalog_jsonl(result.catalog, dir / "catalog.jsonl");
  manifest.write(dir);
  out << "import-wines: " << result.rows << " rows, " << result.catalog.size() << " items, "
      << result.dropped_empty_description << " dropped (empty description), " << result.unreadable_rows
      << " unreadable\n";
}

std::vector<std::string> corpus_of(const Catalog& catalog) {
  std::vector<std::string> corpus;
  corpus.reserve(catalog.size() * 2);
  for (const auto& item : catalog.items()) {
    corpus.push_back(item.title);
    corpus.push_back(item.description);
  }
  return corpus;
}

void cmd_build_vocab(const CLI::App& cmd, Options& o, std::ostream& out) {
  Manifest manifest(cmd);
  const Catalog catalog = load_catalog_flag(o, manifest);
  const Vocabulary vocab = build_vocab(corpus_of(catalog), o.min_freq, o.max_size);
  const fs::path dir = o.out;
  vocab.save(dir / "vocab.txt");
  manifest.write(dir);
  out << "build-vocab: " << vocab.size() << " tokens (incl. specials), hash " << hex64(vocab.hash()) << '\n';
}

void cmd_train(const CLI::App& cmd, Options& o, std::ostream& out, std::ostream& err) {
  Manifest manifest(cmd);
  const fs::path dir = o.out;
  const Catalog catalog = load_catalog_flag(o, manifest);

  Vocabulary vocab;
  if (!o.vocab.empty()) {
    manifest.input(o.vocab);
    vocab = Vocabulary::load(o.vocab);
  } else {
    vocab = build_vocab(corpus_of(catalog), o.min_freq, o.max_size);
  }

  const std::uint64_t split_seed = derive_seed(o.seed, kSplitTag);
  const std::uint64_t init_seed = derive_seed(o.seed, kInitTag);
  const std::uint64_t train_seed = derive_seed(o.seed, kTrainTag);
  manifest.seed("base", o.seed);
  manifest.seed("split", split_seed);
  manifest.seed("init", init_seed);
  manifest.seed("train", train_seed);

  auto [train_catalog, val_catalog] = split_train_val(catalog, o.val_frac, split_seed);

  EncoderConfig model;
  model.vocab_size = static_cast<int>(vocab.size());
  model.max_len = o.max_len;
  model.hidden = o.hidden;
  model.layers = o.layers;
  model.heads = o.heads;
  model.ffn = o.ffn;
  model.dropout = o.dropout;
  model.segment_embeddings = !o.no_segments;
  model.tdm_projection = o.tdm_projection;
  model.title_cap = o.title_cap;
  model.validate();

  TrainerConfig cfg;
  cfg.p_s = o.ps;
  cfg.batch_size = o.batch_size;
  cfg.max_steps = o.steps;
  cfg.eval_every = o.eval_every;
  cfg.patience = o.patience;
  cfg.learning_rate = o.lr;
  cfg.warmup_steps = o.warmup;
  cfg.seed = train_seed;
  cfg.objective = o.objective == "mlm-only" ? Objective::mlm_only : Objective::recobert;
  cfg.masking.rate = o.mask_rate;
  cfg.clip_norm = o.clip_norm;
  cfg.threads = o.threads;

  const Model init = init_model<float>(model, init_seed);
  std::string history_log;
  const auto result = train(init, model, train_catalog, val_catalog, vocab, cfg, [&](const EvalRecord& r) {
    json line = {{"step", r.step},         {"train_loss", r.train_loss}, {"val_tdm", r.val.l_tdm},
                 {"val_mlm", r.val.l_mlm}, {"val_total", r.val.l_total}, {"best", r.best}};
    history_log += line.dump() + "\n";
    err << "step " << r.step << "  train " << r.train_loss << "  val " << r.val.l_total << " (tdm " << r.val.l_tdm
        << ", mlm " << r.val.l_mlm << ")" << (r.best ? "  *" : "") << '\n';
  });

  vocab.save(dir / "vocab.txt");
  json split = {{"train", json::array()}, {"val", json::array()}};
  for (const auto& item : train_catalog.items()) split["train"].push_back(item.id);
  for (const auto& item : val_catalog.items()) split["val"].push_back(item.id);
  write_file(dir / "split.json", split.dump() + "\n");
  checkpoint_save(result.best, model, vocab.hash(), dir / "checkpoint.best.rcbt");
  checkpoint_save(result.final, model, vocab.hash(), dir / "checkpoint.final.rcbt");
  write_file(dir / "history.jsonl", history_log);
  manifest.write(dir);
  out << "train: " << train_catalog.size() << " train / " << val_catalog.size() << " val items, best step "
      << result.history.best_step << ", stop: " << result.history.stop_reason << '\n';
}

void cmd_embed(const CLI::App& cmd, Options& o, std::ostream& out, std::ostream& err) {
  Manifest manifest(cmd);
  const LoadedModel m = load_model(o, manifest);
  const Catalog catalog = load_catalog_flag(o, manifest);
  const EmbeddingStore store = embed_catalog(m.checkpoint.params, m.checkpoint.config, catalog, m.vocab,
                                             o.embed_batch, m.fingerprint, o.threads);
  for (const auto& s : store.skipped) err << "warning: skipped " << s << '\n';
  const fs::path dir = o.out;
  store.save(dir / "embeddings.rcbe");
  manifest.write(dir);
  out << "embed: " << store.size() << " items, " << store.skipped.size() << " skipped\n";
}

void cmd_recommend(const CLI::App& cmd, Options& o, std::ostream& out, std::ostream& err) {
  Manifest manifest(cmd);
  const LoadedModel m = load_model(o, manifest);
  const Catalog catalog = load_catalog_flag(o, manifest);
  const EmbeddingStore store = store_for(o, m, catalog, manifest, err);
  const Ranker ranker(m.checkpoint.params, m.checkpoint.config, m.vocab, catalog, store, o.threads);
  const Lambdas lambdas = Lambdas::parse(o.lambda);

  std::vector<std::string> seeds = o.seed_ids;
  if (seeds.empty()) seeds = store.ids();
  std::string lines;
  for (const auto& seed : seeds) {
    const RankedList list = ranker.rank(seed, lambdas, o.skip_cross);
    if (o.top > list.entries.size())
      err << "note: " << seed << ": requested top " << o.top << ", returning " << list.entries.size() << '\n';
    lines += recommendation_json(list, o.top) + "\n";
  }
  const fs::path dir = o.out;
  write_file(dir / "recommendations.jsonl", lines);
  manifest.write(dir);
  out << "recommend: " << seeds.size() << " seed(s), " << ranker.cross_passes() << " cross passes\n";
}

void cmd_evaluate(const CLI::App& cmd, Options& o, std::ostream& out, std::ostream& err, bool ablation) {
  Manifest manifest(cmd);
  const LoadedModel m = load_model(o, manifest);
  const Catalog catalog = load_catalog_flag(o, manifest);
  manifest.input(o.annotations);
  const AnnotationSet annotations = load_annotations(o.annotations, catalog);
  for (const auto& w : annotations.warnings) err << "warning: " << w << '\n';
  const EmbeddingStore store = store_for(o, m, catalog, manifest, err);
  const Ranker ranker(m.checkpoint.params, m.checkpoint.config, m.vocab, catalog, store, o.threads);
  const EvalMode mode = parse_eval_mode(o.mode);
  const std::vector<int> ks = parse_ks(o.ks);

  std::vector<EvalReport> reports;
  if (ablation) {
    reports = ablate(ranker, annotations, ks, mode);
  } else {
    reports.push_back(evaluate(ranker, annotations, Lambdas::parse(o.lambda), ks, mode));
  }

  const fs::path dir = o.out;
  const std::string table = render_table(reports);
  if (ablation) {
    json all = json::array();
    for (const auto& r : reports) all.push_back(json::parse(r.to_json()));
    write_file(dir / "ablation.json", all.dump(2) + "\n");
    write_file(dir / "ablation.txt", table);
  } else {
    write_file(dir / "report.json", reports.front().to_json() + "\n");
    write_file(dir / "report.txt", table);
  }
  manifest.write(dir);
  out << table;
}

}  // namespace

/// Appends `--key value` for every config file entry whose flag is not on the
/// command line. Entries may sit at top level or under a [subcommand] table.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  if (args.empty()) return args;
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;
  if (!fs::exists(path)) throw Error(ErrorKind::Io, "config file not found: " + path);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigTOML().from_file(path);
  } catch (const CLI::ParseError& e) {
    throw Error(ErrorKind::InvalidArgument, "config file " + path + ": " + e.what());
  }
  auto given = [&](const std::string& flag) {
    for (const auto& a : args)
      if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    return false;
  };
  std::vector<std::string> extra;
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;
    if (!item.parents.empty() && item.parents != std::vector<std::string>{args[0]}) continue;
    std::string name = item.name;
    std::replace(name.begin(), name.end(), '_', '-');
    const std::string flag = "--" + name;
    if (flag == "--config" || given(flag)) continue;
    if (item.inputs.size() == 1 && item.inputs[0] == "false") continue;
    extra.push_back(flag);
    if (item.inputs.size() == 1 && item.inputs[0] == "true") continue;
    extra.insert(extra.end(), item.inputs.begin(), item.inputs.end());
  }
  args.insert(args.end(), extra.begin(), extra.end());
  return args;
}

int run(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  try {
    args = expand_config(raw_args);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_io() ? kExitIo : kExitValidation;
  }
  Options o;
  CLI::App app{"recobert: catalog-specialized text recommendations"};
  app.require_subcommand(1);

  auto* synth = app.add_subcommand("synth", "Generate a synthetic clustered catalog and annotations");
  add_common(synth, o, true);
  synth->add_option("--items", o.synth.items)->capture_default_str();
  synth->add_option("--clusters", o.synth.clusters)->capture_default_str();
  synth->add_option("--seeds-per-cluster", o.synth.seeds_per_cluster)->capture_default_str();

  auto* import = app.add_subcommand("import-wines", "Convert a wine review CSV into a catalog");
  add_common(import, o, false);
  import->add_option("--csv", o.csv)->required();
  import->add_option("--col-id", o.columns.id, "Id column (row index when absent)")->capture_default_str();
  import->add_option("--col-winery", o.columns.winery)->capture_default_str();
  import->add_option("--col-year", o.columns.year, "Year column (parsed from --col-title when absent)");
  import->add_option("--col-title", o.columns.source_title)->capture_default_str();
  import->add_option("--col-name", o.columns.name)->capture_default_str();
  import->add_option("--col-variety", o.columns.variety)->capture_default_str();
  import->add_option("--col-description", o.columns.description)->capture_default_str();

  auto add_catalog = [&](CLI::App* cmd) {
    cmd->add_option("--catalog", o.catalog, "Catalog file")->required();
    cmd->add_option("--format", o.format)->check(CLI::IsMember({"jsonl", "csv"}))->capture_default_str();
  };

  auto* vocab_cmd = app.add_subcommand("build-vocab", "Build a vocabulary from catalog text");
  add_common(vocab_cmd, o, false);
  add_catalog(vocab_cmd);
  vocab_cmd->add_option("--min-freq", o.min_freq)->check(CLI::PositiveNumber)->capture_default_str();
  vocab_cmd->add_option("--max-size", o.max_size)->capture_default_str();

  auto* train_cmd = app.add_subcommand("train", "Train a model (recobert or mlm-only specialist)");
  add_common(train_cmd, o, true);
  add_catalog(train_cmd);
  train_cmd->add_option("--vocab", o.vocab, "Vocabulary file (built from the catalog when absent)");
  train_cmd->add_option("--val-frac", o.val_frac)->capture_default_str();
  train_cmd->add_option("--steps", o.steps)->check(CLI::NonNegativeNumber)->capture_default_str();
  train_cmd->add_option("--batch-size", o.batch_size)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--ps", o.ps, "Description swap probability")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  train_cmd->add_option("--mask-rate", o.mask_rate)->check(CLI::Range(0.0, 1.0))->capture_default_str();
  train_cmd->add_option("--objective", o.objective)->check(CLI::IsMember({"recobert", "mlm-only"}))->capture_default_str();
  train_cmd->add_option("--lr", o.lr)->capture_default_str();
  train_cmd->add_option("--warmup", o.warmup, "Warmup steps (negative: 1% of --steps)")->capture_default_str();
  train_cmd->add_option("--eval-every", o.eval_every)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--patience", o.patience)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--hidden", o.hidden)->capture_default_str();
  train_cmd->add_option("--layers", o.layers)->capture_default_str();
  train_cmd->add_option("--heads", o.heads)->capture_default_str();
  train_cmd->add_option("--ffn", o.ffn)->capture_default_str();
  train_cmd->add_option("--max-len", o.max_len)->capture_default_str();
  train_cmd->add_option("--title-cap", o.title_cap)->capture_default_str();
  train_cmd->add_option("--dropout", o.dropout)->capture_default_str();
  train_cmd->add_option("--clip-norm", o.clip_norm, "Gradient norm clip (0 = off)")->capture_default_str();
  train_cmd->add_option("--min-freq", o.min_freq)->check(CLI::PositiveNumber)->capture_default_str();
  train_cmd->add_option("--max-size", o.max_size)->capture_default_str();
  train_cmd->add_flag("--tdm-projection", o.tdm_projection, "Learned projections before the cosine head");
  train_cmd->add_flag("--no-segments", o.no_segments, "Disable segment embeddings");

  auto add_model = [&](CLI::App* cmd) {
    cmd->add_option("--checkpoint", o.checkpoint)->required();
    cmd->add_option("--vocab", o.vocab, "Vocabulary (default: vocab.txt beside the checkpoint)");
    cmd->add_option("--batch-size", o.embed_batch, "Items per embedding batch")->check(CLI::PositiveNumber)->capture_default_str();
  };

  auto* embed = app.add_subcommand("embed", "Compute the embedding store for a catalog");
  add_common(embed, o, false);
  add_model(embed);
  add_catalog(embed);

  auto* recommend = app.add_subcommand("recommend", "Rank candidates for seed items");
  add_common(recommend, o, false);
  add_model(recommend);
  add_catalog(recommend);
  recommend->add_option("--store", o.store, "Precomputed embedding store");
  recommend->add_option("--seed-id", o.seed_ids, "Seed item id (repeatable; default: all items)");
  recommend->add_option("--top", o.top)->check(CLI::PositiveNumber)->capture_default_str();
  recommend->add_option("--lambda", o.lambda, "Four score weights")->capture_default_str();
  recommend->add_flag("--skip-cross", o.skip_cross, "Bi-encoder scores only");

  auto add_eval = [&](CLI::App* cmd) {
    add_common(cmd, o, false);
    add_model(cmd);
    add_catalog(cmd);
    cmd->add_option("--annotations", o.annotations)->required();
    cmd->add_option("--store", o.store, "Precomputed embedding store");
    cmd->add_option("--mode", o.mode)->check(CLI::IsMember({"full", "subset"}))->capture_default_str();
    cmd->add_option("--ks", o.ks, "Comma-separated hit-ratio cutoffs")->capture_default_str();
  };
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Ranking metrics against annotations");
  add_eval(evaluate_cmd);
  evaluate_cmd->add_option("--lambda", o.lambda, "Four score weights")->capture_default_str();
  auto* ablate_cmd = app.add_subcommand("ablate", "Evaluate the zeroed-lambda grid");
  add_eval(ablate_cmd);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg_out, msg_err;
    const int code = app.exit(e, msg_out, msg_err);
    out << msg_out.str();
    err << msg_err.str();
    if (code == 0) return kExitOk;
    if (dynamic_cast<const CLI::ValidationError*>(&e) || dynamic_cast<const CLI::ConversionError*>(&e))
      return kExitValidation;
    err << app.help();
    return kExitUsage;
  }

  try {
    if (synth->parsed()) cmd_synth(*synth, o, out);
    else if (import->parsed()) cmd_import_wines(*import, o, out);
    else if (vocab_cmd->parsed()) cmd_build_vocab(*vocab_cmd, o, out);
    else if (train_cmd->parsed()) cmd_train(*train_cmd, o, out, err);
    else if (embed->parsed()) cmd_embed(*embed, o, out, err);
    else if (recommend->parsed()) cmd_recommend(*recommend, o, out, err);
    else if (evaluate_cmd->parsed()) cmd_evaluate(*evaluate_cmd, o, out, err, false);
    else if (ablate_cmd->parsed()) cmd_evaluate(*ablate_cmd, o, out, err, true);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_io() ? kExitIo : kExitValidation;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace recobert::cli
