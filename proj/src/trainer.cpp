#include "recobert/trainer.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "recobert/error.hpp"

namespace recobert {
namespace {

constexpr std::uint64_t kBatchTag = 0x62617463685f7267ULL;
constexpr std::uint64_t kValidationTag = 0x76616c6964617465ULL;

void check_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::InvalidArgument, std::string(name) + " must lie in [0,1]");
}

/// (description item, label) for title item `item`.
std::pair<std::size_t, int> draw_description(std::size_t item, std::size_t n, double p_s, Rng& rng) {
  if (n < 2) throw Error(ErrorKind::CatalogTooSmall, std::to_string(n) + " item(s)");
  if (!rng.bernoulli(p_s)) return {item, 1};
  std::size_t other = rng.below(n - 1);
  if (other >= item) ++other;
  return {other, 0};
}

TrainingExample make_example(const TokenizedCatalog& catalog, std::size_t title_item, std::size_t desc_item,
                             int label, const Vocabulary& vocab, const EncoderConfig& model,
                             const MaskingOptions& masking, Rng& rng) {
  const InputSequence seq =
      encode_pair(catalog.titles[title_item], catalog.descriptions[desc_item], vocab, model.max_len, model.title_cap);
  TrainingExample ex;
  ex.sequence = apply_masking(seq, masking, vocab.size(), rng);
  ex.label = label;
  ex.dropout_seed = rng.next();
  return ex;
}

bool finite(const LossBreakdown& l) {
  return std::isfinite(l.l_tdm) && std::isfinite(l.l_mlm) && std::isfinite(l.l_total);
}

}  // namespace

void TrainerConfig::validate() const {
  check_probability(p_s, "p_s");
  check_probability(masking.rate, "mask rate");
  if (batch_size < 1) throw Error(ErrorKind::InvalidArgument, "batch_size must be >= 1");
  if (patience < 1) throw Error(ErrorKind::InvalidArgument, "patience must be >= 1");
  if (max_steps < 0) throw Error(ErrorKind::InvalidArgument, "max_steps must be >= 0");
  if (eval_every < 1) throw Error(ErrorKind::InvalidArgument, "eval_every must be >= 1");
  if (!(learning_rate > 0.0)) throw Error(ErrorKind::InvalidArgument, "learning_rate must be positive");
}

int TrainerConfig::effective_warmup() const {
  if (warmup_steps >= 0) return warmup_steps;
  return std::max(1, max_steps / 100);
}

TokenizedCatalog::TokenizedCatalog(const Catalog& catalog) {
  ids.reserve(catalog.size());
  titles.reserve(catalog.size());
  descriptions.reserve(catalog.size());
  for (const auto& item : catalog.items()) {
    ids.push_back(item.id);
    titles.push_back(tokenize(item.title));
    descriptions.push_back(tokenize(item.description));
  }
}

TrainingPair make_training_pair(std::size_t item, const TokenizedCatalog& catalog, double p_s, Rng& rng) {
  check_probability(p_s, "p_s");
  const auto [desc, label] = draw_description(item, catalog.size(), p_s, rng);
  return {catalog.titles[item], catalog.descriptions[desc], label, item, desc};
}

TrainingPair make_training_pair(const CatalogItem& item, const Catalog& catalog, double p_s, Rng& rng) {
  check_probability(p_s, "p_s");
  const auto pos = catalog.find(item.id);
  if (!pos) throw Error(ErrorKind::UnknownId, item.id);
  const auto [desc, label] = draw_description(*pos, catalog.size(), p_s, rng);
  return {tokenize(item.title), tokenize(catalog[desc].description), label, *pos, desc};
}

template <typename Real>
void Adam<Real>::step(Parameters<Real>& params, const Parameters<Real>& grads, double learning_rate) {
  ++t_;
  const double b1 = config_.beta1, b2 = config_.beta2;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
  const Real step = static_cast<Real>(learning_rate / c1);
  const Real inv_c2 = static_cast<Real>(1.0 / c2);
  const Real eps = static_cast<Real>(config_.epsilon);

  auto p = params.tensors();
  auto g = grads.tensors();
  auto m = m_.tensors();
  auto v = v_.tensors();
  for (std::size_t i = 0; i < p.size(); ++i) {
    auto& mi = *m[i].value;
    auto& vi = *v[i].value;
    const auto& gi = *g[i].value;
    mi = static_cast<Real>(b1) * mi + static_cast<Real>(1.0 - b1) * gi;
    vi = static_cast<Real>(b2) * vi + static_cast<Real>(1.0 - b2) * gi.cwiseAbs2();
    p[i].value->array() -= step * mi.array() / ((vi.array() * inv_c2).sqrt() + eps);
  }
}

template class Adam<float>;
template class Adam<double>;

std::vector<TrainingExample> make_validation_examples(const TokenizedCatalog& val, const Vocabulary& vocab,
                                                      const EncoderConfig& model, const TrainerConfig& cfg) {
  Rng rng(derive_seed(cfg.seed, kValidationTag));
  const double p_s = (cfg.objective == Objective::mlm_only || val.size() < 2) ? 0.0 : 0.5;
  std::vector<TrainingExample> out;
  out.reserve(val.size());
  for (std::size_t i = 0; i < val.size(); ++i) {
    const auto [desc, label] = p_s > 0.0 ? draw_description(i, val.size(), p_s, rng) : std::pair<std::size_t, int>{i, 1};
    out.push_back(make_example(val, i, desc, label, vocab, model, cfg.masking, rng));
  }
  return out;
}

TrainResult train(const Model& init, const EncoderConfig& model, const Catalog& train_catalog,
                  const Catalog& val_catalog, const Vocabulary& vocab, const TrainerConfig& cfg,
                  const std::function<void(const EvalRecord&)>& on_eval) {
  cfg.validate();
  model.validate();
  if (static_cast<std::size_t>(model.vocab_size) != vocab.size())
    throw Error(ErrorKind::VocabMismatch, "model vocab_size " + std::to_string(model.vocab_size) +
                                              " vs vocabulary " + std::to_string(vocab.size()));
  if (val_catalog.empty()) throw Error(ErrorKind::CatalogTooSmall, "empty validation catalog");
  if (train_catalog.size() < 2) throw Error(ErrorKind::CatalogTooSmall, "training catalog needs >= 2 items");

  const TokenizedCatalog train_tok(train_catalog);
  const TokenizedCatalog val_tok(val_catalog);
  const std::vector<TrainingExample> val_examples = make_validation_examples(val_tok, vocab, model, cfg);
  const LossOptions val_options{cfg.objective, false, cfg.threads};
  const LossOptions train_options{cfg.objective, model.dropout > 0.0, cfg.threads};
  const double p_s = cfg.objective == Objective::mlm_only ? 0.0 : cfg.p_s;
  const int warmup = cfg.effective_warmup();

  TrainResult result{init, init, {}};
  Model& params = result.final;
  Adam<float> adam(params, cfg.adam);
  Rng rng(derive_seed(cfg.seed, kBatchTag));

  double best_val = std::numeric_limits<double>::infinity();
  double ema = std::numeric_limits<double>::quiet_NaN();
  int bad_evals = 0;

  auto evaluate = [&](int step) {
    EvalRecord rec;
    rec.step = step;
    rec.train_loss = ema;
    rec.val = total_loss_and_gradients<float>(params, model, val_examples, val_options, nullptr);
    if (!finite(rec.val)) throw Error(ErrorKind::NonFiniteLoss, "validation at step " + std::to_string(step));
    if (rec.val.l_total < best_val) {
      best_val = rec.val.l_total;
      rec.best = true;
      result.best = params;
      result.history.best_step = step;
      bad_evals = 0;
    } else {
      ++bad_evals;
    }
    result.history.records.push_back(rec);
    if (on_eval) on_eval(rec);
  };

  evaluate(0);
  result.history.stop_reason = "max_steps";
  Model grads = params.zeros_like();
  std::vector<TrainingExample> batch(cfg.batch_size);

  for (int step = 1; step <= cfg.max_steps; ++step) {
    for (auto& ex : batch) {
      const std::size_t item = rng.below(train_tok.size());
      const auto [desc, label] = draw_description(item, train_tok.size(), p_s, rng);
      ex = make_example(train_tok, item, desc, label, vocab, model, cfg.masking, rng);
    }
    const LossBreakdown loss = total_loss_and_gradients<float>(params, model, batch, train_options, &grads);
    if (!finite(loss) || !grads.all_finite()) {
      std::ostringstream msg;
      msg << "step " << step << ": l_tdm=" << loss.l_tdm << " l_mlm=" << loss.l_mlm << " non-finite grads in [";
      for (const auto& t : grads.tensors())
        if (!t.value->allFinite()) msg << ' ' << t.name;
      msg << " ]";
      throw Error(ErrorKind::NonFiniteLoss, msg.str());
    }
    if (cfg.clip_norm > 0.0) {
      double sq = 0.0;
      for (const auto& t : grads.tensors()) sq += t.value->template cast<double>().squaredNorm();
      const double norm = std::sqrt(sq);
      if (norm > cfg.clip_norm)
        for (auto& t : grads.tensors()) *t.value *= static_cast<float>(cfg.clip_norm / norm);
    }
    const double lr = step <= warmup ? cfg.learning_rate * step / warmup : cfg.learning_rate;
    adam.step(params, grads, lr);
    ema = std::isnan(ema) ? loss.l_total : 0.98 * ema + 0.02 * loss.l_total;

    if (step % cfg.eval_every == 0 || step == cfg.max_steps) {
      evaluate(step);
      if (bad_evals >= cfg.patience) {
        result.history.stop_reason = "early_stopping";
        break;
      }
    }
  }
  return result;
}

}  // namespace recobert
