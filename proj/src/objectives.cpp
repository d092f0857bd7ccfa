#include "recobert/objectives.hpp"

#include <algorithm>
#include <cmath>

#include "recobert/error.hpp"
#include "recobert/parallel.hpp"

namespace recobert {

template <typename Real>
double cosine(const RowVector<Real>& a, const RowVector<Real>& b) {
  if (a.size() != b.size()) throw Error(ErrorKind::LengthMismatch, "cosine operands differ in length");
  const double na = a.template cast<double>().norm();
  const double nb = b.template cast<double>().norm();
  if (na < kZeroNorm || nb < kZeroNorm) throw Error(ErrorKind::ZeroVector, "cosine of a zero vector");
  const double c = a.template cast<double>().dot(b.template cast<double>()) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

template <typename Real>
double c_tdm(const RowVector<Real>& title, const RowVector<Real>& description) {
  return 0.5 * (1.0 + cosine(title, description));
}

template <typename Real>
double tdm_score(const Parameters<Real>& params, const EncoderConfig& config, const ItemEmbedding<Real>& f) {
  if (!config.tdm_projection) return c_tdm(f.title, f.description);
  const RowVector<Real> t = f.title * params.tdm_title_weight + params.tdm_title_bias.row(0);
  const RowVector<Real> d = f.description * params.tdm_desc_weight + params.tdm_desc_bias.row(0);
  return c_tdm(t, d);
}

double loss_tdm(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size() || scores.empty())
    throw Error(ErrorKind::LengthMismatch, std::to_string(scores.size()) + " scores, " +
                                               std::to_string(labels.size()) + " labels");
  double sum = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    const double s = std::clamp(scores[i], kProbabilityClamp, 1.0 - kProbabilityClamp);
    sum += labels[i] ? std::log(s) : std::log(1.0 - s);
  }
  return -sum / static_cast<double>(scores.size());
}

template <typename Real>
Matrix<Real> mlm_logits(const Matrix<Real>& states, std::span<const int> positions, const Parameters<Real>& params) {
  Matrix<Real> rows(static_cast<Eigen::Index>(positions.size()), states.cols());
  for (std::size_t i = 0; i < positions.size(); ++i) {
    const int p = positions[i];
    if (p < 0 || p >= states.rows()) throw Error(ErrorKind::PositionOutOfRange, std::to_string(p));
    rows.row(static_cast<Eigen::Index>(i)) = states.row(p);
  }
  Matrix<Real> logits;
  logits.noalias() = rows * params.token_embedding.transpose();
  logits.rowwise() += params.mlm_bias.row(0);
  return logits;
}

namespace {

/// Row-wise log-softmax, computed stably.
template <typename Real>
Matrix<Real> log_softmax(const Matrix<Real>& logits) {
  Matrix<Real> out(logits.rows(), logits.cols());
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    const Real m = logits.row(r).maxCoeff();
    const Real lse = m + std::log((logits.row(r).array() - m).exp().sum());
    out.row(r) = logits.row(r).array() - lse;
  }
  return out;
}

}  // namespace

template <typename Real>
double loss_mlm(const Matrix<Real>& logits, std::span<const TokenId> targets) {
  if (static_cast<std::size_t>(logits.rows()) != targets.size() || targets.empty())
    throw Error(ErrorKind::LengthMismatch, std::to_string(logits.rows()) + " logit rows, " +
                                               std::to_string(targets.size()) + " targets");
  const Matrix<Real> logp = log_softmax(logits);
  double sum = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    if (targets[i] < 0 || targets[i] >= logits.cols()) throw Error(ErrorKind::PositionOutOfRange, "target id");
    sum -= static_cast<double>(logp(static_cast<Eigen::Index>(i), targets[i]));
  }
  return sum / static_cast<double>(targets.size());
}

namespace {

struct ExampleLoss {
  double bce = 0.0;
  double ce_sum = 0.0;
};

template <typename Real>
ExampleLoss example_loss(const Parameters<Real>& params, const EncoderConfig& config, const TrainingExample& ex,
                         const LossOptions& options, double tdm_weight, double mlm_weight, Parameters<Real>* grads) {
  const InputSequence& seq = ex.sequence.base;
  Rng dropout_rng(ex.dropout_seed);
  const EncoderTrace<Real> trace =
      encode_sequence(params, config, seq, seq.active_len(), options.train_mode ? &dropout_rng : nullptr);
  const Matrix<Real>& states = trace.output;
  Matrix<Real> d_states;
  if (grads) d_states = Matrix<Real>::Zero(states.rows(), states.cols());

  ExampleLoss loss;
  if (options.objective == Objective::recobert) {
    const ItemEmbedding<Real> f = pool_features(states, seq);
    RowVector<Real> t = f.title, d = f.description;
    if (config.tdm_projection) {
      t = f.title * params.tdm_title_weight + params.tdm_title_bias.row(0);
      d = f.description * params.tdm_desc_weight + params.tdm_desc_bias.row(0);
    }
    const Real nt = t.norm(), nd = d.norm();
    if (nt < kZeroNorm || nd < kZeroNorm) throw Error(ErrorKind::ZeroVector, "pooled feature");
    const Real cos = t.dot(d) / (nt * nd);
    const Real s = (Real(1) + cos) / Real(2);
    const Real lo = static_cast<Real>(kProbabilityClamp), hi = Real(1) - lo;
    const Real sc = std::clamp(s, lo, hi);
    const int y = ex.label;
    loss.bce = -(y ? std::log(static_cast<double>(sc)) : std::log(1.0 - static_cast<double>(sc)));

    if (grads && s > lo && s < hi) {
      const Real ds = static_cast<Real>(tdm_weight) * (y ? -Real(1) / s : Real(1) / (Real(1) - s));
      const Real dcos = ds / Real(2);
      RowVector<Real> dt = dcos * (d / (nt * nd) - cos * t / (nt * nt));
      RowVector<Real> dd = dcos * (t / (nt * nd) - cos * d / (nd * nd));
      if (config.tdm_projection) {
        grads->tdm_title_weight.noalias() += f.title.transpose() * dt;
        grads->tdm_title_bias.row(0) += dt;
        grads->tdm_desc_weight.noalias() += f.description.transpose() * dd;
        grads->tdm_desc_bias.row(0) += dd;
        dt = (dt * params.tdm_title_weight.transpose()).eval();
        dd = (dd * params.tdm_desc_weight.transpose()).eval();
      }
      const Real inv_t = Real(1) / static_cast<Real>(seq.title_span.size());
      const Real inv_d = Real(1) / static_cast<Real>(seq.desc_span.size());
      for (int r = seq.title_span.begin; r < seq.title_span.end; ++r) d_states.row(r) += dt * inv_t;
      for (int r = seq.desc_span.begin; r < seq.desc_span.end; ++r) d_states.row(r) += dd * inv_d;
    }
  }

  const auto& targets = ex.sequence.targets;
  if (!targets.empty()) {
    std::vector<int> positions;
    positions.reserve(targets.size());
    for (const auto& t : targets) positions.push_back(t.position);
    const Matrix<Real> logits = mlm_logits(states, positions, params);
    const Matrix<Real> logp = log_softmax(logits);
    for (std::size_t i = 0; i < targets.size(); ++i)
      loss.ce_sum -= static_cast<double>(logp(static_cast<Eigen::Index>(i), targets[i].original));

    if (grads) {
      Matrix<Real> d_logits = logp.array().exp();
      for (std::size_t i = 0; i < targets.size(); ++i) d_logits(static_cast<Eigen::Index>(i), targets[i].original) -= Real(1);
      d_logits *= static_cast<Real>(mlm_weight);
      Matrix<Real> rows(static_cast<Eigen::Index>(positions.size()), states.cols());
      for (std::size_t i = 0; i < positions.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = states.row(positions[i]);
      grads->token_embedding.noalias() += d_logits.transpose() * rows;
      grads->mlm_bias.row(0) += d_logits.colwise().sum();
      const Matrix<Real> d_rows = d_logits * params.token_embedding;
      for (std::size_t i = 0; i < positions.size(); ++i) d_states.row(positions[i]) += d_rows.row(static_cast<Eigen::Index>(i));
    }
  }

  if (grads) backward_sequence(params, config, seq, trace, d_states, *grads);
  return loss;
}

}  // namespace

template <typename Real>
LossBreakdown total_loss_and_gradients(const Parameters<Real>& params, const EncoderConfig& config,
                                       std::span<const TrainingExample> batch, const LossOptions& options,
                                       Parameters<Real>* grads) {
  if (batch.empty()) throw Error(ErrorKind::InvalidArgument, "empty batch");
  std::size_t total_targets = 0;
  for (const auto& ex : batch) total_targets += ex.sequence.targets.size();

  const bool with_tdm = options.objective == Objective::recobert;
  const double tdm_weight = with_tdm ? 1.0 / static_cast<double>(batch.size()) : 0.0;
  const double mlm_weight = total_targets > 0 ? 1.0 / static_cast<double>(total_targets) : 0.0;

  std::vector<ExampleLoss> losses(batch.size());
  std::vector<Parameters<Real>> per_example;
  if (grads) per_example.assign(batch.size(), params.zeros_like());

  parallel_for(batch.size(), options.threads, [&](std::size_t i) {
    losses[i] = example_loss(params, config, batch[i], options, tdm_weight, mlm_weight,
                             grads ? &per_example[i] : nullptr);
  });

  LossBreakdown out;
  double bce = 0.0, ce = 0.0;
  for (const auto& l : losses) {
    bce += l.bce;
    ce += l.ce_sum;
  }
  out.l_tdm = with_tdm ? bce / static_cast<double>(batch.size()) : 0.0;
  out.l_mlm = total_targets > 0 ? ce / static_cast<double>(total_targets) : 0.0;
  out.l_total = out.l_tdm + out.l_mlm;

  if (grads) {
    *grads = std::move(per_example.front());
    auto dst = grads->tensors();
    for (std::size_t i = 1; i < per_example.size(); ++i) {
      auto src = per_example[i].tensors();
      for (std::size_t t = 0; t < dst.size(); ++t) *dst[t].value += *src[t].value;
    }
  }
  return out;
}

#define RECOBERT_INSTANTIATE(T)                                                                             \
  template double cosine<T>(const RowVector<T>&, const RowVector<T>&);                                      \
  template double c_tdm<T>(const RowVector<T>&, const RowVector<T>&);                                       \
  template double tdm_score<T>(const Parameters<T>&, const EncoderConfig&, const ItemEmbedding<T>&);        \
  template Matrix<T> mlm_logits<T>(const Matrix<T>&, std::span<const int>, const Parameters<T>&);           \
  template double loss_mlm<T>(const Matrix<T>&, std::span<const TokenId>);                                  \
  template LossBreakdown total_loss_and_gradients<T>(const Parameters<T>&, const EncoderConfig&,            \
                                                     std::span<const TrainingExample>, const LossOptions&, \
                                                     Parameters<T>*);

RECOBERT_INSTANTIATE(float)
RECOBERT_INSTANTIATE(double)
#undef RECOBERT_INSTANTIATE

}  // namespace recobert
