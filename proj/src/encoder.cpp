#include "recobert/encoder.hpp"

#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>

#include "recobert/error.hpp"
#include "recobert/io.hpp"

namespace recobert {

using nlohmann::json;

// ---------------------------------------------------------------- config ---

void EncoderConfig::validate() const {
  auto fail = [](const std::string& why) { throw Error(ErrorKind::InvalidConfig, why); };
  if (vocab_size <= kNumSpecials) fail("vocab_size must exceed the special tokens");
  if (max_len < 4) fail("max_len must be >= 4");
  if (hidden < 1) fail("hidden must be positive");
  if (layers < 0) fail("layers must be >= 0");
  if (heads < 1) fail("heads must be positive");
  if (hidden % heads != 0) fail("h not divisible by A");
  if (ffn < hidden) fail("ffn must be >= hidden");
  if (!(dropout >= 0.0 && dropout < 1.0)) fail("dropout must lie in [0,1)");
  if (!(layer_norm_epsilon > 0.0)) fail("layer_norm_epsilon must be positive");
  if (title_cap < 1) fail("title_cap must be positive");
}

std::string EncoderConfig::to_json() const {
  json j = {{"vocab_size", vocab_size},
            {"max_len", max_len},
            {"hidden", hidden},
            {"layers", layers},
            {"heads", heads},
            {"ffn", ffn},
            {"dropout", dropout},
            {"layer_norm_epsilon", layer_norm_epsilon},
            {"segment_embeddings", segment_embeddings},
            {"tdm_projection", tdm_projection},
            {"title_cap", title_cap}};
  return j.dump();
}

EncoderConfig EncoderConfig::from_json(std::string_view text) {
  EncoderConfig c;
  try {
    const json j = json::parse(text);
    c.vocab_size = j.at("vocab_size").get<int>();
    c.max_len = j.at("max_len").get<int>();
    c.hidden = j.at("hidden").get<int>();
    c.layers = j.at("layers").get<int>();
    c.heads = j.at("heads").get<int>();
    c.ffn = j.at("ffn").get<int>();
    c.dropout = j.at("dropout").get<double>();
    c.layer_norm_epsilon = j.at("layer_norm_epsilon").get<double>();
    c.segment_embeddings = j.at("segment_embeddings").get<bool>();
    c.tdm_projection = j.at("tdm_projection").get<bool>();
    c.title_cap = j.at("title_cap").get<int>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, std::string("config block: ") + e.what());
  }
  c.validate();
  return c;
}

// ------------------------------------------------------------ parameters ---

namespace {

template <typename Self, typename Out>
void collect(Self& p, Out& out) {
  auto add = [&](std::string name, auto& m) {
    if (m.size() > 0) out.push_back({std::move(name), &m});
  };
  add("embeddings.token", p.token_embedding);
  add("embeddings.position", p.position_embedding);
  add("embeddings.segment", p.segment_embedding);
  add("embeddings.ln.gain", p.embedding_ln_gain);
  add("embeddings.ln.bias", p.embedding_ln_bias);
  for (std::size_t i = 0; i < p.layers.size(); ++i) {
    auto& l = p.layers[i];
    const std::string pre = "layer" + std::to_string(i) + ".";
    add(pre + "attention.query.weight", l.query_weight);
    add(pre + "attention.query.bias", l.query_bias);
    add(pre + "attention.key.weight", l.key_weight);
    add(pre + "attention.key.bias", l.key_bias);
    add(pre + "attention.value.weight", l.value_weight);
    add(pre + "attention.value.bias", l.value_bias);
    add(pre + "attention.output.weight", l.output_weight);
    add(pre + "attention.output.bias", l.output_bias);
    add(pre + "attention.ln.gain", l.attention_ln_gain);
    add(pre + "attention.ln.bias", l.attention_ln_bias);
    add(pre + "ffn.in.weight", l.ffn_in_weight);
    add(pre + "ffn.in.bias", l.ffn_in_bias);
    add(pre + "ffn.out.weight", l.ffn_out_weight);
    add(pre + "ffn.out.bias", l.ffn_out_bias);
    add(pre + "ffn.ln.gain", l.ffn_ln_gain);
    add(pre + "ffn.ln.bias", l.ffn_ln_bias);
  }
  add("mlm.bias", p.mlm_bias);
  add("tdm.title.weight", p.tdm_title_weight);
  add("tdm.title.bias", p.tdm_title_bias);
  add("tdm.description.weight", p.tdm_desc_weight);
  add("tdm.description.bias", p.tdm_desc_bias);
}

/// Zero-valued parameters with the shapes implied by `config`.
template <typename Real>
Parameters<Real> shaped(const EncoderConfig& c) {
  using M = Matrix<Real>;
  const int h = c.hidden;
  Parameters<Real> p;
  p.token_embedding = M::Zero(c.vocab_size, h);
  p.position_embedding = M::Zero(c.max_len, h);
  if (c.segment_embeddings) p.segment_embedding = M::Zero(2, h);
  p.embedding_ln_gain = M::Ones(1, h);
  p.embedding_ln_bias = M::Zero(1, h);
  p.layers.resize(c.layers);
  for (auto& l : p.layers) {
    l.query_weight = M::Zero(h, h);
    l.query_bias = M::Zero(1, h);
    l.key_weight = M::Zero(h, h);
    l.key_bias = M::Zero(1, h);
    l.value_weight = M::Zero(h, h);
    l.value_bias = M::Zero(1, h);
    l.output_weight = M::Zero(h, h);
    l.output_bias = M::Zero(1, h);
    l.attention_ln_gain = M::Ones(1, h);
    l.attention_ln_bias = M::Zero(1, h);
    l.ffn_in_weight = M::Zero(h, c.ffn);
    l.ffn_in_bias = M::Zero(1, c.ffn);
    l.ffn_out_weight = M::Zero(c.ffn, h);
    l.ffn_out_bias = M::Zero(1, h);
    l.ffn_ln_gain = M::Ones(1, h);
    l.ffn_ln_bias = M::Zero(1, h);
  }
  p.mlm_bias = M::Zero(1, c.vocab_size);
  if (c.tdm_projection) {
    p.tdm_title_weight = M::Zero(h, h);
    p.tdm_title_bias = M::Zero(1, h);
    p.tdm_desc_weight = M::Zero(h, h);
    p.tdm_desc_bias = M::Zero(1, h);
  }
  return p;
}

bool is_weight(const std::string& name) {
  return name.ends_with(".weight") || name.starts_with("embeddings.token") ||
         name.starts_with("embeddings.position") || name.starts_with("embeddings.segment");
}

}  // namespace

template <typename Real>
std::vector<NamedTensor<Real>> Parameters<Real>::tensors() {
  std::vector<NamedTensor<Real>> out;
  collect(*this, out);
  return out;
}

template <typename Real>
std::vector<ConstNamedTensor<Real>> Parameters<Real>::tensors() const {
  std::vector<ConstNamedTensor<Real>> out;
  collect(*this, out);
  return out;
}

template <typename Real>
Parameters<Real> Parameters<Real>::zeros_like() const {
  Parameters<Real> z = *this;
  for (auto& t : z.tensors()) t.value->setZero();
  return z;
}

template <typename Real>
std::size_t Parameters<Real>::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors()) n += static_cast<std::size_t>(t.value->size());
  return n;
}

template <typename Real>
bool Parameters<Real>::all_finite() const {
  for (const auto& t : tensors())
    if (!t.value->allFinite()) return false;
  return true;
}

template <typename Real>
template <typename Other>
Parameters<Other> Parameters<Real>::cast() const {
  Parameters<Other> out;
  auto conv = [](const Matrix<Real>& m) { return Matrix<Other>(m.template cast<Other>()); };
  out.token_embedding = conv(token_embedding);
  out.position_embedding = conv(position_embedding);
  out.segment_embedding = conv(segment_embedding);
  out.embedding_ln_gain = conv(embedding_ln_gain);
  out.embedding_ln_bias = conv(embedding_ln_bias);
  for (const auto& l : layers) {
    LayerParameters<Other> o;
    o.query_weight = conv(l.query_weight);
    o.query_bias = conv(l.query_bias);
    o.key_weight = conv(l.key_weight);
    o.key_bias = conv(l.key_bias);
    o.value_weight = conv(l.value_weight);
    o.value_bias = conv(l.value_bias);
    o.output_weight = conv(l.output_weight);
    o.output_bias = conv(l.output_bias);
    o.attention_ln_gain = conv(l.attention_ln_gain);
    o.attention_ln_bias = conv(l.attention_ln_bias);
    o.ffn_in_weight = conv(l.ffn_in_weight);
    o.ffn_in_bias = conv(l.ffn_in_bias);
    o.ffn_out_weight = conv(l.ffn_out_weight);
    o.ffn_out_bias = conv(l.ffn_out_bias);
    o.ffn_ln_gain = conv(l.ffn_ln_gain);
    o.ffn_ln_bias = conv(l.ffn_ln_bias);
    out.layers.push_back(std::move(o));
  }
  out.mlm_bias = conv(mlm_bias);
  out.tdm_title_weight = conv(tdm_title_weight);
  out.tdm_title_bias = conv(tdm_title_bias);
  out.tdm_desc_weight = conv(tdm_desc_weight);
  out.tdm_desc_bias = conv(tdm_desc_bias);
  return out;
}

template <typename Real>
Parameters<Real> init_model(const EncoderConfig& config, std::uint64_t seed) {
  config.validate();
  Parameters<Real> p = shaped<Real>(config);
  Rng rng(seed);
  for (auto& t : p.tensors()) {
    if (!is_weight(t.name)) continue;
    Matrix<Real>& m = *t.value;
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<Real>(rng.truncated_normal(0.02));
  }
  return p;
}

// --------------------------------------------------------------- forward ---

namespace {

template <typename Real>
void layer_norm(const Matrix<Real>& x, const Matrix<Real>& gain, const Matrix<Real>& bias, Real eps,
                Matrix<Real>& xhat, RowVector<Real>& inv_std, Matrix<Real>& out) {
  const auto rows = x.rows();
  const auto h = x.cols();
  xhat.resize(rows, h);
  inv_std.resize(rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Real mean = x.row(r).mean();
    const auto centered = (x.row(r).array() - mean).eval();
    const Real var = centered.square().sum() / static_cast<Real>(h);
    const Real inv = Real(1) / std::sqrt(var + eps);
    inv_std(r) = inv;
    xhat.row(r) = centered * inv;
  }
  out = (xhat.array().rowwise() * gain.row(0).array()).rowwise() + bias.row(0).array();
}

template <typename Real>
Matrix<Real> layer_norm_backward(const Matrix<Real>& d_out, const Matrix<Real>& xhat, const RowVector<Real>& inv_std,
                                 const Matrix<Real>& gain, Matrix<Real>& d_gain, Matrix<Real>& d_bias) {
  d_gain.row(0) += (d_out.array() * xhat.array()).colwise().sum().matrix();
  d_bias.row(0) += d_out.colwise().sum();
  const Matrix<Real> d_xhat = d_out.array().rowwise() * gain.row(0).array();
  const Real h = static_cast<Real>(xhat.cols());
  Matrix<Real> dx(d_out.rows(), d_out.cols());
  for (Eigen::Index r = 0; r < d_out.rows(); ++r) {
    const Real sum_d = d_xhat.row(r).sum();
    const Real sum_dx = d_xhat.row(r).dot(xhat.row(r));
    dx.row(r) = (inv_std(r) / h) * (h * d_xhat.row(r).array() - sum_d - xhat.row(r).array() * sum_dx);
  }
  return dx;
}

template <typename Real>
Real gelu(Real x) {
  return Real(0.5) * x * (Real(1) + std::erf(x * Real(std::numbers::sqrt2 / 2)));
}

template <typename Real>
Real gelu_grad(Real x) {
  const Real cdf = Real(0.5) * (Real(1) + std::erf(x * Real(std::numbers::sqrt2 / 2)));
  const Real pdf = std::exp(Real(-0.5) * x * x) * Real(std::numbers::inv_sqrtpi / std::numbers::sqrt2);
  return cdf + x * pdf;
}

/// Inverted-dropout mask; empty when dropout is inactive.
template <typename Real>
Matrix<Real> dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate, Rng* rng) {
  if (rng == nullptr || rate <= 0.0) return {};
  Matrix<Real> mask(rows, cols);
  const Real keep_scale = static_cast<Real>(1.0 / (1.0 - rate));
  for (Eigen::Index i = 0; i < mask.size(); ++i) mask.data()[i] = rng->bernoulli(rate) ? Real(0) : keep_scale;
  return mask;
}

template <typename Real>
void apply_mask(Matrix<Real>& x, const Matrix<Real>& mask) {
  if (mask.size() > 0) x.array() *= mask.array();
}

}  // namespace

template <typename Real>
EncoderTrace<Real> encode_sequence(const Parameters<Real>& params, const EncoderConfig& config,
                                   const InputSequence& seq, int rows, Rng* dropout_rng) {
  if (seq.max_len() != config.max_len || static_cast<int>(seq.segments.size()) != config.max_len)
    throw Error(ErrorKind::ShapeMismatch, "sequence length " + std::to_string(seq.max_len()) + " != max_len " +
                                              std::to_string(config.max_len));
  if (rows < 1 || rows > config.max_len) throw Error(ErrorKind::ShapeMismatch, "row count out of range");

  const int h = config.hidden;
  const int heads = config.heads;
  const int head_dim = h / heads;
  const Real eps = static_cast<Real>(config.layer_norm_epsilon);
  const Real scale = Real(1) / std::sqrt(static_cast<Real>(head_dim));

  EncoderTrace<Real> trace;
  trace.rows = rows;
  trace.keys = std::max(1, std::min(rows, seq.active_len()));
  const int keys = trace.keys;

  Matrix<Real> x(rows, h);
  for (int r = 0; r < rows; ++r) {
    const TokenId id = seq.ids[r];
    if (id < 0 || id >= config.vocab_size) throw Error(ErrorKind::ShapeMismatch, "token id out of vocabulary");
    x.row(r) = params.token_embedding.row(id) + params.position_embedding.row(r);
    if (config.segment_embeddings) x.row(r) += params.segment_embedding.row(seq.segments[r] == 1 ? 1 : 0);
  }
  Matrix<Real> hidden;
  layer_norm<Real>(x, params.embedding_ln_gain, params.embedding_ln_bias, eps, trace.embedding_xhat,
                   trace.embedding_inv_std, hidden);
  trace.embedding_dropout = dropout_mask<Real>(rows, h, config.dropout, dropout_rng);
  apply_mask(hidden, trace.embedding_dropout);

  trace.layers.resize(params.layers.size());
  for (std::size_t li = 0; li < params.layers.size(); ++li) {
    const auto& lp = params.layers[li];
    auto& lt = trace.layers[li];
    lt.input = std::move(hidden);
    const Matrix<Real>& in = lt.input;

    lt.query.noalias() = in * lp.query_weight;
    lt.query.rowwise() += lp.query_bias.row(0);
    lt.key.noalias() = in.topRows(keys) * lp.key_weight;
    lt.key.rowwise() += lp.key_bias.row(0);
    lt.value.noalias() = in.topRows(keys) * lp.value_weight;
    lt.value.rowwise() += lp.value_bias.row(0);

    lt.context.resize(rows, h);
    lt.probs.resize(heads);
    for (int a = 0; a < heads; ++a) {
      const int c0 = a * head_dim;
      Matrix<Real>& p = lt.probs[a];
      p.noalias() = lt.query.middleCols(c0, head_dim) * lt.key.middleCols(c0, head_dim).transpose();
      p *= scale;
      for (int r = 0; r < rows; ++r) {
        const Real m = p.row(r).maxCoeff();
        p.row(r) = (p.row(r).array() - m).exp();
        p.row(r) /= p.row(r).sum();
      }
      lt.context.middleCols(c0, head_dim).noalias() = p * lt.value.middleCols(c0, head_dim);
    }

    Matrix<Real> attn;
    attn.noalias() = lt.context * lp.output_weight;
    attn.rowwise() += lp.output_bias.row(0);
    lt.attention_dropout = dropout_mask<Real>(rows, h, config.dropout, dropout_rng);
    apply_mask(attn, lt.attention_dropout);
    attn += in;
    layer_norm<Real>(attn, lp.attention_ln_gain, lp.attention_ln_bias, eps, lt.ln1_xhat, lt.ln1_inv_std, lt.ln1_out);

    lt.ffn_pre.noalias() = lt.ln1_out * lp.ffn_in_weight;
    lt.ffn_pre.rowwise() += lp.ffn_in_bias.row(0);
    lt.ffn_act = lt.ffn_pre.unaryExpr([](Real v) { return gelu(v); });
    Matrix<Real> ffn;
    ffn.noalias() = lt.ffn_act * lp.ffn_out_weight;
    ffn.rowwise() += lp.ffn_out_bias.row(0);
    lt.ffn_dropout = dropout_mask<Real>(rows, h, config.dropout, dropout_rng);
    apply_mask(ffn, lt.ffn_dropout);
    ffn += lt.ln1_out;
    layer_norm<Real>(ffn, lp.ffn_ln_gain, lp.ffn_ln_bias, eps, lt.ln2_xhat, lt.ln2_inv_std, hidden);
  }
  trace.output = std::move(hidden);
  return trace;
}

template <typename Real>
void backward_sequence(const Parameters<Real>& params, const EncoderConfig& config, const InputSequence& seq,
                       const EncoderTrace<Real>& trace, const Matrix<Real>& d_output, Parameters<Real>& grads) {
  const int rows = trace.rows;
  const int keys = trace.keys;
  const int heads = config.heads;
  const int head_dim = config.hidden / heads;
  const Real scale = Real(1) / std::sqrt(static_cast<Real>(head_dim));

  Matrix<Real> d_hidden = d_output;
  for (int li = static_cast<int>(params.layers.size()) - 1; li >= 0; --li) {
    const auto& lp = params.layers[li];
    const auto& lt = trace.layers[li];
    auto& lg = grads.layers[li];

    // feed-forward sublayer
    Matrix<Real> d_z2 = layer_norm_backward<Real>(d_hidden, lt.ln2_xhat, lt.ln2_inv_std, lp.ffn_ln_gain,
                                                  lg.ffn_ln_gain, lg.ffn_ln_bias);
    Matrix<Real> d_ln1 = d_z2;
    Matrix<Real> d_ffn = std::move(d_z2);
    apply_mask(d_ffn, lt.ffn_dropout);
    lg.ffn_out_weight.noalias() += lt.ffn_act.transpose() * d_ffn;
    lg.ffn_out_bias.row(0) += d_ffn.colwise().sum();
    Matrix<Real> d_pre;
    d_pre.noalias() = d_ffn * lp.ffn_out_weight.transpose();
    d_pre.array() *= lt.ffn_pre.unaryExpr([](Real v) { return gelu_grad(v); }).array();
    lg.ffn_in_weight.noalias() += lt.ln1_out.transpose() * d_pre;
    lg.ffn_in_bias.row(0) += d_pre.colwise().sum();
    d_ln1.noalias() += d_pre * lp.ffn_in_weight.transpose();

    // attention sublayer
    Matrix<Real> d_z1 = layer_norm_backward<Real>(d_ln1, lt.ln1_xhat, lt.ln1_inv_std, lp.attention_ln_gain,
                                                  lg.attention_ln_gain, lg.attention_ln_bias);
    Matrix<Real> d_in = d_z1;
    Matrix<Real> d_attn = std::move(d_z1);
    apply_mask(d_attn, lt.attention_dropout);
    lg.output_weight.noalias() += lt.context.transpose() * d_attn;
    lg.output_bias.row(0) += d_attn.colwise().sum();
    Matrix<Real> d_context;
    d_context.noalias() = d_attn * lp.output_weight.transpose();

    Matrix<Real> d_query(rows, config.hidden);
    Matrix<Real> d_key(keys, config.hidden);
    Matrix<Real> d_value(keys, config.hidden);
    for (int a = 0; a < heads; ++a) {
      const int c0 = a * head_dim;
      const Matrix<Real>& p = lt.probs[a];
      const auto d_ctx = d_context.middleCols(c0, head_dim);
      d_value.middleCols(c0, head_dim).noalias() = p.transpose() * d_ctx;
      Matrix<Real> d_scores;
      d_scores.noalias() = d_ctx * lt.value.middleCols(c0, head_dim).transpose();
      for (int r = 0; r < rows; ++r) {
        const Real dot = d_scores.row(r).dot(p.row(r));
        d_scores.row(r) = p.row(r).array() * (d_scores.row(r).array() - dot);
      }
      d_scores *= scale;
      d_query.middleCols(c0, head_dim).noalias() = d_scores * lt.key.middleCols(c0, head_dim);
      d_key.middleCols(c0, head_dim).noalias() = d_scores.transpose() * lt.query.middleCols(c0, head_dim);
    }
    lg.query_weight.noalias() += lt.input.transpose() * d_query;
    lg.query_bias.row(0) += d_query.colwise().sum();
    lg.key_weight.noalias() += lt.input.topRows(keys).transpose() * d_key;
    lg.key_bias.row(0) += d_key.colwise().sum();
    lg.value_weight.noalias() += lt.input.topRows(keys).transpose() * d_value;
    lg.value_bias.row(0) += d_value.colwise().sum();
    d_in.noalias() += d_query * lp.query_weight.transpose();
    d_in.topRows(keys).noalias() += d_key * lp.key_weight.transpose();
    d_in.topRows(keys).noalias() += d_value * lp.value_weight.transpose();
    d_hidden = std::move(d_in);
  }

  apply_mask(d_hidden, trace.embedding_dropout);
  const Matrix<Real> d_x = layer_norm_backward<Real>(d_hidden, trace.embedding_xhat, trace.embedding_inv_std,
                                                     params.embedding_ln_gain, grads.embedding_ln_gain,
                                                     grads.embedding_ln_bias);
  for (int r = 0; r < rows; ++r) {
    grads.token_embedding.row(seq.ids[r]) += d_x.row(r);
    grads.position_embedding.row(r) += d_x.row(r);
    if (config.segment_embeddings) grads.segment_embedding.row(seq.segments[r] == 1 ? 1 : 0) += d_x.row(r);
  }
}

template <typename Real>
std::vector<Matrix<Real>> forward(const Parameters<Real>& params, const EncoderConfig& config,
                                  std::span<const InputSequence> batch, bool train_mode, Rng* rng) {
  if (train_mode && rng == nullptr) throw Error(ErrorKind::InvalidArgument, "train_mode forward needs an rng");
  std::vector<Matrix<Real>> out;
  out.reserve(batch.size());
  for (const auto& seq : batch)
    out.push_back(encode_sequence(params, config, seq, config.max_len, train_mode ? rng : nullptr).output);
  return out;
}

template <typename Real>
ItemEmbedding<Real> pool_features(const Matrix<Real>& states, const InputSequence& seq) {
  if (seq.title_span.empty()) throw Error(ErrorKind::EmptySpan, "title");
  if (seq.desc_span.empty()) throw Error(ErrorKind::EmptySpan, "description");
  if (seq.title_span.end > states.rows() || seq.desc_span.end > states.rows())
    throw Error(ErrorKind::ShapeMismatch, "span beyond hidden states");
  ItemEmbedding<Real> e;
  e.title = states.middleRows(seq.title_span.begin, seq.title_span.size()).colwise().mean();
  e.description = states.middleRows(seq.desc_span.begin, seq.desc_span.size()).colwise().mean();
  return e;
}

// ------------------------------------------------------------ checkpoint ---

namespace {
constexpr std::string_view kCheckpointMagic = "RCBT";
}

std::string checkpoint_serialize(const Model& params, const EncoderConfig& config, std::uint64_t vocab_hash) {
  ByteWriter w;
  w.bytes(kCheckpointMagic);
  w.u32(kCheckpointVersion);
  w.str(config.to_json());
  w.u64(vocab_hash);
  const auto tensors = params.tensors();
  w.u32(static_cast<std::uint32_t>(tensors.size()));
  for (const auto& t : tensors) {
    w.str(t.name);
    w.u32(2);
    w.u32(static_cast<std::uint32_t>(t.value->rows()));
    w.u32(static_cast<std::uint32_t>(t.value->cols()));
    for (Eigen::Index i = 0; i < t.value->size(); ++i) w.f32(t.value->data()[i]);
  }
  return w.data();
}

Checkpoint checkpoint_parse(std::string_view bytes, std::optional<std::uint64_t> expected_vocab_hash) {
  ByteReader r(bytes);
  std::string_view magic;
  if (!r.bytes(4, magic) || magic != kCheckpointMagic) throw Error(ErrorKind::BadMagic, "not an RCBT checkpoint");
  std::uint32_t version = 0;
  if (!r.u32(version)) throw Error(ErrorKind::CorruptTensor, "header");
  if (version != kCheckpointVersion) throw Error(ErrorKind::VersionUnsupported, std::to_string(version));

  Checkpoint ck;
  std::string config_json;
  if (!r.str(config_json) || !r.u64(ck.vocab_hash)) throw Error(ErrorKind::CorruptTensor, "header");
  ck.config = EncoderConfig::from_json(config_json);
  if (expected_vocab_hash && *expected_vocab_hash != ck.vocab_hash)
    throw Error(ErrorKind::VocabMismatch,
                "checkpoint " + hex64(ck.vocab_hash) + " vs vocabulary " + hex64(*expected_vocab_hash));

  ck.params = shaped<float>(ck.config);
  auto tensors = ck.params.tensors();
  std::uint32_t count = 0;
  if (!r.u32(count)) throw Error(ErrorKind::CorruptTensor, "tensor count");
  if (count != tensors.size())
    throw Error(ErrorKind::CorruptTensor, "expected " + std::to_string(tensors.size()) + " tensors, found " +
                                              std::to_string(count));
  for (auto& t : tensors) {
    std::string name;
    std::uint32_t rank = 0, rows = 0, cols = 0;
    if (!r.str(name) || name != t.name) throw Error(ErrorKind::CorruptTensor, t.name);
    if (!r.u32(rank) || rank != 2 || !r.u32(rows) || !r.u32(cols) || rows != t.value->rows() ||
        cols != t.value->cols())
      throw Error(ErrorKind::CorruptTensor, t.name);
    for (Eigen::Index i = 0; i < t.value->size(); ++i)
      if (!r.f32(t.value->data()[i])) throw Error(ErrorKind::CorruptTensor, t.name);
    if (!t.value->allFinite()) throw Error(ErrorKind::CorruptTensor, t.name + " (non-finite)");
  }
  if (r.remaining() != 0) throw Error(ErrorKind::CorruptTensor, "trailing bytes");
  return ck;
}

void checkpoint_save(const Model& params, const EncoderConfig& config, std::uint64_t vocab_hash,
                     const std::filesystem::path& path) {
  write_file(path, checkpoint_serialize(params, config, vocab_hash));
}

Checkpoint checkpoint_load(const std::filesystem::path& path, std::optional<std::uint64_t> expected_vocab_hash) {
  return checkpoint_parse(read_file(path), expected_vocab_hash);
}

// --------------------------------------------------------- instantiation ---

#define RECOBERT_INSTANTIATE(T)                                                                                  \
  template struct Parameters<T>;                                                                                 \
  template Parameters<T> init_model<T>(const EncoderConfig&, std::uint64_t);                                     \
  template EncoderTrace<T> encode_sequence<T>(const Parameters<T>&, const EncoderConfig&, const InputSequence&, \
                                              int, Rng*);                                                        \
  template void backward_sequence<T>(const Parameters<T>&, const EncoderConfig&, const InputSequence&,          \
                                     const EncoderTrace<T>&, const Matrix<T>&, Parameters<T>&);                  \
  template std::vector<Matrix<T>> forward<T>(const Parameters<T>&, const EncoderConfig&,                        \
                                             std::span<const InputSequence>, bool, Rng*);                        \
  template ItemEmbedding<T> pool_features<T>(const Matrix<T>&, const InputSequence&);

RECOBERT_INSTANTIATE(float)
RECOBERT_INSTANTIATE(double)
#undef RECOBERT_INSTANTIATE

template Parameters<double> Parameters<float>::cast<double>() const;
template Parameters<float> Parameters<double>::cast<float>() const;
template Parameters<float> Parameters<float>::cast<float>() const;
template Parameters<double> Parameters<double>::cast<double>() const;

}  // namespace recobert
