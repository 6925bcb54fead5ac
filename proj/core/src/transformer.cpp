#include "spancorr/transformer.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "spancorr/error.hpp"

namespace spancorr {
namespace {

constexpr double kLayerNormEps = 1e-5;
const double kGeluC = std::sqrt(2.0 / std::numbers::pi);

using Vector = Eigen::VectorXd;

struct NormCache {
  Matrix normalized;  // (x - mean) / std
  Vector inv_std;
};

Matrix layer_norm(const Matrix& x, const Matrix& gain, const Matrix& bias, NormCache& cache) {
  const Eigen::Index n = x.rows();
  const double d = static_cast<double>(x.cols());
  cache.normalized.resize(n, x.cols());
  cache.inv_std.resize(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double mean = x.row(r).sum() / d;
    const auto centered = x.row(r).array() - mean;
    const double var = centered.square().sum() / d;
    const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
    cache.inv_std(r) = inv;
    cache.normalized.row(r) = centered * inv;
  }
  Matrix y = cache.normalized.array().rowwise() * gain.row(0).array();
  y.rowwise() += bias.row(0);
  return y;
}

Matrix layer_norm_backward(const Matrix& dy, const Matrix& gain, const NormCache& cache,
                           Matrix& dgain, Matrix& dbias, double scale) {
  dgain.row(0) += scale * (dy.array() * cache.normalized.array()).colwise().sum().matrix();
  dbias.row(0) += scale * dy.colwise().sum();
  const Matrix dxhat = dy.array().rowwise() * gain.row(0).array();
  const double d = static_cast<double>(dy.cols());
  Matrix dx(dy.rows(), dy.cols());
  for (Eigen::Index r = 0; r < dy.rows(); ++r) {
    const double mean_d = dxhat.row(r).sum() / d;
    const double mean_dx = dxhat.row(r).dot(cache.normalized.row(r)) / d;
    dx.row(r) = cache.inv_std(r) *
                (dxhat.row(r).array() - mean_d - cache.normalized.row(r).array() * mean_dx).matrix();
  }
  return dx;
}

double gelu(double x) {
  return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + 0.044715 * x * x * x)));
}

double gelu_grad(double x) {
  const double t = std::tanh(kGeluC * (x + 0.044715 * x * x * x));
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * kGeluC * (1.0 + 3.0 * 0.044715 * x * x);
}

Matrix dropout_mask(Eigen::Index rows, Eigen::Index cols, double p, Rng& rng) {
  Matrix mask(rows, cols);
  const double keep = 1.0 / (1.0 - p);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) mask(r, c) = uniform01(rng) < p ? 0.0 : keep;
  }
  return mask;
}

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, double stddev, Rng& rng) {
  Matrix m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) m(r, c) = normal(rng, 0.0, stddev);
  }
  return m;
}

constexpr double kPositionScale = 1.0;

/// Sine/cosine table, scaled; a starting point for the learned position table.
Matrix sinusoid_table(Eigen::Index rows, Eigen::Index cols, double scale) {
  Matrix m(rows, cols);
  for (Eigen::Index p = 0; p < rows; ++p) {
    for (Eigen::Index i = 0; i < cols; ++i) {
      const double freq = std::pow(10000.0, -static_cast<double>(i - i % 2) / static_cast<double>(cols));
      const double a = static_cast<double>(p) * freq;
      m(p, i) = scale * (i % 2 == 0 ? std::sin(a) : std::cos(a));
    }
  }
  return m;
}

/// Masked log-softmax cross-entropy; writes d(loss)/d(logits) into grad.
double masked_cross_entropy(const Vector& logits, const std::vector<char>& mask,
                            std::size_t target, Vector& grad) {
  double max = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (mask[static_cast<std::size_t>(i)]) max = std::max(max, logits(i));
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (mask[static_cast<std::size_t>(i)]) sum += std::exp(logits(i) - max);
  }
  const double log_z = max + std::log(sum);
  grad.setZero(logits.size());
  for (Eigen::Index i = 0; i < logits.size(); ++i) {
    if (mask[static_cast<std::size_t>(i)]) grad(i) = std::exp(logits(i) - log_z);
  }
  grad(static_cast<Eigen::Index>(target)) -= 1.0;
  return log_z - logits(static_cast<Eigen::Index>(target));
}

}  // namespace

Weights Weights::zeros_like() const {
  Weights out = *this;
  out.set_zero();
  return out;
}

void Weights::set_zero() {
  visit([](const std::string&, Matrix& m) { m.setZero(); });
}

std::size_t Weights::parameter_count() const {
  std::size_t n = 0;
  visit([&](const std::string&, const Matrix& m) { n += static_cast<std::size_t>(m.size()); });
  return n;
}

Matrix softmax_rows(const Matrix& scores) {
  Matrix out(scores.rows(), scores.cols());
  for (Eigen::Index r = 0; r < scores.rows(); ++r) {
    const double max = scores.row(r).maxCoeff();
    out.row(r) = (scores.row(r).array() - max).exp();
    out.row(r) /= out.row(r).sum();
  }
  return out;
}

struct SpanModel::Cache {
  struct Layer {
    Matrix input;
    NormCache ln1;
    Matrix attn_in;
    Matrix q, k, v;
    std::vector<Matrix> probs;
    Matrix context;
    Matrix attn_drop;
    Matrix mid;
    NormCache ln2;
    Matrix ff_in;
    Matrix pre_act;
    Matrix act;
    Matrix ff_drop;
  };
  std::vector<Layer> layers;
  Matrix last;
  NormCache final_norm;
  Matrix features;
  Vector start;
  Vector end;
};

SpanModel::SpanModel(ModelConfig config, Vocab vocab)
    : config_(std::move(config)), vocab_(std::move(vocab)) {
  config_.validate();
  Rng rng(derive_seed(config_.seed, {0x1417}));
  const Eigen::Index d = config_.dim;
  const Eigen::Index f = config_.ff_dim;
  const double emb_std = 0.1;
  const double proj_std = 1.0 / std::sqrt(static_cast<double>(d));
  const double ff_out_std = 1.0 / std::sqrt(static_cast<double>(f));
  weights_.token_embedding = random_matrix(static_cast<Eigen::Index>(vocab_.size()), d, emb_std, rng);
  weights_.position_embedding = sinusoid_table(config_.max_seq_len, d, kPositionScale);
  weights_.segment_embedding = random_matrix(2, d, emb_std, rng);
  for (int i = 0; i < config_.layers; ++i) {
    LayerWeights l;
    l.wq = random_matrix(d, d, proj_std, rng);
    l.wk = random_matrix(d, d, proj_std, rng);
    l.wv = random_matrix(d, d, proj_std, rng);
    l.wo = random_matrix(d, d, proj_std, rng);
    l.bq = l.bk = l.bv = l.bo = Matrix::Zero(1, d);
    l.ln1_gain = l.ln2_gain = Matrix::Ones(1, d);
    l.ln1_bias = l.ln2_bias = Matrix::Zero(1, d);
    l.ff_in = random_matrix(d, f, proj_std, rng);
    l.ff_in_bias = Matrix::Zero(1, f);
    l.ff_out = random_matrix(f, d, ff_out_std, rng);
    l.ff_out_bias = Matrix::Zero(1, d);
    weights_.layers.push_back(std::move(l));
  }
  weights_.final_gain = Matrix::Ones(1, d);
  weights_.final_bias = Matrix::Zero(1, d);
  weights_.head = random_matrix(d, 2, proj_std, rng);
  weights_.head_bias = Matrix::Zero(1, 2);
}

SpanModel::SpanModel(ModelConfig config, Vocab vocab, Weights weights)
    : SpanModel(std::move(config), std::move(vocab)) {
  std::vector<std::pair<Eigen::Index, Eigen::Index>> shapes;
  weights_.visit([&](const std::string&, const Matrix& m) { shapes.emplace_back(m.rows(), m.cols()); });
  std::size_t i = 0;
  bool ok = weights.layers.size() == weights_.layers.size();
  if (ok) {
    weights.visit([&](const std::string&, const Matrix& m) {
      if (i >= shapes.size() || shapes[i] != std::make_pair(m.rows(), m.cols())) ok = false;
      ++i;
    });
  }
  if (!ok || i != shapes.size()) throw DataError("checkpoint weights do not match model config");
  weights_ = std::move(weights);
}

void SpanModel::check_input(const EncodedInput& input) const {
  const std::size_t n = input.size();
  if (n == 0) throw std::invalid_argument("empty model input");
  if (n > static_cast<std::size_t>(config_.max_seq_len)) {
    throw std::invalid_argument("input length exceeds max_seq_len");
  }
  if (input.segments.size() != n || input.answer_mask.size() != n) {
    throw std::invalid_argument("inconsistent encoded input");
  }
}

void SpanModel::run_forward(const EncodedInput& input, Rng* dropout_rng, Cache& cache) const {
  check_input(input);
  const auto n = static_cast<Eigen::Index>(input.size());
  const Eigen::Index d = config_.dim;
  const int heads = config_.heads;
  const Eigen::Index dh = d / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
  const bool drop = dropout_rng != nullptr && config_.dropout > 0.0;

  Matrix x(n, d);
  for (Eigen::Index p = 0; p < n; ++p) {
    const auto id = input.ids[static_cast<std::size_t>(p)];
    if (id < 0 || static_cast<std::size_t>(id) >= vocab_.size()) {
      throw std::invalid_argument("token id out of vocabulary range");
    }
    x.row(p) = weights_.token_embedding.row(id) + weights_.position_embedding.row(p) +
               weights_.segment_embedding.row(input.segments[static_cast<std::size_t>(p)]);
  }

  cache.layers.resize(weights_.layers.size());
  for (std::size_t li = 0; li < weights_.layers.size(); ++li) {
    const auto& w = weights_.layers[li];
    auto& c = cache.layers[li];
    c.input = x;
    c.attn_in = layer_norm(x, w.ln1_gain, w.ln1_bias, c.ln1);
    c.q = c.attn_in * w.wq;
    c.q.rowwise() += w.bq.row(0);
    c.k = c.attn_in * w.wk;
    c.k.rowwise() += w.bk.row(0);
    c.v = c.attn_in * w.wv;
    c.v.rowwise() += w.bv.row(0);
    c.context.resize(n, d);
    c.probs.resize(static_cast<std::size_t>(heads));
    for (int h = 0; h < heads; ++h) {
      const Eigen::Index off = h * dh;
      const Matrix scores = (c.q.middleCols(off, dh) * c.k.middleCols(off, dh).transpose()) * scale;
      c.probs[static_cast<std::size_t>(h)] = softmax_rows(scores);
      c.context.middleCols(off, dh) = c.probs[static_cast<std::size_t>(h)] * c.v.middleCols(off, dh);
    }
    Matrix attn_out = c.context * w.wo;
    attn_out.rowwise() += w.bo.row(0);
    if (drop) {
      c.attn_drop = dropout_mask(n, d, config_.dropout, *dropout_rng);
      attn_out.array() *= c.attn_drop.array();
    } else {
      c.attn_drop.resize(0, 0);
    }
    c.mid = x + attn_out;

    c.ff_in = layer_norm(c.mid, w.ln2_gain, w.ln2_bias, c.ln2);
    c.pre_act = c.ff_in * w.ff_in;
    c.pre_act.rowwise() += w.ff_in_bias.row(0);
    c.act = c.pre_act.unaryExpr([](double v) { return gelu(v); });
    Matrix ff_out = c.act * w.ff_out;
    ff_out.rowwise() += w.ff_out_bias.row(0);
    if (drop) {
      c.ff_drop = dropout_mask(n, d, config_.dropout, *dropout_rng);
      ff_out.array() *= c.ff_drop.array();
    } else {
      c.ff_drop.resize(0, 0);
    }
    x = c.mid + ff_out;
  }
  cache.last = x;
  cache.features = layer_norm(x, weights_.final_gain, weights_.final_bias, cache.final_norm);
  cache.start = cache.features * weights_.head.col(0);
  cache.start.array() += weights_.head_bias(0, 0);
  cache.end = cache.features * weights_.head.col(1);
  cache.end.array() += weights_.head_bias(0, 1);
}

SpanLogits SpanModel::forward(const EncodedInput& input) const {
  Cache cache;
  run_forward(input, nullptr, cache);
  SpanLogits out;
  out.start.assign(cache.start.data(), cache.start.data() + cache.start.size());
  out.end.assign(cache.end.data(), cache.end.data() + cache.end.size());
  return out;
}

std::vector<Matrix> SpanModel::attention_maps(const EncodedInput& input) const {
  Cache cache;
  run_forward(input, nullptr, cache);
  std::vector<Matrix> out;
  for (const auto& l : cache.layers) out.insert(out.end(), l.probs.begin(), l.probs.end());
  return out;
}

double SpanModel::loss(const EncodedInput& input, std::size_t start, std::size_t end) const {
  Cache cache;
  run_forward(input, nullptr, cache);
  Vector g;
  return 0.5 * (masked_cross_entropy(cache.start, input.answer_mask, start, g) +
                masked_cross_entropy(cache.end, input.answer_mask, end, g));
}

double SpanModel::loss_and_gradient(const EncodedInput& input, std::size_t start, std::size_t end,
                                    Weights& grad, double scale, Rng* dropout_rng) const {
  if (start >= input.size() || end >= input.size() || !input.answer_mask[start] ||
      !input.answer_mask[end]) {
    throw std::invalid_argument("target position outside the answer mask");
  }
  Cache cache;
  run_forward(input, dropout_rng, cache);
  const auto n = static_cast<Eigen::Index>(input.size());
  const Eigen::Index d = config_.dim;
  const int heads = config_.heads;
  const Eigen::Index dh = d / heads;
  const double attn_scale = 1.0 / std::sqrt(static_cast<double>(dh));

  Vector d_start;
  Vector d_end;
  const double loss = 0.5 * (masked_cross_entropy(cache.start, input.answer_mask, start, d_start) +
                             masked_cross_entropy(cache.end, input.answer_mask, end, d_end));
  d_start *= 0.5;
  d_end *= 0.5;

  grad.head.col(0) += scale * cache.features.transpose() * d_start;
  grad.head.col(1) += scale * cache.features.transpose() * d_end;
  grad.head_bias(0, 0) += scale * d_start.sum();
  grad.head_bias(0, 1) += scale * d_end.sum();
  Matrix d_features = d_start * weights_.head.col(0).transpose() + d_end * weights_.head.col(1).transpose();
  Matrix dx = layer_norm_backward(d_features, weights_.final_gain, cache.final_norm,
                                  grad.final_gain, grad.final_bias, scale);

  for (std::size_t li = weights_.layers.size(); li-- > 0;) {
    const auto& w = weights_.layers[li];
    auto& g = grad.layers[li];
    const auto& c = cache.layers[li];

    // x_out = mid + dropout(act * ff_out + b)
    Matrix d_ff_out = dx;
    if (c.ff_drop.size() > 0) d_ff_out.array() *= c.ff_drop.array();
    g.ff_out += scale * c.act.transpose() * d_ff_out;
    g.ff_out_bias.row(0) += scale * d_ff_out.colwise().sum();
    Matrix d_pre = (d_ff_out * w.ff_out.transpose()).array() *
                   c.pre_act.unaryExpr([](double v) { return gelu_grad(v); }).array();
    g.ff_in += scale * c.ff_in.transpose() * d_pre;
    g.ff_in_bias.row(0) += scale * d_pre.colwise().sum();
    Matrix d_mid = dx + layer_norm_backward(d_pre * w.ff_in.transpose(), w.ln2_gain, c.ln2,
                                            g.ln2_gain, g.ln2_bias, scale);

    // mid = input + dropout(context * wo + bo)
    Matrix d_attn_out = d_mid;
    if (c.attn_drop.size() > 0) d_attn_out.array() *= c.attn_drop.array();
    g.wo += scale * c.context.transpose() * d_attn_out;
    g.bo.row(0) += scale * d_attn_out.colwise().sum();
    const Matrix d_context = d_attn_out * w.wo.transpose();
    Matrix dq(n, d);
    Matrix dk(n, d);
    Matrix dv(n, d);
    for (int h = 0; h < heads; ++h) {
      const Eigen::Index off = h * dh;
      const Matrix& p = c.probs[static_cast<std::size_t>(h)];
      const auto d_ctx_h = d_context.middleCols(off, dh);
      dv.middleCols(off, dh) = p.transpose() * d_ctx_h;
      const Matrix dp = d_ctx_h * c.v.middleCols(off, dh).transpose();
      Matrix ds = p.array() * (dp.colwise() - (dp.array() * p.array()).rowwise().sum().matrix()).array();
      ds *= attn_scale;
      dq.middleCols(off, dh) = ds * c.k.middleCols(off, dh);
      dk.middleCols(off, dh) = ds.transpose() * c.q.middleCols(off, dh);
    }
    g.wq += scale * c.attn_in.transpose() * dq;
    g.wk += scale * c.attn_in.transpose() * dk;
    g.wv += scale * c.attn_in.transpose() * dv;
    g.bq.row(0) += scale * dq.colwise().sum();
    g.bk.row(0) += scale * dk.colwise().sum();
    g.bv.row(0) += scale * dv.colwise().sum();
    const Matrix d_attn_in = dq * w.wq.transpose() + dk * w.wk.transpose() + dv * w.wv.transpose();
    dx = d_mid + layer_norm_backward(d_attn_in, w.ln1_gain, c.ln1, g.ln1_gain, g.ln1_bias, scale);
  }

  for (Eigen::Index p = 0; p < n; ++p) {
    grad.token_embedding.row(input.ids[static_cast<std::size_t>(p)]) += scale * dx.row(p);
    grad.position_embedding.row(p) += scale * dx.row(p);
    grad.segment_embedding.row(input.segments[static_cast<std::size_t>(p)]) += scale * dx.row(p);
  }
  return loss;
}

}  // namespace spancorr
