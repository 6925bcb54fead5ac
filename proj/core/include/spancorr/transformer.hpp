#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spancorr/config.hpp"
#include "spancorr/encode.hpp"
#include "spancorr/rng.hpp"
#include "spancorr/vocab.hpp"

namespace spancorr {

using Matrix = Eigen::MatrixXd;

struct LayerWeights {
  Matrix wq, bq, wk, bk, wv, bv, wo, bo;
  Matrix ln1_gain, ln1_bias, ln2_gain, ln2_bias;
  Matrix ff_in, ff_in_bias, ff_out, ff_out_bias;
};

/// All trainable tensors. Vectors are stored as 1 x n matrices.
struct Weights {
  Matrix token_embedding;     // vocab x dim
  Matrix position_embedding;  // max_seq_len x dim
  Matrix segment_embedding;   // 2 x dim
  std::vector<LayerWeights> layers;
  Matrix final_gain, final_bias;
  Matrix head;       // dim x 2 (start, end)
  Matrix head_bias;  // 1 x 2

  /// Calls f(name, matrix) for every tensor in a fixed order.
  template <typename F>
  void visit(F&& f) {
    visit_impl(*this, f);
  }
  template <typename F>
  void visit(F&& f) const {
    visit_impl(*this, f);
  }

  /// Same shapes, all zeros.
  Weights zeros_like() const;
  void set_zero();
  std::size_t parameter_count() const;

 private:
  template <typename Self, typename F>
  static void visit_impl(Self& self, F& f) {
    f("token_embedding", self.token_embedding);
    f("position_embedding", self.position_embedding);
    f("segment_embedding", self.segment_embedding);
    for (std::size_t i = 0; i < self.layers.size(); ++i) {
      auto& l = self.layers[i];
      const std::string p = "layer" + std::to_string(i) + ".";
      f(p + "wq", l.wq);
      f(p + "bq", l.bq);
      f(p + "wk", l.wk);
      f(p + "bk", l.bk);
      f(p + "wv", l.wv);
      f(p + "bv", l.bv);
      f(p + "wo", l.wo);
      f(p + "bo", l.bo);
      f(p + "ln1_gain", l.ln1_gain);
      f(p + "ln1_bias", l.ln1_bias);
      f(p + "ln2_gain", l.ln2_gain);
      f(p + "ln2_bias", l.ln2_bias);
      f(p + "ff_in", l.ff_in);
      f(p + "ff_in_bias", l.ff_in_bias);
      f(p + "ff_out", l.ff_out);
      f(p + "ff_out_bias", l.ff_out_bias);
    }
    f("final_gain", self.final_gain);
    f("final_bias", self.final_bias);
    f("head", self.head);
    f("head_bias", self.head_bias);
  }
};

/// Per-position start and end scores.
struct SpanLogits {
  std::vector<double> start;
  std::vector<double> end;

  std::size_t size() const { return start.size(); }
  friend bool operator==(const SpanLogits&, const SpanLogits&) = default;
};

/// Row-wise softmax.
Matrix softmax_rows(const Matrix& scores);

/// Pre-norm transformer encoder with start/end span heads.
class SpanModel {
 public:
  /// Random initialization seeded by config.seed.
  SpanModel(ModelConfig config, Vocab vocab);
  /// Restores trained weights; shapes must match the config and vocab.
  SpanModel(ModelConfig config, Vocab vocab, Weights weights);

  const ModelConfig& config() const { return config_; }
  const Vocab& vocab() const { return vocab_; }
  const Weights& weights() const { return weights_; }
  Weights& weights() { return weights_; }

  /// Inference pass (no dropout).
  SpanLogits forward(const EncodedInput& input) const;

  /// Mean of start and end cross-entropy over the answer mask. Adds
  /// scale * d(loss)/d(weights) into `grad`. Dropout is applied when
  /// `dropout_rng` is non-null.
  double loss_and_gradient(const EncodedInput& input, std::size_t start, std::size_t end,
                           Weights& grad, double scale, Rng* dropout_rng) const;

  /// Loss only, no dropout. Used by gradient checks.
  double loss(const EncodedInput& input, std::size_t start, std::size_t end) const;

  /// Attention probabilities of every layer and head from an inference pass.
  std::vector<Matrix> attention_maps(const EncodedInput& input) const;

 private:
  struct Cache;
  void check_input(const EncodedInput& input) const;
  void run_forward(const EncodedInput& input, Rng* dropout_rng, Cache& cache) const;

  ModelConfig config_;
  Vocab vocab_;
  Weights weights_;
};

}  // namespace spancorr
