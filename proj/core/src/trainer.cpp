#include "spancorr/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "spancorr/error.hpp"
#include "spancorr/rng.hpp"

namespace spancorr {
namespace {

class Optimizer {
 public:
  Optimizer(const TrainConfig& config, const Weights& shape) : config_(config) {
    if (config.optimizer == OptimizerKind::Adam) {
      first_ = shape.zeros_like();
      second_ = shape.zeros_like();
    }
  }

  void step(Weights& weights, Weights& grad, double lr) {
    ++t_;
    if (config_.clip_norm > 0.0) {
      double sq = 0.0;
      grad.visit([&](const std::string&, const Matrix& g) { sq += g.squaredNorm(); });
      const double norm = std::sqrt(sq);
      if (norm > config_.clip_norm) {
        const double s = config_.clip_norm / norm;
        grad.visit([&](const std::string&, Matrix& g) { g *= s; });
      }
    }
    if (config_.optimizer == OptimizerKind::Sgd) {
      std::vector<Matrix*> gs;
      grad.visit([&](const std::string&, Matrix& g) { gs.push_back(&g); });
      std::size_t i = 0;
      weights.visit([&](const std::string&, Matrix& w) { w -= lr * *gs[i++]; });
      return;
    }
    constexpr double kBeta1 = 0.9;
    constexpr double kBeta2 = 0.999;
    constexpr double kEps = 1e-8;
    const double c1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    std::vector<Matrix*> gs;
    std::vector<Matrix*> ms;
    std::vector<Matrix*> vs;
    grad.visit([&](const std::string&, Matrix& g) { gs.push_back(&g); });
    first_.visit([&](const std::string&, Matrix& m) { ms.push_back(&m); });
    second_.visit([&](const std::string&, Matrix& v) { vs.push_back(&v); });
    std::size_t i = 0;
    weights.visit([&](const std::string&, Matrix& w) {
      Matrix& g = *gs[i];
      Matrix& m = *ms[i];
      Matrix& v = *vs[i];
      ++i;
      m = kBeta1 * m + (1.0 - kBeta1) * g;
      v = kBeta2 * v + (1.0 - kBeta2) * g.cwiseProduct(g);
      w.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + kEps);
    });
  }

 private:
  TrainConfig config_;
  Weights first_;
  Weights second_;
  std::size_t t_ = 0;
};

}  // namespace

std::optional<TrainingExample> make_training_example(std::string_view question,
                                                     std::string_view context,
                                                     std::optional<CharSpan> marked,
                                                     const CharSpan& target, const Vocab& vocab,
                                                     const ModelConfig& config) {
  TrainingExample ex{encode(question, context, marked, vocab, config), 0, 0};
  const auto range = ex.input.positions_for(target);
  if (!range) return std::nullopt;
  ex.start = range->begin;
  ex.end = range->end - 1;
  if (!ex.input.answer_mask[ex.start] || !ex.input.answer_mask[ex.end]) return std::nullopt;
  // A target cut by truncation would teach the wrong boundary.
  if (!ex.input.offsets[ex.end] || ex.input.offsets[ex.end]->end() < target.end()) {
    return std::nullopt;
  }
  return ex;
}

double learning_rate_at(const TrainConfig& config, std::size_t step, std::size_t total_steps) {
  const auto warmup_steps =
      static_cast<std::size_t>(std::llround(config.warmup * static_cast<double>(total_steps)));
  if (step < warmup_steps) {
    return config.learning_rate * static_cast<double>(step + 1) / static_cast<double>(warmup_steps);
  }
  const std::size_t decay = total_steps - warmup_steps;
  if (decay == 0) return config.learning_rate;
  return config.learning_rate * static_cast<double>(total_steps - step) / static_cast<double>(decay);
}

SpanModel train(std::span<const TrainingExample> examples, const ModelConfig& model_config,
                const Vocab& vocab, const TrainConfig& train_config, TrainingSummary* summary,
                const TrainOptions& options) {
  train_config.validate();
  SpanModel model(model_config, vocab);

  TrainingSummary local;
  local.examples = examples.size();
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    const auto& ex = examples[i];
    const auto& mask = ex.input.answer_mask;
    if (ex.start >= mask.size() || ex.end >= mask.size() || ex.start > ex.end ||
        !mask[ex.start] || !mask[ex.end] ||
        ex.input.size() > static_cast<std::size_t>(model_config.max_seq_len)) {
      ++local.rejected;
      continue;
    }
    usable.push_back(i);
  }
  if (usable.empty()) throw DataError("no usable training examples");

  const std::size_t batch = static_cast<std::size_t>(train_config.batch_size);
  const std::size_t steps_per_epoch = (usable.size() + batch - 1) / batch;
  const std::size_t total_steps = steps_per_epoch * static_cast<std::size_t>(train_config.epochs);

  Optimizer optimizer(train_config, model.weights());
  Weights grad = model.weights().zeros_like();
  std::size_t step = 0;
  for (int epoch = 0; epoch < train_config.epochs; ++epoch) {
    std::vector<std::size_t> order = usable;
    Rng order_rng(derive_seed(train_config.seed, {0xE90C, static_cast<std::uint64_t>(epoch)}));
    shuffle(order, order_rng);
    for (std::size_t b = 0; b < steps_per_epoch; ++b, ++step) {
      const std::size_t lo = b * batch;
      const std::size_t hi = std::min(order.size(), lo + batch);
      const double scale = 1.0 / static_cast<double>(hi - lo);
      grad.set_zero();
      double batch_loss = 0.0;
      for (std::size_t j = lo; j < hi; ++j) {
        const auto& ex = examples[order[j]];
        Rng drop_rng(derive_seed(train_config.seed, {0xD509, step, j - lo}));
        batch_loss += scale * model.loss_and_gradient(ex.input, ex.start, ex.end, grad, scale, &drop_rng);
      }
      optimizer.step(model.weights(), grad, learning_rate_at(train_config, step, total_steps));
      local.batch_losses.push_back(batch_loss);
      if (options.on_step) options.on_step(step + 1, total_steps, batch_loss);
    }
  }
  local.steps = step;
  if (summary) *summary = std::move(local);
  return model;
}

}  // namespace spancorr
