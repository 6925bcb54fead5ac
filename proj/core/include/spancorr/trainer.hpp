#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "spancorr/config.hpp"
#include "spancorr/encode.hpp"
#include "spancorr/transformer.hpp"

namespace spancorr {

/// Encoded input plus target start/end positions (inclusive).
struct TrainingExample {
  EncodedInput input;
  std::size_t start = 0;
  std::size_t end = 0;
};

/// Encodes the pair and maps `target` to token positions. Returns nothing
/// when the target does not survive truncation.
std::optional<TrainingExample> make_training_example(std::string_view question,
                                                     std::string_view context,
                                                     std::optional<CharSpan> marked,
                                                     const CharSpan& target, const Vocab& vocab,
                                                     const ModelConfig& config);

struct TrainingSummary {
  std::size_t examples = 0;
  /// Examples dropped because a target fell outside the answer mask.
  std::size_t rejected = 0;
  std::size_t steps = 0;
  std::vector<double> batch_losses;
};

struct TrainOptions {
  /// Called after each optimizer step with (step, total_steps, batch loss).
  std::function<void(std::size_t, std::size_t, double)> on_step;
};

/// Linear warmup over the first `warmup` fraction of steps, then linear decay to zero.
double learning_rate_at(const TrainConfig& config, std::size_t step, std::size_t total_steps);

/// Trains a freshly initialized model. Minibatch order is a pure function of
/// (train seed, epoch); dropout noise of (train seed, step, batch slot).
SpanModel train(std::span<const TrainingExample> examples, const ModelConfig& model_config,
                const Vocab& vocab, const TrainConfig& train_config,
                TrainingSummary* summary = nullptr, const TrainOptions& options = {});

}  // namespace spancorr
