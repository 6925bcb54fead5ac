#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace spancorr {

/// Architecture and input-shape settings shared by reader and corrector.
struct ModelConfig {
  int layers = 2;
  int heads = 2;
  int dim = 64;
  int ff_dim = 128;
  int max_seq_len = 256;
  int max_query_len = 30;
  int max_answer_len = 30;
  double dropout = 0.1;
  std::uint64_t seed = 13;

  /// Throws ConfigError on non-positive sizes or dim % heads != 0.
  void validate() const;
  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

enum class OptimizerKind { Sgd, Adam };

std::string_view to_string(OptimizerKind k);
OptimizerKind parse_optimizer(std::string_view name);

struct TrainConfig {
  int epochs = 1;
  int batch_size = 32;
  double learning_rate = 0.3;
  double warmup = 0.1;
  OptimizerKind optimizer = OptimizerKind::Sgd;
  /// Global gradient-norm clip; 0 disables.
  double clip_norm = 1.0;
  std::uint64_t seed = 17;

  void validate() const;
  friend bool operator==(const TrainConfig&, const TrainConfig&) = default;
};

}  // namespace spancorr
