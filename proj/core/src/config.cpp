#include "spancorr/config.hpp"

#include <string>

#include "spancorr/error.hpp"

namespace spancorr {

void ModelConfig::validate() const {
  if (layers <= 0 || heads <= 0 || dim <= 0 || ff_dim <= 0) {
    throw ConfigError("model dimensions must be positive");
  }
  if (dim % heads != 0) {
    throw ConfigError("embedding dim " + std::to_string(dim) + " not divisible by " +
                      std::to_string(heads) + " heads");
  }
  if (max_query_len <= 0 || max_answer_len <= 0) {
    throw ConfigError("max query and answer lengths must be positive");
  }
  if (max_seq_len < max_query_len + 6) {
    throw ConfigError("max_seq_len too small for max_query_len plus special tokens");
  }
  if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("dropout must be in [0, 1)");
}

std::string_view to_string(OptimizerKind k) {
  return k == OptimizerKind::Adam ? "adam" : "sgd";
}

OptimizerKind parse_optimizer(std::string_view name) {
  if (name == "sgd") return OptimizerKind::Sgd;
  if (name == "adam") return OptimizerKind::Adam;
  throw ConfigError("unknown optimizer '" + std::string(name) + "' (expected sgd or adam)");
}

void TrainConfig::validate() const {
  if (epochs <= 0 || batch_size <= 0) throw ConfigError("epochs and batch size must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  if (warmup < 0.0 || warmup > 1.0) throw ConfigError("warmup fraction must be in [0, 1]");
  if (clip_norm < 0.0) throw ConfigError("clip norm must be non-negative");
}

}  // namespace spancorr
