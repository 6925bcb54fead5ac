#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "spancorr/config.hpp"
#include "spancorr/span.hpp"
#include "spancorr/vocab.hpp"

namespace spancorr {

/// Half-open range of sequence positions.
struct TokenRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  friend bool operator==(const TokenRange&, const TokenRange&) = default;
};

/// Model input laid out as [CLS] question [SEP] context [SEP], with
/// optional delimiters around a marked context range.
struct EncodedInput {
  std::vector<int> ids;
  std::vector<int> segments;  // 0 question side, 1 context side
  /// Character span for each context token position; empty elsewhere.
  std::vector<std::optional<CharSpan>> offsets;
  /// Positions a predicted span may start or end at.
  std::vector<char> answer_mask;
  /// Positions of the context segment, delimiters included.
  TokenRange context;
  /// Delimited positions, delimiters excluded.
  std::optional<TokenRange> marked;
  /// Context tokens dropped to fit max_seq_len.
  std::size_t dropped_context_tokens = 0;

  std::size_t size() const { return ids.size(); }
  /// First position whose token covers `span.start()` .. last covering `span.end()`.
  /// Empty when the span falls outside the kept context.
  std::optional<TokenRange> positions_for(const CharSpan& span) const;
};

EncodedInput encode(std::string_view question, std::string_view context,
                    std::optional<CharSpan> marked, const Vocab& vocab, const ModelConfig& config);

}  // namespace spancorr
