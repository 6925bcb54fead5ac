#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spancorr/encode.hpp"
#include "spancorr/span.hpp"
#include "spancorr/transformer.hpp"

namespace spancorr {

struct SpanCandidate {
  std::size_t start = 0;  // inclusive positions
  std::size_t end = 0;
  double score = 0.0;

  friend bool operator==(const SpanCandidate&, const SpanCandidate&) = default;
};

/// Best `n` (start, end) pairs with start <= end, both inside `mask`, and
/// end - start + 1 <= max_answer_len. Score is start[s] + end[e]; ties go to
/// the earlier start, then the shorter span.
std::vector<SpanCandidate> top_spans(const SpanLogits& logits, std::span<const char> mask,
                                     std::size_t n, std::size_t max_answer_len);

/// top_spans mapped back to context text and character spans.
NBestList decode_nbest(const SpanLogits& logits, const EncodedInput& input,
                       std::string_view context, std::size_t n, std::size_t max_answer_len,
                       const std::string& example_id = {});

/// Elementwise mean. Throws std::invalid_argument on empty input or length mismatch.
SpanLogits ensemble_logits(std::span<const SpanLogits> parts);

}  // namespace spancorr
