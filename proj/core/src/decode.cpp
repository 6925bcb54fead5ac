#include "spancorr/decode.hpp"

#include <algorithm>
#include <stdexcept>

namespace spancorr {
namespace {

bool better(const SpanCandidate& a, const SpanCandidate& b) {
  if (a.score != b.score) return a.score > b.score;
  if (a.start != b.start) return a.start < b.start;
  return a.end < b.end;
}

}  // namespace

std::vector<SpanCandidate> top_spans(const SpanLogits& logits, std::span<const char> mask,
                                     std::size_t n, std::size_t max_answer_len) {
  if (n == 0) throw std::invalid_argument("n-best size must be at least 1");
  if (logits.start.size() != mask.size() || logits.end.size() != mask.size()) {
    throw std::invalid_argument("logits and mask lengths differ");
  }
  std::vector<SpanCandidate> all;
  for (std::size_t s = 0; s < mask.size(); ++s) {
    if (!mask[s]) continue;
    const std::size_t last = std::min(mask.size(), s + max_answer_len);
    for (std::size_t e = s; e < last; ++e) {
      if (mask[e]) all.push_back({s, e, logits.start[s] + logits.end[e]});
    }
  }
  const std::size_t keep = std::min(n, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(keep), all.end(), better);
  all.resize(keep);
  return all;
}

NBestList decode_nbest(const SpanLogits& logits, const EncodedInput& input,
                       std::string_view context, std::size_t n, std::size_t max_answer_len,
                       const std::string& example_id) {
  NBestList out;
  for (const auto& c : top_spans(logits, input.answer_mask, n, max_answer_len)) {
    const CharSpan span(input.offsets[c.start]->start(), input.offsets[c.end]->end());
    out.push_back({example_id, std::string(span.in(context)), span, c.score});
  }
  return out;
}

SpanLogits ensemble_logits(std::span<const SpanLogits> parts) {
  if (parts.empty()) throw std::invalid_argument("cannot ensemble zero models");
  const std::size_t n = parts.front().size();
  SpanLogits out{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
  for (const auto& p : parts) {
    if (p.start.size() != n || p.end.size() != n) {
      throw std::invalid_argument("ensembled logits differ in length");
    }
    for (std::size_t i = 0; i < n; ++i) {
      out.start[i] += p.start[i];
      out.end[i] += p.end[i];
    }
  }
  const double k = static_cast<double>(parts.size());
  for (std::size_t i = 0; i < n; ++i) {
    out.start[i] /= k;
    out.end[i] /= k;
  }
  return out;
}

}  // namespace spancorr
