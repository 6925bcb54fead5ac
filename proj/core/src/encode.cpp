#include "spancorr/encode.hpp"

#include <algorithm>

#include "spancorr/datagen.hpp"
#include "spancorr/error.hpp"
#include "spancorr/tokenizer.hpp"

namespace spancorr {

std::optional<TokenRange> EncodedInput::positions_for(const CharSpan& span) const {
  std::optional<std::size_t> first;
  std::optional<std::size_t> last;
  for (std::size_t p = 0; p < offsets.size(); ++p) {
    if (!offsets[p]) continue;
    if (!first && offsets[p]->end() > span.start()) first = p;
    if (offsets[p]->start() < span.end()) last = p;
  }
  if (!first || !last || *first > *last) return std::nullopt;
  return TokenRange{*first, *last + 1};
}

EncodedInput encode(std::string_view question, std::string_view context,
                    std::optional<CharSpan> marked, const Vocab& vocab, const ModelConfig& config) {
  auto q_tokens = tokenize(question);
  if (q_tokens.size() > static_cast<std::size_t>(config.max_query_len)) {
    q_tokens.resize(static_cast<std::size_t>(config.max_query_len));
  }
  const auto c_tokens = tokenize(context);
  const std::ptrdiff_t budget = static_cast<std::ptrdiff_t>(config.max_seq_len) - 3 -
                                static_cast<std::ptrdiff_t>(q_tokens.size()) - (marked ? 2 : 0);
  const std::size_t kept =
      std::min(c_tokens.size(), static_cast<std::size_t>(std::max<std::ptrdiff_t>(budget, 0)));

  EncodedInput in;
  in.dropped_context_tokens = c_tokens.size() - kept;
  const std::size_t n = q_tokens.size() + kept + 3;
  in.ids.reserve(n + 2);
  in.ids.push_back(Vocab::kCls);
  for (const auto& t : q_tokens) in.ids.push_back(vocab.id(t.text));
  in.ids.push_back(Vocab::kSep);
  in.segments.assign(in.ids.size(), 0);
  in.offsets.assign(in.ids.size(), std::nullopt);
  in.answer_mask.assign(in.ids.size(), 0);
  in.context = {in.ids.size(), in.ids.size() + kept};
  for (std::size_t i = 0; i < kept; ++i) {
    in.ids.push_back(vocab.id(c_tokens[i].text));
    in.segments.push_back(1);
    in.offsets.emplace_back(c_tokens[i].span);
    in.answer_mask.push_back(1);
  }
  in.ids.push_back(Vocab::kSep);
  in.segments.push_back(1);
  in.offsets.emplace_back(std::nullopt);
  in.answer_mask.push_back(0);

  if (marked && kept > 0) {
    if (marked->end() > context.size()) throw DataError("marked span exceeds context");
    // Smallest covering token range; a span over whitespace only snaps to the next token.
    std::size_t first = kept;
    std::size_t last = 0;
    bool any = false;
    for (std::size_t i = 0; i < kept; ++i) {
      if (c_tokens[i].span.end() > marked->start() && first == kept) first = i;
      if (c_tokens[i].span.start() < marked->end()) {
        last = i;
        any = true;
      }
    }
    if (first == kept) first = kept - 1;
    if (!any || last < first) last = first;
    const TokenRange range{in.context.begin + first, in.context.begin + last + 1};
    in.ids = insert_delimiters(in.ids, range, Vocab::kDelim, in.context);
    auto pos = [](std::size_t p) { return static_cast<std::ptrdiff_t>(p); };
    for (std::size_t at : {range.end, range.begin}) {
      in.segments.insert(in.segments.begin() + pos(at), 1);
      in.offsets.insert(in.offsets.begin() + pos(at), std::nullopt);
      in.answer_mask.insert(in.answer_mask.begin() + pos(at), 0);
    }
    in.marked = TokenRange{range.begin + 1, range.end + 1};
    in.context.end += 2;
  }
  return in;
}

}  // namespace spancorr
