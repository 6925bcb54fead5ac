#include "spancorr/vocab.hpp"

#include <algorithm>
#include <array>
#include <map>

#include "spancorr/error.hpp"
#include "spancorr/tokenizer.hpp"

namespace spancorr {
namespace {

const std::array<std::string, Vocab::kNumSpecial> kSpecials = {"[PAD]", "[UNK]", "[CLS]",
                                                               "[SEP]", "[TD]"};

}  // namespace

Vocab::Vocab() : Vocab(std::vector<std::string>(kSpecials.begin(), kSpecials.end())) {}

Vocab::Vocab(std::vector<std::string> tokens) : tokens_(std::move(tokens)) {
  if (tokens_.size() < kSpecials.size() ||
      !std::equal(kSpecials.begin(), kSpecials.end(), tokens_.begin())) {
    throw DataError("vocabulary does not start with the reserved special tokens");
  }
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    if (!index_.emplace(tokens_[i], static_cast<int>(i)).second) {
      throw DataError("duplicate vocabulary token '" + tokens_[i] + "'");
    }
  }
}

Vocab Vocab::build(std::span<const std::string> texts, int min_count) {
  std::map<std::string, int> counts;
  for (const auto& text : texts) {
    for (auto& tok : tokenize(text)) ++counts[std::move(tok.text)];
  }
  std::vector<std::pair<std::string, int>> entries(counts.begin(), counts.end());
  std::stable_sort(entries.begin(), entries.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  std::vector<std::string> tokens(kSpecials.begin(), kSpecials.end());
  for (auto& [tok, n] : entries) {
    if (n >= min_count) tokens.push_back(tok);
  }
  return Vocab(std::move(tokens));
}

Vocab Vocab::build(std::span<const MRCExample> corpus, int min_count) {
  std::vector<std::string> texts;
  texts.reserve(corpus.size() * 2);
  for (const auto& ex : corpus) {
    texts.push_back(ex.question);
    texts.push_back(ex.context);
  }
  return build(texts, min_count);
}

int Vocab::id(std::string_view token) const {
  auto it = index_.find(std::string(token));
  return it == index_.end() ? kUnk : it->second;
}

}  // namespace spancorr
