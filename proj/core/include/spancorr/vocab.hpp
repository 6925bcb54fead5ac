#pragma once

#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "spancorr/span.hpp"

namespace spancorr {

class Vocab {
 public:
  static constexpr int kPad = 0;
  static constexpr int kUnk = 1;
  static constexpr int kCls = 2;
  static constexpr int kSep = 3;
  /// Delimiter marking a span in the context. Tokenization never yields it.
  static constexpr int kDelim = 4;
  static constexpr int kNumSpecial = 5;

  /// Specials only.
  Vocab();
  /// Restores a vocabulary from its id-ordered token list; specials must lead.
  explicit Vocab(std::vector<std::string> tokens);

  /// Ids ordered by (count desc, token asc); tokens seen fewer than
  /// min_count times are left out and map to UNK.
  static Vocab build(std::span<const std::string> texts, int min_count = 1);
  static Vocab build(std::span<const MRCExample> corpus, int min_count = 1);

  int id(std::string_view token) const;
  const std::string& token(int id) const { return tokens_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return tokens_.size(); }
  const std::vector<std::string>& tokens() const { return tokens_; }

  friend bool operator==(const Vocab& a, const Vocab& b) { return a.tokens_ == b.tokens_; }

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, int> index_;
};

}  // namespace spancorr
