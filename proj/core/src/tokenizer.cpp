#include "spancorr/tokenizer.hpp"

#include <cctype>

namespace spancorr {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (is_space(c)) {
      ++i;
    } else if (is_punct(c)) {
      tokens.push_back({std::string(1, c), CharSpan(i, i + 1)});
      ++i;
    } else {
      const std::size_t start = i;
      std::string word;
      while (i < text.size() && !is_space(text[i]) && !is_punct(text[i])) {
        word += static_cast<char>(std::tolower(static_cast<unsigned char>(text[i])));
        ++i;
      }
      tokens.push_back({std::move(word), CharSpan(start, i)});
    }
  }
  return tokens;
}

std::vector<CharSpan> whitespace_tokens(std::string_view text) {
  std::vector<CharSpan> out;
  std::size_t i = 0;
  while (i < text.size()) {
    if (is_space(text[i])) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    out.emplace_back(start, i);
  }
  return out;
}

}  // namespace spancorr
