#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "spancorr/span.hpp"

namespace spancorr {

struct Token {
  std::string text;  // lowercased
  CharSpan span;
};

/// Splits on whitespace; every ASCII punctuation character is its own token.
std::vector<Token> tokenize(std::string_view text);

/// Maximal runs of non-whitespace characters.
std::vector<CharSpan> whitespace_tokens(std::string_view text);

}  // namespace spancorr
