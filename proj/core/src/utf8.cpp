#include "spancorr/utf8.hpp"

#include <string>

#include "spancorr/error.hpp"

namespace spancorr::utf8 {
namespace {

bool is_continuation(char c) { return (static_cast<unsigned char>(c) & 0xC0) == 0x80; }

}  // namespace

std::size_t length(std::string_view s) {
  std::size_t n = 0;
  for (char c : s) n += is_continuation(c) ? 0 : 1;
  return n;
}

std::size_t byte_offset(std::string_view s, std::size_t chars) {
  std::size_t seen = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (is_continuation(s[i])) continue;
    if (seen == chars) return i;
    ++seen;
  }
  if (seen == chars) return s.size();
  throw DataError("character offset " + std::to_string(chars) + " past end of text (" +
                  std::to_string(seen) + " characters)");
}

std::size_t char_offset(std::string_view s, std::size_t bytes) {
  if (bytes > s.size()) {
    throw DataError("byte offset " + std::to_string(bytes) + " past end of text");
  }
  if (bytes < s.size() && is_continuation(s[bytes])) {
    throw DataError("byte offset " + std::to_string(bytes) + " splits a UTF-8 sequence");
  }
  return length(s.substr(0, bytes));
}

}  // namespace spancorr::utf8
