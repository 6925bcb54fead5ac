#pragma once

#include <cstddef>
#include <string_view>

namespace spancorr::utf8 {

// Files carry offsets in characters (Unicode code points); in memory all
// offsets are byte offsets into UTF-8 strings. These convert between the two.

/// Number of code points in s.
std::size_t length(std::string_view s);

/// Byte offset of the code point with index `chars`. Throws DataError past the end.
std::size_t byte_offset(std::string_view s, std::size_t chars);

/// Code point index of byte offset `bytes`, which must sit on a code point boundary.
std::size_t char_offset(std::string_view s, std::size_t bytes);

}  // namespace spancorr::utf8
