#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spancorr/span.hpp"

namespace spancorr {

struct NormalizeOptions {
  /// Drop standalone English articles. Disable for non-English evaluation.
  bool strip_articles = true;
};

/// SQuAD-style answer normalization: lowercase, drop ASCII punctuation,
/// drop articles, collapse whitespace.
std::string normalize_text(std::string_view s, NormalizeOptions opts = {});

/// Whitespace tokens of the normalized string.
std::vector<std::string> normalized_tokens(std::string_view s, NormalizeOptions opts = {});

/// 1 if the normalized prediction equals any normalized gold text.
/// Throws std::invalid_argument on an empty gold list.
int exact_match(std::string_view pred, std::span<const std::string> gts,
                NormalizeOptions opts = {});

double token_f1(std::string_view pred, std::string_view gt, NormalizeOptions opts = {});

/// Best token F1 over annotations (multi-span texts joined by spaces).
double f1_max(std::string_view pred, std::span<const Annotation> annotations,
              NormalizeOptions opts = {});

int exact_match(std::string_view pred, std::span<const Annotation> annotations,
                NormalizeOptions opts = {});

/// Finds `text` in `context`. With a hint, picks the occurrence whose start
/// is nearest the hint start (ties go to the earlier one); otherwise the first.
/// Throws NotFound if absent.
CharSpan locate(std::string_view text, std::string_view context,
                std::optional<CharSpan> hint = std::nullopt);

}  // namespace spancorr
