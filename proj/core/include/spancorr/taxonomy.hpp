#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spancorr/metrics.hpp"
#include "spancorr/span.hpp"

namespace spancorr {

/// Partial-match error classes. UnresolvedTextOverlap covers predictions whose
/// tokens overlap the reference but whose span does not (another occurrence).
enum class ErrorCategory {
  MultiSpanGT,
  PredSubsetGT,
  GTSubsetPred,
  PartialOverlap,
  UnresolvedTextOverlap,
};

inline constexpr std::array<ErrorCategory, 5> kAllCategories = {
    ErrorCategory::MultiSpanGT, ErrorCategory::PredSubsetGT, ErrorCategory::GTSubsetPred,
    ErrorCategory::PartialOverlap, ErrorCategory::UnresolvedTextOverlap};

std::string_view to_string(ErrorCategory c);
/// Human-readable label as used in report tables.
std::string_view display_name(ErrorCategory c);
/// Inverse of to_string. Throws DataError for unknown names.
ErrorCategory parse_category(std::string_view name);

bool is_partial_match(int em, double f1);

/// The annotation closest to the prediction: highest token F1, ties by
/// earliest first-span start, then list order.
const Annotation& select_reference_annotation(const Prediction& pred,
                                              std::span<const Annotation> gts,
                                              NormalizeOptions opts = {});

/// Category of a partial-match prediction against its reference annotation.
/// A prediction without a span is located in the context near the reference.
ErrorCategory classify(const Prediction& pred, const Annotation& ref, std::string_view context);

struct TaxonomyCase {
  Prediction prediction;
  std::vector<Annotation> ground_truths;
  std::string context;
};

struct TaxonomyReport {
  std::array<std::size_t, kAllCategories.size()> counts{};
  std::size_t total = 0;
  /// Inputs that were not partial matches and were left out.
  std::size_t skipped = 0;

  std::size_t count(ErrorCategory c) const { return counts[static_cast<std::size_t>(c)]; }
  double percent(ErrorCategory c) const;

  /// category,count,percent with unrounded percentages.
  std::string to_csv() const;
  /// Aligned table with single-span categories nested under a subtotal.
  std::string to_table() const;
};

TaxonomyReport distribution(std::span<const TaxonomyCase> cases, NormalizeOptions opts = {});

}  // namespace spancorr
