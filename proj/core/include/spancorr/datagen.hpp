#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "spancorr/encode.hpp"
#include "spancorr/metrics.hpp"
#include "spancorr/span.hpp"

namespace spancorr {

/// Assignment of example ids to cross-validation folds.
struct FoldPlan {
  int n_folds = 0;
  std::uint64_t seed = 0;
  std::map<std::string, int> assignments;
  /// holdouts[f] lists fold f's ids in shuffled order.
  std::vector<std::vector<std::string>> holdouts;

  const std::vector<std::string>& holdout_ids(int fold) const { return holdouts.at(fold); }
  /// All ids outside fold f, in shuffled order.
  std::vector<std::string> train_ids(int fold) const;
};

/// Seeded shuffle followed by round-robin fold assignment.
/// Throws ConfigError if n_folds < 2 or exceeds the number of ids, DataError on duplicates.
FoldPlan make_fold_plan(std::span<const std::string> ids, int n_folds, std::uint64_t seed);

/// Inserts `delimiter` before span.begin and after span.end - 1. The span
/// must be non-empty and lie inside `context_segment`.
std::vector<int> insert_delimiters(std::span<const int> tokens, TokenRange span, int delimiter,
                                   TokenRange context_segment);

/// Drops every occurrence of `delimiter`.
std::vector<int> remove_delimiters(std::span<const int> tokens, int delimiter);

/// One corrector training instance. Spans are in source-context coordinates.
struct CorrectorExample {
  std::string source_example_id;
  CharSpan marked_span;
  CharSpan target_span;
  bool is_identity = false;
  /// Reader score of the marked prediction; unused for identity records.
  double score = 0.0;
};

struct GenerationSummary {
  std::size_t examples = 0;
  std::size_t usable = 0;
  std::size_t skipped_multi_span = 0;
  std::size_t identity = 0;
  std::size_t corrections = 0;
  std::size_t duplicate_texts = 0;
  std::size_t unresolved_predictions = 0;

  GenerationSummary& operator+=(const GenerationSummary& o);
};

/// One identity example delimiting the first single-span annotation, plus
/// one correction example for each of the k best distinct incorrect n-best
/// entries. Examples with only multi-span annotations yield nothing.
/// The n-best list must be sorted by non-increasing score.
std::vector<CorrectorExample> build_corrector_examples(const MRCExample& example,
                                                       std::span<const Prediction> nbest, int k,
                                                       GenerationSummary* summary = nullptr,
                                                       NormalizeOptions opts = {});

/// Canonical file order: source id, identity first, then score descending.
void sort_corrector_examples(std::vector<CorrectorExample>& examples);

}  // namespace spancorr
