#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spancorr/metrics.hpp"
#include "spancorr/pipeline.hpp"
#include "spancorr/taxonomy.hpp"

namespace spancorr {

/// Outcomes of the predictions the corrector altered (normalized text differs).
struct ChangeStats {
  std::size_t correct_to_correct = 0;
  std::size_t correct_to_incorrect = 0;
  std::size_t incorrect_to_correct = 0;
  std::size_t incorrect_to_incorrect = 0;
  /// Split of incorrect_to_incorrect by F1 movement.
  std::size_t f1_up = 0;
  std::size_t f1_down = 0;
  std::size_t f1_same = 0;
  std::size_t changed = 0;
  std::size_t total = 0;

  std::string to_table() const;
  std::string to_csv() const;
};

/// Throws DataError unless reader, corrector and gold share one id set.
ChangeStats change_stats(const PredictionMap& reader, const PredictionMap& corrector,
                         std::span<const MRCExample> gold, NormalizeOptions opts = {});

struct CategoryCase {
  std::string example_id;
  ErrorCategory category;
};

struct CategoryCorrectionStats {
  std::array<std::size_t, kAllCategories.size()> totals{};
  std::array<std::size_t, kAllCategories.size()> corrected{};

  std::size_t total(ErrorCategory c) const { return totals[static_cast<std::size_t>(c)]; }
  std::size_t fixed(ErrorCategory c) const { return corrected[static_cast<std::size_t>(c)]; }
  std::size_t case_count() const;

  /// Multi-span rows print "-" for corrected.
  std::string to_table() const;
  std::string to_csv() const;
};

/// Counts, per labelled partial-match case, whether the corrector output reaches EM = 1.
CategoryCorrectionStats category_correction_stats(std::span<const CategoryCase> cases,
                                                  const PredictionMap& corrector,
                                                  std::span<const MRCExample> gold,
                                                  NormalizeOptions opts = {});

/// Labels every partial-match reader prediction with its error category.
std::vector<CategoryCase> label_partial_matches(const PredictionMap& reader,
                                                std::span<const MRCExample> gold,
                                                NormalizeOptions opts = {});

/// Scores keyed by (question language, context language), with row and
/// column order kept as first seen.
struct LanguageGrid {
  std::vector<std::string> question_langs;
  std::vector<std::string> context_langs;
  std::map<std::pair<std::string, std::string>, double> values;

  void set(const std::string& q, const std::string& c, double v);
  double at(const std::string& q, const std::string& c) const;
};

struct DeltaMatrix {
  LanguageGrid delta;
  /// Mean over question languages for each context language, unrounded.
  std::vector<double> column_means;

  /// One-decimal display with up/down markers, "q\c" header, AVG row.
  std::string to_table() const;
  std::string to_csv() const;
};

/// system - baseline per cell. Throws DataError when key sets differ.
DeltaMatrix delta_matrix(const LanguageGrid& baseline, const LanguageGrid& system);

struct EvalSummary {
  std::size_t count = 0;
  double exact_match = 0.0;  // percent
  double f1 = 0.0;           // percent
};

/// EM and F1 in percent over gold examples; missing predictions score zero.
EvalSummary evaluate(const PredictionMap& predictions, std::span<const MRCExample> gold,
                     NormalizeOptions opts = {});

/// Per-example EM in gold order; missing predictions score zero.
std::vector<double> per_example_em(const PredictionMap& predictions,
                                   std::span<const MRCExample> gold, NormalizeOptions opts = {});

/// Two-column "Model | EM" table in the order given.
std::string em_table(std::span<const std::pair<std::string, double>> rows);

}  // namespace spancorr
