#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spancorr/datagen.hpp"
#include "spancorr/pipeline.hpp"
#include "spancorr/span.hpp"
#include "spancorr/taxonomy.hpp"

namespace spancorr {

enum class TemplateKind { ListAnswer, QualifiedAnswer, PlainEntity };

std::string_view to_string(TemplateKind k);

struct SynthConfig {
  std::size_t n_examples = 2000;
  std::uint64_t seed = 1;
  /// Ids are "<prefix>-<zero padded index>".
  std::string id_prefix = "ex";
  /// Mix weights for list-answer, qualified-answer and plain-entity templates.
  std::array<double, 3> weights = {1.0, 1.0, 1.0};
  /// Fraction of list answers annotated as one span per item.
  double multi_span_fraction = 0.5;
  /// Distractor fact sentences per context.
  int min_distractors = 1;
  int max_distractors = 3;
  /// Filler sentences per context.
  int min_filler = 0;
  int max_filler = 2;

  std::vector<std::string> given_names;
  std::vector<std::string> family_names;
  std::vector<std::string> teams;
  std::vector<std::string> events;
  std::vector<std::string> roles;
  std::vector<std::string> places;

  /// Config with the built-in vocabulary pools.
  static SynthConfig defaults();
  /// Throws ConfigError on bad weights, ranges or empty pools.
  void validate() const;
};

struct SynthCorpus {
  std::vector<MRCExample> examples;
  std::vector<TemplateKind> kinds;  // aligned with examples
};

SynthCorpus gen_corpus(const SynthConfig& config);

/// Rates of the injected error categories; must sum to 1.
struct CategoryRates {
  double pred_subset_gt = 0.33;
  double gt_subset_pred = 0.28;
  double partial_overlap = 0.06;
  double multi_span_gt = 0.33;

  double rate(ErrorCategory c) const;
};

struct ErrorInjectionConfig {
  /// Fraction of examples whose top prediction is deformed.
  double partial_rate = 0.4;
  CategoryRates rates;
  std::uint64_t seed = 7;
  std::size_t nbest_size = 5;

  void validate() const;
};

struct InjectionSummary {
  std::size_t examples = 0;
  std::size_t injected = 0;
  std::map<ErrorCategory, std::size_t> per_category;
  /// Quota moved to another category because no example could realize it.
  std::size_t resampled = 0;
  /// Quota left uninjected because no example could realize any category.
  std::size_t unsatisfied = 0;
};

struct FlawedReaderOutput {
  PredictionMap predictions;
  NBestMap nbest;
  /// Injected category per id; empty for exact predictions.
  std::map<std::string, std::optional<ErrorCategory>> labels;
  InjectionSummary summary;
};

/// Simulated reader: emits the gold span for most examples and deforms the
/// rest into the configured partial-match categories. Category counts follow
/// the configured rates by quota over a seeded shuffle.
FlawedReaderOutput flawed_reader(std::span<const MRCExample> examples,
                                 const ErrorInjectionConfig& config);

/// Runs the simulator separately on each holdout of `plan`, with a seed
/// derived per fold, and merges the results. Examples outside the plan are
/// rejected with DataError.
FlawedReaderOutput flawed_reader_by_fold(std::span<const MRCExample> examples,
                                         const FoldPlan& plan,
                                         const ErrorInjectionConfig& config);

}  // namespace spancorr
