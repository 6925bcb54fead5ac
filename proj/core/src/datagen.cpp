#include "spancorr/datagen.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

#include "spancorr/error.hpp"
#include "spancorr/rng.hpp"

namespace spancorr {

std::vector<std::string> FoldPlan::train_ids(int fold) const {
  std::vector<std::string> out;
  for (int f = 0; f < n_folds; ++f) {
    if (f == fold) continue;
    out.insert(out.end(), holdouts[f].begin(), holdouts[f].end());
  }
  return out;
}

FoldPlan make_fold_plan(std::span<const std::string> ids, int n_folds, std::uint64_t seed) {
  if (n_folds < 2) throw ConfigError("need at least 2 folds, got " + std::to_string(n_folds));
  if (static_cast<std::size_t>(n_folds) > ids.size()) {
    throw ConfigError(std::to_string(n_folds) + " folds requested for " +
                      std::to_string(ids.size()) + " examples");
  }
  std::vector<std::string> order(ids.begin(), ids.end());
  // Sort first so the plan depends on the id set, not on corpus order.
  std::sort(order.begin(), order.end());
  if (std::adjacent_find(order.begin(), order.end()) != order.end()) {
    throw DataError("duplicate example id in fold plan input");
  }
  Rng rng(derive_seed(seed, {0xF01D}));
  shuffle(order, rng);

  FoldPlan plan;
  plan.n_folds = n_folds;
  plan.seed = seed;
  plan.holdouts.resize(static_cast<std::size_t>(n_folds));
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int fold = static_cast<int>(i % static_cast<std::size_t>(n_folds));
    plan.assignments[order[i]] = fold;
    plan.holdouts[static_cast<std::size_t>(fold)].push_back(order[i]);
  }
  return plan;
}

std::vector<int> insert_delimiters(std::span<const int> tokens, TokenRange span, int delimiter,
                                   TokenRange context_segment) {
  if (span.begin >= span.end || span.end > tokens.size()) {
    throw std::out_of_range("delimited range out of bounds");
  }
  if (context_segment.end > tokens.size() || span.begin < context_segment.begin ||
      span.end > context_segment.end) {
    throw std::out_of_range("delimited range crosses the context segment boundary");
  }
  std::vector<int> out;
  out.reserve(tokens.size() + 2);
  out.insert(out.end(), tokens.begin(), tokens.begin() + static_cast<std::ptrdiff_t>(span.begin));
  out.push_back(delimiter);
  out.insert(out.end(), tokens.begin() + static_cast<std::ptrdiff_t>(span.begin),
             tokens.begin() + static_cast<std::ptrdiff_t>(span.end));
  out.push_back(delimiter);
  out.insert(out.end(), tokens.begin() + static_cast<std::ptrdiff_t>(span.end), tokens.end());
  return out;
}

std::vector<int> remove_delimiters(std::span<const int> tokens, int delimiter) {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (int t : tokens) {
    if (t != delimiter) out.push_back(t);
  }
  return out;
}

GenerationSummary& GenerationSummary::operator+=(const GenerationSummary& o) {
  examples += o.examples;
  usable += o.usable;
  skipped_multi_span += o.skipped_multi_span;
  identity += o.identity;
  corrections += o.corrections;
  duplicate_texts += o.duplicate_texts;
  unresolved_predictions += o.unresolved_predictions;
  return *this;
}

std::vector<CorrectorExample> build_corrector_examples(const MRCExample& example,
                                                       std::span<const Prediction> nbest, int k,
                                                       GenerationSummary* summary,
                                                       NormalizeOptions opts) {
  if (k < 0) throw std::invalid_argument("k must be non-negative");
  for (std::size_t i = 1; i < nbest.size(); ++i) {
    if (nbest[i].score > nbest[i - 1].score) {
      throw DataError("n-best list for " + example.id + " is not sorted by score");
    }
  }
  GenerationSummary local;
  ++local.examples;
  std::vector<CorrectorExample> out;

  const Annotation* target = example.first_single_span();
  if (target == nullptr) {
    ++local.skipped_multi_span;
    if (summary) *summary += local;
    return out;
  }
  ++local.usable;
  const CharSpan gt = target->first().span;
  out.push_back({example.id, gt, gt, true, 0.0});
  ++local.identity;

  const auto gt_texts = example.gt_texts();
  std::set<std::string> seen;
  for (const auto& entry : nbest) {
    if (static_cast<int>(out.size()) - 1 >= k) break;
    if (entry.text.empty() || exact_match(entry.text, gt_texts, opts) == 1) continue;
    if (!seen.insert(normalize_text(entry.text, opts)).second) {
      ++local.duplicate_texts;
      continue;
    }
    CharSpan marked;
    try {
      marked = entry.span ? *entry.span : locate(entry.text, example.context, gt);
    } catch (const NotFound&) {
      ++local.unresolved_predictions;
      continue;
    }
    if (marked.end() > example.context.size()) {
      ++local.unresolved_predictions;
      continue;
    }
    out.push_back({example.id, marked, gt, false, entry.score});
    ++local.corrections;
  }
  if (summary) *summary += local;
  return out;
}

void sort_corrector_examples(std::vector<CorrectorExample>& examples) {
  std::stable_sort(examples.begin(), examples.end(),
                   [](const CorrectorExample& a, const CorrectorExample& b) {
                     if (a.source_example_id != b.source_example_id) {
                       return a.source_example_id < b.source_example_id;
                     }
                     if (a.is_identity != b.is_identity) return a.is_identity;
                     if (a.score != b.score) return a.score > b.score;
                     return a.marked_span < b.marked_span;
                   });
}

}  // namespace spancorr
