#include "spancorr/taxonomy.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "spancorr/error.hpp"

namespace spancorr {

std::string_view to_string(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::MultiSpanGT: return "MultiSpanGT";
    case ErrorCategory::PredSubsetGT: return "PredSubsetGT";
    case ErrorCategory::GTSubsetPred: return "GTSubsetPred";
    case ErrorCategory::PartialOverlap: return "PartialOverlap";
    case ErrorCategory::UnresolvedTextOverlap: return "UnresolvedTextOverlap";
  }
  return "?";
}

std::string_view display_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::MultiSpanGT: return "Multi-Span GT";
    case ErrorCategory::PredSubsetGT: return "Prediction in GT";
    case ErrorCategory::GTSubsetPred: return "GT in Prediction";
    case ErrorCategory::PartialOverlap: return "Prediction overlaps GT";
    case ErrorCategory::UnresolvedTextOverlap: return "Unresolved text overlap";
  }
  return "?";
}

ErrorCategory parse_category(std::string_view name) {
  for (auto c : kAllCategories) {
    if (to_string(c) == name) return c;
  }
  throw DataError("unknown error category '" + std::string(name) + "'");
}

bool is_partial_match(int em, double f1) { return em == 0 && f1 > 0.0; }

const Annotation& select_reference_annotation(const Prediction& pred,
                                              std::span<const Annotation> gts,
                                              NormalizeOptions opts) {
  if (gts.empty()) throw std::invalid_argument("select_reference_annotation: no annotations");
  std::size_t best = 0;
  double best_f1 = token_f1(pred.text, gts[0].text(), opts);
  for (std::size_t i = 1; i < gts.size(); ++i) {
    const double f1 = token_f1(pred.text, gts[i].text(), opts);
    if (f1 > best_f1 ||
        (f1 == best_f1 && gts[i].first().span.start() < gts[best].first().span.start())) {
      best = i;
      best_f1 = f1;
    }
  }
  return gts[best];
}

ErrorCategory classify(const Prediction& pred, const Annotation& ref, std::string_view context) {
  if (ref.is_multi_span()) return ErrorCategory::MultiSpanGT;
  const CharSpan& gt = ref.first().span;
  const CharSpan span = pred.span ? *pred.span : locate(pred.text, context, gt);
  switch (relation(span, gt)) {
    case SpanRelation::BContainsA: return ErrorCategory::PredSubsetGT;
    case SpanRelation::AContainsB: return ErrorCategory::GTSubsetPred;
    case SpanRelation::Overlap: return ErrorCategory::PartialOverlap;
    case SpanRelation::Equal:
    case SpanRelation::Disjoint: return ErrorCategory::UnresolvedTextOverlap;
  }
  return ErrorCategory::UnresolvedTextOverlap;
}

double TaxonomyReport::percent(ErrorCategory c) const {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(count(c)) / static_cast<double>(total);
}

std::string TaxonomyReport::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "category,count,percent\n";
  for (auto c : kAllCategories) {
    out << to_string(c) << ',' << count(c) << ',' << percent(c) << '\n';
  }
  out << "Total," << total << ',' << (total == 0 ? 0.0 : 100.0) << '\n';
  return out.str();
}

std::string TaxonomyReport::to_table() const {
  auto line = [](std::string_view label, std::size_t n, double pct) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-28.*s %6zu %5.0f\n", static_cast<int>(label.size()),
                  label.data(), n, pct);
    return std::string(buf);
  };
  const std::size_t single = count(ErrorCategory::PredSubsetGT) +
                             count(ErrorCategory::GTSubsetPred) +
                             count(ErrorCategory::PartialOverlap);
  const double single_pct =
      total == 0 ? 0.0 : 100.0 * static_cast<double>(single) / static_cast<double>(total);
  std::string out;
  out += "Error                         Count     %\n";
  out += "----------------------------------------\n";
  out += line("Single-Span GT", single, single_pct);
  for (auto c : {ErrorCategory::PredSubsetGT, ErrorCategory::GTSubsetPred,
                 ErrorCategory::PartialOverlap}) {
    out += line("  " + std::string(display_name(c)), count(c), percent(c));
  }
  out += "----------------------------------------\n";
  out += line(display_name(ErrorCategory::MultiSpanGT), count(ErrorCategory::MultiSpanGT),
              percent(ErrorCategory::MultiSpanGT));
  if (count(ErrorCategory::UnresolvedTextOverlap) > 0) {
    out += line(display_name(ErrorCategory::UnresolvedTextOverlap),
                count(ErrorCategory::UnresolvedTextOverlap),
                percent(ErrorCategory::UnresolvedTextOverlap));
  }
  out += "----------------------------------------\n";
  out += line("Total partial matches", total, total == 0 ? 0.0 : 100.0);
  return out;
}

TaxonomyReport distribution(std::span<const TaxonomyCase> cases, NormalizeOptions opts) {
  TaxonomyReport report;
  for (const auto& c : cases) {
    const int em = exact_match(c.prediction.text, c.ground_truths, opts);
    const double f1 = f1_max(c.prediction.text, c.ground_truths, opts);
    if (!is_partial_match(em, f1)) {
      ++report.skipped;
      continue;
    }
    const auto& ref = select_reference_annotation(c.prediction, c.ground_truths, opts);
    ErrorCategory category = ErrorCategory::UnresolvedTextOverlap;
    try {
      category = classify(c.prediction, ref, c.context);
    } catch (const NotFound&) {
      // prediction text absent from the context: nothing to relate spans to
    }
    ++report.counts[static_cast<std::size_t>(category)];
    ++report.total;
  }
  return report;
}

}  // namespace spancorr
