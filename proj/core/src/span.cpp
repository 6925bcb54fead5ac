#include "spancorr/span.hpp"

#include <stdexcept>
#include <unordered_set>

#include "spancorr/error.hpp"

namespace spancorr {

CharSpan::CharSpan(std::size_t start, std::size_t end) : start_(start), end_(end) {
  if (start >= end) {
    throw std::invalid_argument("empty or inverted span [" + std::to_string(start) + ", " +
                                std::to_string(end) + ")");
  }
}

SpanRelation relation(const CharSpan& a, const CharSpan& b) {
  if (a == b) return SpanRelation::Equal;
  if (a.contains(b)) return SpanRelation::AContainsB;
  if (b.contains(a)) return SpanRelation::BContainsA;
  if (a.intersects(b)) return SpanRelation::Overlap;
  return SpanRelation::Disjoint;
}

std::string_view to_string(SpanRelation r) {
  switch (r) {
    case SpanRelation::Equal: return "Equal";
    case SpanRelation::AContainsB: return "AContainsB";
    case SpanRelation::BContainsA: return "BContainsA";
    case SpanRelation::Overlap: return "Overlap";
    case SpanRelation::Disjoint: return "Disjoint";
  }
  return "?";
}

Annotation::Annotation(std::vector<AnnotatedSpan> spans, std::string_view context)
    : spans_(std::move(spans)) {
  if (spans_.empty()) throw DataError("annotation has no spans");
  for (std::size_t i = 0; i < spans_.size(); ++i) {
    const auto& s = spans_[i];
    if (s.span.end() > context.size()) {
      throw DataError("annotation span [" + std::to_string(s.span.start()) + ", " +
                      std::to_string(s.span.end()) + ") exceeds context");
    }
    if (s.span.in(context) != s.text) {
      throw DataError("annotation text '" + s.text + "' does not match context at offset " +
                      std::to_string(s.span.start()));
    }
    if (i > 0 && spans_[i - 1].span.end() > s.span.start()) {
      throw DataError("annotation spans unsorted or overlapping");
    }
  }
}

Annotation Annotation::single(const CharSpan& span, std::string_view context) {
  if (span.end() > context.size()) throw DataError("annotation span exceeds context");
  return Annotation({{span, std::string(span.in(context))}}, context);
}

Annotation Annotation::from_spans(std::span<const CharSpan> spans, std::string_view context) {
  std::vector<AnnotatedSpan> parts;
  for (const auto& s : spans) {
    if (s.end() > context.size()) throw DataError("annotation span exceeds context");
    parts.push_back({s, std::string(s.in(context))});
  }
  return Annotation(std::move(parts), context);
}

std::string Annotation::text() const {
  std::string out;
  for (const auto& s : spans_) {
    if (!out.empty()) out += ' ';
    out += s.text;
  }
  return out;
}

std::vector<std::string> MRCExample::gt_texts() const {
  std::vector<std::string> out;
  out.reserve(ground_truths.size());
  for (const auto& a : ground_truths) out.push_back(a.text());
  return out;
}

const Annotation* MRCExample::first_single_span() const {
  for (const auto& a : ground_truths) {
    if (!a.is_multi_span()) return &a;
  }
  return nullptr;
}

void validate(const MRCExample& example) {
  if (example.id.empty()) throw DataError("example with empty id");
  if (example.ground_truths.empty()) {
    throw DataError("example " + example.id + " has no ground-truth annotation");
  }
  for (const auto& a : example.ground_truths) {
    if (a.spans().empty()) throw DataError("example " + example.id + " has an empty annotation");
    for (const auto& s : a.spans()) {
      if (s.span.end() > example.context.size() || s.span.in(example.context) != s.text) {
        throw DataError("example " + example.id + ": annotation does not match context");
      }
    }
  }
}

void validate(std::span<const MRCExample> dataset) {
  std::unordered_set<std::string> ids;
  for (const auto& ex : dataset) {
    validate(ex);
    if (!ids.insert(ex.id).second) throw DataError("duplicate example id " + ex.id);
  }
}

}  // namespace spancorr
