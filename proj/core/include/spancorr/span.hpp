#pragma once

#include <compare>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spancorr {

/// Half-open byte interval [start, end) into a context string. Never empty.
class CharSpan {
 public:
  CharSpan() = default;
  /// Throws std::invalid_argument unless start < end.
  CharSpan(std::size_t start, std::size_t end);

  std::size_t start() const { return start_; }
  std::size_t end() const { return end_; }
  std::size_t length() const { return end_ - start_; }

  bool contains(const CharSpan& other) const {
    return start_ <= other.start_ && other.end_ <= end_;
  }
  bool intersects(const CharSpan& other) const {
    return start_ < other.end_ && other.start_ < end_;
  }
  CharSpan shifted(std::size_t offset) const { return {start_ + offset, end_ + offset}; }

  std::string_view in(std::string_view context) const {
    return context.substr(start_, end_ - start_);
  }

  friend auto operator<=>(const CharSpan&, const CharSpan&) = default;

 private:
  std::size_t start_ = 0;
  std::size_t end_ = 1;
};

enum class SpanRelation { Equal, AContainsB, BContainsA, Overlap, Disjoint };

/// Exactly one relation holds for every pair of spans.
SpanRelation relation(const CharSpan& a, const CharSpan& b);

std::string_view to_string(SpanRelation r);

struct AnnotatedSpan {
  CharSpan span;
  std::string text;

  friend bool operator==(const AnnotatedSpan&, const AnnotatedSpan&) = default;
};

/// One gold answer; several spans make it a multi-span answer.
class Annotation {
 public:
  Annotation() = default;
  /// Validates ordering, disjointness and that every text matches the context.
  Annotation(std::vector<AnnotatedSpan> spans, std::string_view context);

  static Annotation single(const CharSpan& span, std::string_view context);
  static Annotation from_spans(std::span<const CharSpan> spans, std::string_view context);

  const std::vector<AnnotatedSpan>& spans() const { return spans_; }
  const AnnotatedSpan& first() const { return spans_.front(); }
  bool is_multi_span() const { return spans_.size() > 1; }

  /// Span texts joined by single spaces, in span order. Used for scoring.
  std::string text() const;

  friend bool operator==(const Annotation&, const Annotation&) = default;

 private:
  std::vector<AnnotatedSpan> spans_;
};

struct MRCExample {
  std::string id;
  std::string question;
  std::string context;
  std::vector<Annotation> ground_truths;

  /// Surface texts of all annotations, in list order.
  std::vector<std::string> gt_texts() const;
  /// First annotation with a single span, if any.
  const Annotation* first_single_span() const;
};

/// Throws DataError when the example violates its invariants.
void validate(const MRCExample& example);
/// Validates every example and id uniqueness.
void validate(std::span<const MRCExample> dataset);

struct Prediction {
  std::string example_id;
  std::string text;
  std::optional<CharSpan> span;
  double score = 0.0;

  friend bool operator==(const Prediction&, const Prediction&) = default;
};

using NBestList = std::vector<Prediction>;

}  // namespace spancorr
