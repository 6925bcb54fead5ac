#include "spancorr/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <stdexcept>

#include "spancorr/error.hpp"

namespace spancorr {
namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

bool is_article(std::string_view w) { return w == "a" || w == "an" || w == "the"; }

}  // namespace

std::vector<std::string> normalized_tokens(std::string_view s, NormalizeOptions opts) {
  std::vector<std::string> tokens;
  std::string current;
  auto flush = [&] {
    if (current.empty()) return;
    if (!(opts.strip_articles && is_article(current))) tokens.push_back(current);
    current.clear();
  };
  for (char c : s) {
    if (is_space(c)) {
      flush();
    } else if (!is_punct(c)) {
      current += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    }
  }
  flush();
  return tokens;
}

std::string normalize_text(std::string_view s, NormalizeOptions opts) {
  std::string out;
  for (const auto& t : normalized_tokens(s, opts)) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

int exact_match(std::string_view pred, std::span<const std::string> gts, NormalizeOptions opts) {
  if (gts.empty()) throw std::invalid_argument("exact_match: empty gold list");
  const std::string p = normalize_text(pred, opts);
  for (const auto& g : gts) {
    if (normalize_text(g, opts) == p) return 1;
  }
  return 0;
}

int exact_match(std::string_view pred, std::span<const Annotation> annotations,
                NormalizeOptions opts) {
  if (annotations.empty()) throw std::invalid_argument("exact_match: empty annotation list");
  std::vector<std::string> texts;
  for (const auto& a : annotations) texts.push_back(a.text());
  return exact_match(pred, texts, opts);
}

double token_f1(std::string_view pred, std::string_view gt, NormalizeOptions opts) {
  const auto p = normalized_tokens(pred, opts);
  const auto g = normalized_tokens(gt, opts);
  if (p.empty() || g.empty()) return (p.empty() && g.empty()) ? 1.0 : 0.0;
  std::map<std::string, int> counts;
  for (const auto& t : g) ++counts[t];
  int overlap = 0;
  for (const auto& t : p) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++overlap;
    }
  }
  if (overlap == 0) return 0.0;
  const double precision = static_cast<double>(overlap) / static_cast<double>(p.size());
  const double recall = static_cast<double>(overlap) / static_cast<double>(g.size());
  return 2.0 * precision * recall / (precision + recall);
}

double f1_max(std::string_view pred, std::span<const Annotation> annotations,
              NormalizeOptions opts) {
  if (annotations.empty()) throw std::invalid_argument("f1_max: empty annotation list");
  double best = 0.0;
  for (const auto& a : annotations) best = std::max(best, token_f1(pred, a.text(), opts));
  return best;
}

CharSpan locate(std::string_view text, std::string_view context, std::optional<CharSpan> hint) {
  if (text.empty()) throw NotFound("cannot locate an empty string");
  std::optional<std::size_t> best;
  std::size_t best_distance = 0;
  for (auto pos = context.find(text); pos != std::string_view::npos;
       pos = context.find(text, pos + 1)) {
    if (!hint) {
      best = pos;
      break;
    }
    const std::size_t h = hint->start();
    const std::size_t distance = pos > h ? pos - h : h - pos;
    if (!best || distance < best_distance) {
      best = pos;
      best_distance = distance;
    }
  }
  if (!best) throw NotFound("text '" + std::string(text) + "' not found in context");
  return {*best, *best + text.size()};
}

}  // namespace spancorr
