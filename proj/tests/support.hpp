#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "spancorr/span.hpp"

namespace spancorr::testing {

/// Example whose single gold span is the first occurrence of `answer`.
inline MRCExample example_with_answer(std::string id, std::string question, std::string context,
                                      std::string_view answer) {
  const auto at = context.find(answer);
  if (at == std::string::npos) throw std::logic_error("fixture answer not in context");
  MRCExample ex{std::move(id), std::move(question), std::move(context), {}};
  ex.ground_truths.push_back(Annotation::single({at, at + answer.size()}, ex.context));
  return ex;
}

/// Prediction at the first occurrence of `text` in `context`.
inline Prediction prediction_at(const std::string& id, std::string_view context,
                                std::string_view text, double score = 0.0) {
  const auto at = context.find(text);
  if (at == std::string::npos) throw std::logic_error("fixture prediction not in context");
  return {id, std::string(text), CharSpan(at, at + text.size()), score};
}

}  // namespace spancorr::testing
