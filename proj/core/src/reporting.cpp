#include "spancorr/reporting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "spancorr/error.hpp"

namespace spancorr {
namespace {

double ratio(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

std::string count_pct(std::size_t n, std::size_t of) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%zu (%.0f%%)", n, 100.0 * ratio(n, of));
  return buf;
}

std::string row3(std::string_view a, std::string_view b, std::string_view c) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-24.*s %-16.*s %-16.*s\n", static_cast<int>(a.size()), a.data(),
                static_cast<int>(b.size()), b.data(), static_cast<int>(c.size()), c.data());
  return buf;
}

void check_same_ids(const PredictionMap& preds, std::span<const MRCExample> gold,
                    std::string_view what) {
  if (preds.size() != gold.size()) {
    throw DataError(std::string(what) + " has " + std::to_string(preds.size()) +
                    " predictions for " + std::to_string(gold.size()) + " gold examples");
  }
  for (const auto& ex : gold) {
    if (!preds.contains(ex.id)) {
      throw DataError(std::string(what) + " has no prediction for id " + ex.id);
    }
  }
}

}  // namespace

std::string ChangeStats::to_table() const {
  std::string out;
  char head[200];
  std::snprintf(head, sizeof head,
                "Altered %zu of %zu reader predictions (%.0f%%); altered = normalized text differs\n",
                changed, total, 100.0 * ratio(changed, total));
  out += head;
  out += row3("R\\R+C", "Correct", "Incorrect");
  out += row3("Correct", count_pct(correct_to_correct, changed),
              count_pct(correct_to_incorrect, changed));
  out += row3("Incorrect", count_pct(incorrect_to_correct, changed),
              count_pct(incorrect_to_incorrect, changed));
  char tail[200];
  std::snprintf(tail, sizeof tail,
                "Incorrect->Incorrect by F1: up %s, down %s, unchanged %s\n",
                count_pct(f1_up, changed).c_str(), count_pct(f1_down, changed).c_str(),
                count_pct(f1_same, changed).c_str());
  out += tail;
  return out;
}

std::string ChangeStats::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "reader,corrected,count,fraction_of_changed\n";
  out << "correct,correct," << correct_to_correct << ',' << ratio(correct_to_correct, changed) << '\n';
  out << "correct,incorrect," << correct_to_incorrect << ',' << ratio(correct_to_incorrect, changed) << '\n';
  out << "incorrect,correct," << incorrect_to_correct << ',' << ratio(incorrect_to_correct, changed) << '\n';
  out << "incorrect,incorrect," << incorrect_to_incorrect << ','
      << ratio(incorrect_to_incorrect, changed) << '\n';
  out << "incorrect,incorrect_f1_up," << f1_up << ',' << ratio(f1_up, changed) << '\n';
  out << "incorrect,incorrect_f1_down," << f1_down << ',' << ratio(f1_down, changed) << '\n';
  out << "incorrect,incorrect_f1_same," << f1_same << ',' << ratio(f1_same, changed) << '\n';
  out << "changed,," << changed << ',' << ratio(changed, total) << '\n';
  out << "total,," << total << ",1\n";
  return out.str();
}

ChangeStats change_stats(const PredictionMap& reader, const PredictionMap& corrector,
                         std::span<const MRCExample> gold, NormalizeOptions opts) {
  check_same_ids(reader, gold, "reader");
  check_same_ids(corrector, gold, "corrector");
  ChangeStats s;
  s.total = gold.size();
  for (const auto& ex : gold) {
    const auto& r = reader.at(ex.id);
    const auto& c = corrector.at(ex.id);
    if (normalize_text(r.text, opts) == normalize_text(c.text, opts)) continue;
    ++s.changed;
    const bool r_ok = exact_match(r.text, ex.ground_truths, opts) == 1;
    const bool c_ok = exact_match(c.text, ex.ground_truths, opts) == 1;
    if (r_ok && c_ok) {
      ++s.correct_to_correct;
    } else if (r_ok) {
      ++s.correct_to_incorrect;
    } else if (c_ok) {
      ++s.incorrect_to_correct;
    } else {
      ++s.incorrect_to_incorrect;
      const double before = f1_max(r.text, ex.ground_truths, opts);
      const double after = f1_max(c.text, ex.ground_truths, opts);
      if (after > before) {
        ++s.f1_up;
      } else if (after < before) {
        ++s.f1_down;
      } else {
        ++s.f1_same;
      }
    }
  }
  return s;
}

std::size_t CategoryCorrectionStats::case_count() const {
  std::size_t n = 0;
  for (auto t : totals) n += t;
  return n;
}

std::string CategoryCorrectionStats::to_table() const {
  const std::size_t all = case_count();
  std::string out = row3("Error class", "Total", "Corrected");
  for (auto c : {ErrorCategory::GTSubsetPred, ErrorCategory::PredSubsetGT,
                 ErrorCategory::PartialOverlap, ErrorCategory::MultiSpanGT,
                 ErrorCategory::UnresolvedTextOverlap}) {
    if (c == ErrorCategory::UnresolvedTextOverlap && total(c) == 0) continue;
    const std::string fixed_cell =
        c == ErrorCategory::MultiSpanGT ? "-" : count_pct(fixed(c), total(c));
    out += row3(display_name(c), count_pct(total(c), all), fixed_cell);
  }
  return out;
}

std::string CategoryCorrectionStats::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "category,total,corrected,corrected_fraction\n";
  for (auto c : kAllCategories) {
    out << to_string(c) << ',' << total(c) << ',';
    if (c == ErrorCategory::MultiSpanGT) {
      out << ",\n";
    } else {
      out << fixed(c) << ',' << ratio(fixed(c), total(c)) << '\n';
    }
  }
  return out.str();
}

CategoryCorrectionStats category_correction_stats(std::span<const CategoryCase> cases,
                                                  const PredictionMap& corrector,
                                                  std::span<const MRCExample> gold,
                                                  NormalizeOptions opts) {
  std::map<std::string, const MRCExample*> index;
  for (const auto& ex : gold) index.emplace(ex.id, &ex);
  CategoryCorrectionStats s;
  for (const auto& c : cases) {
    const auto i = static_cast<std::size_t>(c.category);
    ++s.totals[i];
    if (c.category == ErrorCategory::MultiSpanGT) continue;
    auto ex = index.find(c.example_id);
    auto pred = corrector.find(c.example_id);
    if (ex == index.end()) throw DataError("labelled case for unknown id " + c.example_id);
    if (pred == corrector.end()) continue;
    if (exact_match(pred->second.text, ex->second->ground_truths, opts) == 1) ++s.corrected[i];
  }
  return s;
}

std::vector<CategoryCase> label_partial_matches(const PredictionMap& reader,
                                                std::span<const MRCExample> gold,
                                                NormalizeOptions opts) {
  std::vector<CategoryCase> out;
  for (const auto& ex : gold) {
    auto it = reader.find(ex.id);
    if (it == reader.end()) continue;
    const auto& pred = it->second;
    const int em = exact_match(pred.text, ex.ground_truths, opts);
    const double f1 = f1_max(pred.text, ex.ground_truths, opts);
    if (!is_partial_match(em, f1)) continue;
    const auto& ref = select_reference_annotation(pred, ex.ground_truths, opts);
    ErrorCategory category = ErrorCategory::UnresolvedTextOverlap;
    try {
      category = classify(pred, ref, ex.context);
    } catch (const NotFound&) {
    }
    out.push_back({ex.id, category});
  }
  return out;
}

void LanguageGrid::set(const std::string& q, const std::string& c, double v) {
  if (std::find(question_langs.begin(), question_langs.end(), q) == question_langs.end()) {
    question_langs.push_back(q);
  }
  if (std::find(context_langs.begin(), context_langs.end(), c) == context_langs.end()) {
    context_langs.push_back(c);
  }
  values[{q, c}] = v;
}

double LanguageGrid::at(const std::string& q, const std::string& c) const {
  auto it = values.find({q, c});
  if (it == values.end()) throw DataError("no value for language pair " + q + "/" + c);
  return it->second;
}

DeltaMatrix delta_matrix(const LanguageGrid& baseline, const LanguageGrid& system) {
  if (baseline.values.size() != system.values.size()) {
    throw DataError("baseline and system cover different language pairs");
  }
  for (const auto& [key, v] : baseline.values) {
    if (!system.values.contains(key)) {
      throw DataError("system has no result for " + key.first + "/" + key.second);
    }
  }
  DeltaMatrix m;
  for (const auto& q : baseline.question_langs) {
    for (const auto& c : baseline.context_langs) {
      if (!baseline.values.contains({q, c})) continue;
      m.delta.set(q, c, system.at(q, c) - baseline.at(q, c));
    }
  }
  for (const auto& c : m.delta.context_langs) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& q : m.delta.question_langs) {
      auto it = m.delta.values.find({q, c});
      if (it == m.delta.values.end()) continue;
      sum += it->second;
      ++n;
    }
    m.column_means.push_back(n == 0 ? 0.0 : sum / static_cast<double>(n));
  }
  return m;
}

std::string DeltaMatrix::to_table() const {
  auto cell = [](double v) {
    char buf[32];
    const double shown = std::round(v * 10.0) / 10.0;
    if (shown > 0) {
      std::snprintf(buf, sizeof buf, "+%.1f", shown);
    } else if (shown < 0) {
      std::snprintf(buf, sizeof buf, "-%.1f", -shown);
    } else {
      std::snprintf(buf, sizeof buf, "0.0");
    }
    return std::string(buf);
  };
  auto pad = [](std::string s) {
    s.resize(std::max<std::size_t>(s.size(), 8), ' ');
    return s;
  };
  std::string out = pad("q\\c");
  for (const auto& c : delta.context_langs) out += pad(c);
  out += '\n';
  for (const auto& q : delta.question_langs) {
    out += pad(q);
    for (const auto& c : delta.context_langs) {
      auto it = delta.values.find({q, c});
      out += pad(it == delta.values.end() ? "" : cell(it->second));
    }
    out += '\n';
  }
  out += pad("AVG");
  for (double v : column_means) out += pad(cell(v));
  out += '\n';
  return out;
}

std::string DeltaMatrix::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "question_lang,context_lang,delta\n";
  for (const auto& q : delta.question_langs) {
    for (const auto& c : delta.context_langs) {
      auto it = delta.values.find({q, c});
      if (it != delta.values.end()) out << q << ',' << c << ',' << it->second << '\n';
    }
  }
  for (std::size_t i = 0; i < delta.context_langs.size(); ++i) {
    out << "AVG," << delta.context_langs[i] << ',' << column_means[i] << '\n';
  }
  return out.str();
}

std::vector<double> per_example_em(const PredictionMap& predictions,
                                   std::span<const MRCExample> gold, NormalizeOptions opts) {
  std::vector<double> out;
  out.reserve(gold.size());
  for (const auto& ex : gold) {
    auto it = predictions.find(ex.id);
    out.push_back(it == predictions.end()
                      ? 0.0
                      : static_cast<double>(exact_match(it->second.text, ex.ground_truths, opts)));
  }
  return out;
}

EvalSummary evaluate(const PredictionMap& predictions, std::span<const MRCExample> gold,
                     NormalizeOptions opts) {
  EvalSummary s;
  s.count = gold.size();
  if (gold.empty()) return s;
  double em = 0.0;
  double f1 = 0.0;
  for (const auto& ex : gold) {
    auto it = predictions.find(ex.id);
    if (it == predictions.end()) continue;
    em += exact_match(it->second.text, ex.ground_truths, opts);
    f1 += f1_max(it->second.text, ex.ground_truths, opts);
  }
  s.exact_match = 100.0 * em / static_cast<double>(gold.size());
  s.f1 = 100.0 * f1 / static_cast<double>(gold.size());
  return s;
}

std::string em_table(std::span<const std::pair<std::string, double>> rows) {
  std::size_t width = 5;
  for (const auto& [name, em] : rows) width = std::max(width, name.size());
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-*s  %6s\n", static_cast<int>(width), "Model", "EM");
  out += buf;
  for (const auto& [name, em] : rows) {
    std::snprintf(buf, sizeof buf, "%-*s  %6.1f\n", static_cast<int>(width), name.c_str(), em);
    out += buf;
  }
  return out;
}

}  // namespace spancorr
