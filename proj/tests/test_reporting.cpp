#include <gtest/gtest.h>

#include <tuple>

#include "spancorr/error.hpp"
#include "spancorr/reporting.hpp"
#include "support.hpp"

using namespace spancorr;
using spancorr::testing::example_with_answer;
using spancorr::testing::prediction_at;

namespace {

const std::string kContext = "The prize went to Ada Lovelace of London after a long final .";

std::vector<MRCExample> gold(int n) {
  std::vector<MRCExample> out;
  for (int i = 0; i < n; ++i) {
    out.push_back(example_with_answer("g" + std::to_string(i), "who won", kContext, "Ada Lovelace"));
  }
  return out;
}

PredictionMap all_say(const std::vector<MRCExample>& examples, const std::string& text) {
  PredictionMap out;
  for (const auto& ex : examples) out.emplace(ex.id, prediction_at(ex.id, ex.context, text));
  return out;
}

LanguageGrid grid(std::initializer_list<std::tuple<const char*, const char*, double>> cells) {
  LanguageGrid g;
  for (const auto& [q, c, v] : cells) g.set(q, c, v);
  return g;
}

}  // namespace

TEST(ChangeStats, NothingChanged) {
  const auto g = gold(5);
  const auto r = all_say(g, "Ada");
  const auto s = change_stats(r, r, g);
  EXPECT_EQ(s.changed, 0u);
  EXPECT_EQ(s.total, 5u);
  EXPECT_EQ(s.correct_to_correct + s.correct_to_incorrect + s.incorrect_to_correct +
                s.incorrect_to_incorrect,
            0u);
}

TEST(ChangeStats, PlantedFixes) {
  const auto g = gold(20);
  auto reader = all_say(g, "Ada");
  auto corrected = reader;
  for (int i = 0; i < 10; ++i) {
    const auto id = "g" + std::to_string(i);
    corrected[id] = prediction_at(id, kContext, "Ada Lovelace");
  }
  corrected["g10"] = prediction_at("g10", kContext, "Ada Lovelace of London");
  corrected["g11"] = prediction_at("g11", kContext, "prize");
  const auto s = change_stats(reader, corrected, g);
  EXPECT_EQ(s.changed, 12u);
  EXPECT_EQ(s.incorrect_to_correct, 10u);
  EXPECT_EQ(s.incorrect_to_incorrect, 2u);
  EXPECT_EQ(s.f1_up, 0u);
  EXPECT_EQ(s.f1_down, 1u);
  EXPECT_EQ(s.f1_same, 1u);
  EXPECT_EQ(s.correct_to_correct, 0u);
  EXPECT_NE(s.to_table().find("Altered 12 of 20"), std::string::npos);
  EXPECT_NE(s.to_csv().find("incorrect,correct,10,"), std::string::npos);
}

TEST(ChangeStats, WhitespaceOnlyEditIsNotAChange) {
  const auto g = gold(1);
  const auto r = all_say(g, "Ada Lovelace");
  auto c = r;
  c["g0"].text = "ada  lovelace";
  EXPECT_EQ(change_stats(r, c, g).changed, 0u);
}

TEST(ChangeStats, RejectsMismatchedIds) {
  const auto g = gold(3);
  auto r = all_say(g, "Ada");
  auto c = r;
  c.erase("g1");
  EXPECT_THROW(change_stats(r, c, g), DataError);
}

TEST(CategoryStats, IdentityCorrectsNothing) {
  const auto g = gold(6);
  const auto reader = all_say(g, "Ada");
  const auto cases = label_partial_matches(reader, g);
  ASSERT_EQ(cases.size(), 6u);
  for (const auto& c : cases) EXPECT_EQ(c.category, ErrorCategory::PredSubsetGT);
  const auto s = category_correction_stats(cases, reader, g);
  EXPECT_EQ(s.total(ErrorCategory::PredSubsetGT), 6u);
  EXPECT_EQ(s.fixed(ErrorCategory::PredSubsetGT), 0u);
  EXPECT_EQ(s.case_count(), 6u);
}

TEST(CategoryStats, AllVerboseCasesFixed) {
  const auto g = gold(4);
  const auto reader = all_say(g, "Ada Lovelace of London");
  const auto cases = label_partial_matches(reader, g);
  ASSERT_EQ(cases.size(), 4u);
  EXPECT_EQ(cases[0].category, ErrorCategory::GTSubsetPred);
  const auto s = category_correction_stats(cases, all_say(g, "Ada Lovelace"), g);
  EXPECT_EQ(s.fixed(ErrorCategory::GTSubsetPred), 4u);
  EXPECT_NE(s.to_table().find("100%"), std::string::npos);
  EXPECT_NE(s.to_csv().find("GTSubsetPred,4,4,1"), std::string::npos);
}

TEST(CategoryStats, MultiSpanRowHasNoCorrectedCount) {
  CategoryCorrectionStats s;
  s.totals[static_cast<std::size_t>(ErrorCategory::MultiSpanGT)] = 3;
  const auto table = s.to_table();
  const auto row = table.substr(table.find("Multi-Span GT"));
  EXPECT_NE(row.substr(0, row.find('\n')).find('-'), std::string::npos);
}

TEST(Evaluate, Percentages) {
  const auto g = gold(4);
  EXPECT_DOUBLE_EQ(evaluate(all_say(g, "Ada Lovelace"), g).exact_match, 100.0);
  auto half = all_say(g, "Ada Lovelace");
  half.erase("g0");
  half["g1"] = prediction_at("g1", kContext, "Ada");
  const auto r = evaluate(half, g);
  EXPECT_DOUBLE_EQ(r.exact_match, 50.0);
  EXPECT_NEAR(r.f1, 100.0 * (2 + 2.0 / 3.0) / 4.0, 1e-9);
  EXPECT_EQ(per_example_em(half, g), (std::vector<double>{0, 0, 1, 1}));
}

TEST(Evaluate, ArticleOption) {
  const auto g = std::vector<MRCExample>{example_with_answer("a", "q", "the cat sat", "the cat")};
  PredictionMap p{{"a", prediction_at("a", "the cat sat", "cat")}};
  EXPECT_DOUBLE_EQ(evaluate(p, g).exact_match, 100.0);
  EXPECT_DOUBLE_EQ(evaluate(p, g, NormalizeOptions{.strip_articles = false}).exact_match, 0.0);
}

TEST(DeltaMatrix, IdentityIsZero) {
  const auto g = grid({{"en", "en", 70.0}, {"en", "de", 60.0}, {"de", "en", 55.0}, {"de", "de", 65.0}});
  const auto m = delta_matrix(g, g);
  for (const auto& [k, v] : m.delta.values) EXPECT_EQ(v, 0.0);
  for (double mean : m.column_means) EXPECT_EQ(mean, 0.0);
}

TEST(DeltaMatrix, ColumnMeansAndOrder) {
  const auto base = grid({{"en", "en", 70.0}, {"en", "de", 60.0}, {"de", "en", 55.0}, {"de", "de", 65.0}});
  const auto sys = grid({{"en", "en", 71.0}, {"en", "de", 63.0}, {"de", "en", 58.0}, {"de", "de", 66.0}});
  const auto m = delta_matrix(base, sys);
  EXPECT_EQ(m.delta.context_langs, (std::vector<std::string>{"en", "de"}));
  EXPECT_DOUBLE_EQ(m.column_means[0], 2.0);
  EXPECT_DOUBLE_EQ(m.column_means[1], 2.0);
  const auto table = m.to_table();
  EXPECT_NE(table.find("q\\c"), std::string::npos);
  EXPECT_NE(table.find("AVG"), std::string::npos);
  EXPECT_NE(table.find("+3.0"), std::string::npos);

  const auto back = delta_matrix(sys, base);
  for (const auto& [k, v] : m.delta.values) EXPECT_EQ(back.delta.values.at(k), -v);
}

TEST(DeltaMatrix, RejectsDifferentKeys) {
  const auto a = grid({{"en", "en", 1.0}, {"en", "de", 1.0}});
  const auto b = grid({{"en", "en", 1.0}, {"de", "en", 1.0}});
  EXPECT_THROW(delta_matrix(a, b), DataError);
  EXPECT_THROW(delta_matrix(a, grid({{"en", "en", 1.0}})), DataError);
}

TEST(EmTable, KeepsRowOrder) {
  const std::vector<std::pair<std::string, double>> rows = {{"reader+corrector", 75.3}, {"reader", 60.0}};
  const auto t = em_table(rows);
  EXPECT_EQ(t.substr(0, 5), "Model");
  EXPECT_LT(t.find("reader+corrector"), t.find("reader "));
  EXPECT_NE(t.find("75.3"), std::string::npos);
  EXPECT_NE(t.find("60.0"), std::string::npos);
}
