// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "spancorr/datagen.hpp"
#include "spancorr/decode.hpp"
#include "spancorr/io.hpp"
#include "spancorr/metrics.hpp"
#include "spancorr/pipeline.hpp"
#include "spancorr/reporting.hpp"
#include "spancorr/significance.hpp"
#include "spancorr/synth.hpp"
#include "spancorr/taxonomy.hpp"
#include "support.hpp"
#include "spancorr/vocab.hpp"

using namespace spancorr;
using spancorr::testing::example_with_answer;
using spancorr::testing::prediction_at;

namespace {

using Files = std::map<std::string, std::string>;

struct Result {
  bool pass = false;
  std::string detail;
  Files files;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

std::vector<MRCExample> corpus(std::size_t n, std::uint64_t seed, const std::string& prefix) {
  auto c = SynthConfig::defaults();
  c.n_examples = n;
  c.seed = seed;
  c.id_prefix = prefix;
  return gen_corpus(c).examples;
}

std::vector<std::string> ids_of(std::span<const MRCExample> examples) {
  std::vector<std::string> out;
  for (const auto& ex : examples) out.push_back(ex.id);
  return out;
}

// 1 -------------------------------------------------------------------------

Result taxonomy_fixtures() {
  Result r;
  std::vector<std::string> wrong;
  auto expect = [&](const char* name, const Prediction& p, const MRCExample& ex, ErrorCategory want) {
    const auto got = classify(p, select_reference_annotation(p, ex.ground_truths), ex.context);
    if (got != want) wrong.push_back(fmt("%s=%s", name, std::string(to_string(got)).c_str()));
  };

  const auto crew = example_with_answer(
      "t1", "who won the king of dance season 2",
      "Title Winner : LAAB Crew From Team Sherif , 1st Runner-up : ADS kids From Team Sherif , "
      "2nd Runner-up : Bipin and Princy From Team Jeffery",
      "LAAB Crew From Team Sherif");
  expect("dropped-qualifier", prediction_at("t1", crew.context, "LAAB Crew"), crew,
         ErrorCategory::PredSubsetGT);

  const auto fat = example_with_answer(
      "t2", "unsaturated fats are comprised of lipids that contain",
      "An unsaturated fat is a fat or fatty acid in which there is at least one double bond "
      "within the fatty acid chain. A fatty acid chain is monounsaturated if it contains one "
      "double bond.",
      "at least one double bond");
  expect("verbose-sentence",
         prediction_at("t2", fat.context,
                       "An unsaturated fat is a fat or fatty acid in which there is at least one "
                       "double bond"),
         fat, ErrorCategory::GTSubsetPred);

  const auto algae = example_with_answer(
      "t3", "what is most likely cause of algal blooms",
      "colloquially as red tides. Freshwater algal blooms are the result of an excess of "
      "nutrients , particularly some phosphates. The excess of nutrients may originate from "
      "fertilizers.",
      "an excess of nutrients , particularly some phosphates");
  expect("straddling-window",
         prediction_at("t3", algae.context,
                       "Freshwater algal blooms are the result of an excess of nutrients"),
         algae, ErrorCategory::PartialOverlap);

  // Corrections that turn an exact reader answer into a partial match.
  const auto cones = example_with_answer(
      "t4", "where are the cones in the eye located",
      "Cone cells, or cones, are one of three types of photoreceptor cells in the retina of "
      "mammalian eyes (e.g. the human eye).",
      "in the retina");
  const auto theme = example_with_answer(
      "t5", "who sang the theme song to step by step",
      "Jesse Frederick James Conaway (born 1948), known professionally as Jesse Frederick, is an "
      "American film and television composer and singer",
      "Jesse Frederick James Conaway");
  const std::vector<MRCExample> broken = {cones, theme};
  PredictionMap reader, corrected;
  reader["t4"] = prediction_at("t4", cones.context, "in the retina");
  corrected["t4"] = prediction_at("t4", cones.context, "retina");
  reader["t5"] = prediction_at("t5", theme.context, "Jesse Frederick James Conaway");
  corrected["t5"] = prediction_at(
      "t5", theme.context,
      "Jesse Frederick James Conaway (born 1948), known professionally as Jesse Frederick");
  const auto stats = change_stats(reader, corrected, broken);
  for (const auto& ex : broken) {
    const auto& c = corrected.at(ex.id);
    const bool partial = is_partial_match(exact_match(c.text, ex.ground_truths),
                                          f1_max(c.text, ex.ground_truths));
    if (exact_match(reader.at(ex.id).text, ex.ground_truths) != 1 || !partial) {
      wrong.push_back(ex.id + " not a correction-introduced partial match");
    }
  }
  expect("cones", corrected["t4"], cones, ErrorCategory::PredSubsetGT);
  expect("theme", corrected["t5"], theme, ErrorCategory::GTSubsetPred);
  if (stats.correct_to_incorrect != 2) wrong.push_back("change stats miss the broken answers");

  r.pass = wrong.empty();
  r.detail = r.pass ? "5/5 fixtures" : "mismatch:";
  for (const auto& w : wrong) r.detail += " " + w;
  return r;
}

// 2 -------------------------------------------------------------------------

struct MetricCase {
  const char* prediction;
  std::vector<std::string> gold;
  int em;
  double f1;
};

Result metric_oracle() {
  // Values worked out by hand from the normalization and token-F1 rules.
  const std::vector<MetricCase> cases = {
      {"Ada Lovelace", {"Ada Lovelace"}, 1, 1.0},
      {"ada lovelace.", {"Ada Lovelace"}, 1, 1.0},
      {"The Beatles", {"Beatles"}, 1, 1.0},
      {"Ada", {"Ada Lovelace"}, 0, 2.0 / 3.0},
      {"Ada Lovelace of London", {"Ada Lovelace"}, 0, 2.0 / 3.0},
      {"red fox", {"blue whale"}, 0, 0.0},
      {"a cat and a dog", {"the dog and the cat"}, 0, 1.0},
      {"1,000 people", {"1000 people"}, 1, 1.0},
      {"New York City", {"York"}, 0, 0.5},
      {"the the the", {"the"}, 1, 1.0},
      {"", {"Paris"}, 0, 0.0},
      {"Paris", {"London", "paris"}, 1, 1.0},
      {"in the retina", {"retina"}, 0, 2.0 / 3.0},
      {"x y y", {"y y z"}, 0, 2.0 / 3.0},
      {"at least one double bond", {"one double bond"}, 0, 0.75},
      {"anthem", {"the anthem"}, 1, 1.0},
      {"Café  Noir", {"café noir"}, 1, 1.0},
      {"Jesse Frederick James Conaway (born 1948)", {"Jesse Frederick James Conaway"}, 0, 0.8},
      {"p q r s", {"r s t u", "p q"}, 0, 2.0 / 3.0},
      {"U.S.A.", {"USA"}, 1, 1.0},
  };
  Result r;
  std::size_t ok = 0;
  for (const auto& c : cases) {
    const int em = exact_match(c.prediction, c.gold);
    double f1 = 0.0;
    for (const auto& g : c.gold) f1 = std::max(f1, token_f1(c.prediction, g));
    if (em == c.em && std::abs(f1 - c.f1) <= 1e-9) {
      ++ok;
    } else {
      r.detail += fmt(" [%s: em %d f1 %.6f]", c.prediction, em, f1);
    }
  }
  r.pass = ok == cases.size();
  r.detail = fmt("%zu/%zu pairs", ok, cases.size()) + r.detail;
  return r;
}

// 3 -------------------------------------------------------------------------

Result decoder_oracle() {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> z(0.0, 2.0);
  std::size_t agree = 0, sorted = 0;
  const std::size_t trials = 500;
  for (std::size_t t = 0; t < trials; ++t) {
    const std::size_t len = 1 + rng() % 32;
    const std::size_t max_len = 1 + rng() % 12;
    // One word per position so spans map back to text.
    std::string context;
    EncodedInput input;
    SpanLogits logits;
    for (std::size_t i = 0; i < len; ++i) {
      if (i) context += ' ';
      const std::size_t at = context.size();
      context += "w" + std::to_string(i);
      input.ids.push_back(10);
      input.segments.push_back(1);
      input.offsets.emplace_back(CharSpan(at, context.size()));
      input.answer_mask.push_back(rng() % 5 != 0);
      logits.start.push_back(std::round(z(rng) * 2.0) / 2.0);
      logits.end.push_back(std::round(z(rng) * 2.0) / 2.0);
    }
    input.context = {0, len};
    const auto best = oracle::brute_force_best(logits.start, logits.end, input.answer_mask, max_len);
    const auto nbest = decode_nbest(logits, input, context, 20, max_len, "d");
    bool ok = false;
    if (!best) {
      ok = nbest.empty();
    } else if (!nbest.empty()) {
      const CharSpan want(input.offsets[best->start]->start(), input.offsets[best->end]->end());
      ok = nbest[0].span == want && nbest[0].score == best->score;
    }
    agree += ok;
    bool is_sorted = true;
    for (std::size_t i = 1; i < nbest.size(); ++i) is_sorted &= nbest[i - 1].score >= nbest[i].score;
    sorted += is_sorted;
  }
  Result r;
  r.pass = agree == trials && sorted == trials;
  r.detail = fmt("top-1 agrees %zu/%zu, sorted %zu/%zu", agree, trials, sorted, trials);
  return r;
}

// 4 -------------------------------------------------------------------------

PairedScores paired(const std::vector<double>& a, const std::vector<double>& b) {
  PairedScores s;
  for (std::size_t i = 0; i < a.size(); ++i) s.ids.push_back(std::to_string(i));
  s.a = a;
  s.b = b;
  return s;
}

Result fisher_oracle() {
  Result r;
  const std::vector<double> v = {1, 0, 1, 1, 0, 1};
  const double same = fisher_randomization(paired(v, v)).p_value;
  RandomizationOptions mc_only;
  mc_only.exhaustive_limit = 0;
  const double same_mc = fisher_randomization(paired(v, v), mc_only).p_value;
  const double four = fisher_randomization(paired({1, 1, 1, 1}, {0, 0, 0, 0})).p_value;

  std::mt19937_64 rng(77);
  std::size_t close = 0;
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> a(12), b(12);
    for (std::size_t i = 0; i < 12; ++i) {
      a[i] = static_cast<double>(rng() % 2);
      b[i] = static_cast<double>(rng() % 2);
    }
    RandomizationOptions o;
    o.exhaustive_limit = 0;
    o.resamples = 10000;
    o.seed = static_cast<std::uint64_t>(t);
    const double diff = std::abs(fisher_randomization(paired(a, b), o).p_value - oracle::exhaustive_p(a, b));
    worst = std::max(worst, diff);
    close += diff <= 0.02;
  }
  r.pass = same == 1.0 && same_mc == 1.0 && four == 0.125 && close >= 48;
  r.detail = fmt("identical p=%g (mc %g), all-disagree p=%g, mc within 0.02 %zu/50 (worst %.4f)",
                 same, same_mc, four, close, worst);
  return r;
}

// 5 -------------------------------------------------------------------------

ReaderTraining toy_setup() {
  ReaderTraining s;
  s.model.layers = 1;
  s.model.heads = 2;
  s.model.dim = 16;
  s.model.ff_dim = 32;
  s.train.epochs = 1;
  s.train.batch_size = 16;
  s.train.optimizer = OptimizerKind::Adam;
  s.train.learning_rate = 3e-3;
  return s;
}

Result datagen_contract() {
  Result r;
  const auto data = corpus(100, 505, "dg");
  const auto plan = make_fold_plan(ids_of(data), 2, 5);
  const auto nbest = kfold_nbest(data, plan, toy_setup(), 10);

  std::vector<CorrectorExample> examples;
  GenerationSummary summary;
  for (const auto& ex : data) {
    auto part = build_corrector_examples(ex, nbest.at(ex.id), 2, &summary);
    examples.insert(examples.end(), part.begin(), part.end());
  }
  sort_corrector_examples(examples);
  const auto records = attach_text(examples, data);

  std::map<std::string, std::size_t> identity, corrections;
  std::size_t bad_span = 0, bad_em = 0;
  std::map<std::string, const MRCExample*> by_id;
  for (const auto& ex : data) by_id[ex.id] = &ex;
  for (const auto& rec : records) {
    const auto& c = rec.example;
    const auto& ex = *by_id.at(c.source_example_id);
    const auto* gold = ex.first_single_span();
    const bool valid = c.marked_span.end() <= ex.context.size() && c.marked_span.length() > 0 &&
                       gold && c.target_span == gold->first().span;
    bad_span += !valid;
    if (c.is_identity) {
      ++identity[c.source_example_id];
    } else {
      ++corrections[c.source_example_id];
      bad_em += exact_match(c.marked_span.in(ex.context), ex.ground_truths) != 0;
    }
  }
  std::size_t usable = 0, identity_ok = 0, over_k = 0;
  for (const auto& ex : data) {
    const bool single = ex.first_single_span() != nullptr;
    usable += single;
    const auto n = identity.contains(ex.id) ? identity.at(ex.id) : 0;
    identity_ok += single ? n == 1 : n == 0;
    over_k += corrections.contains(ex.id) && corrections.at(ex.id) > 2;
  }
  r.pass = identity_ok == data.size() && summary.usable == usable && over_k == 0 && bad_span == 0 &&
           bad_em == 0 && !examples.empty();
  r.detail = fmt("usable %zu, identity ok %zu/%zu, corrections %zu, over k %zu, bad spans %zu, "
                 "corrections with EM=1 %zu",
                 usable, identity_ok, data.size(), summary.corrections, over_k, bad_span, bad_em);
  r.files["c5/nbest.json"] = io::nbest_json(nbest, data);
  r.files["c5/records.jsonl"] = io::corrector_records_jsonl(records);
  return r;
}

// 6 -------------------------------------------------------------------------

Result injection_agreement() {
  Result r;
  const auto data = corpus(2000, 606, "inj");
  const ErrorInjectionConfig config;
  const auto out = flawed_reader(data, config);

  std::size_t single = 0, agree = 0;
  std::vector<TaxonomyCase> cases;
  for (const auto& ex : data) {
    const auto& p = out.predictions.at(ex.id);
    cases.push_back({p, ex.ground_truths, ex.context});
    const auto& label = out.labels.at(ex.id);
    if (!label || *label == ErrorCategory::MultiSpanGT) continue;
    ++single;
    const auto& ref = select_reference_annotation(p, ex.ground_truths);
    agree += classify(p, ref, ex.context) == *label;
  }
  const auto dist = distribution(cases);
  double worst = 0.0;
  std::string shares;
  for (auto c : {ErrorCategory::PredSubsetGT, ErrorCategory::GTSubsetPred,
                 ErrorCategory::PartialOverlap, ErrorCategory::MultiSpanGT}) {
    const double gap = std::abs(dist.percent(c) - 100.0 * config.rates.rate(c));
    worst = std::max(worst, gap);
    shares += fmt(" %s %.1f%%", std::string(to_string(c)).c_str(), dist.percent(c));
  }
  r.pass = single > 0 && agree == single && worst <= 2.0;
  r.detail = fmt("agreement %zu/%zu, max rate gap %.2f pp;", agree, single, worst) + shares;
  r.files["c6/predictions.json"] = io::predictions_json(out.predictions, data);
  r.files["c6/labels.json"] = io::labels_json(out.labels);
  r.files["c6/taxonomy.csv"] = dist.to_csv();
  return r;
}

// 7 and 8 -------------------------------------------------------------------

struct SeedRun {
  double reader_em = 0.0;
  double corrected_em = 0.0;
  std::size_t exact = 0;
  std::size_t preserved = 0;
};

struct Headline {
  std::vector<SeedRun> runs;
  Files files;
  double seconds = 0.0;
};

ReaderTraining corrector_setup(std::uint64_t seed) {
  ReaderTraining s;
  s.train.optimizer = OptimizerKind::Adam;
  s.train.learning_rate = 1e-3;
  s.train.epochs = 5;
  s.train.batch_size = 32;
  s.model.seed = derive_seed(seed, {6});
  s.train.seed = derive_seed(seed, {7});
  return s;
}

Headline headline_runs() {
  const auto t0 = std::chrono::steady_clock::now();
  Headline h;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto train = corpus(2000, derive_seed(seed, {1}), "train");
    const auto dev = corpus(500, derive_seed(seed, {2}), "dev");

    // Out-of-fold n-best for the training side, from the simulated reader.
    const auto plan = make_fold_plan(ids_of(train), 2, derive_seed(seed, {5}));
    ErrorInjectionConfig inject;
    inject.partial_rate = 0.4;
    inject.seed = derive_seed(seed, {3});
    const auto oof = flawed_reader_by_fold(train, plan, inject);

    std::vector<CorrectorExample> examples;
    for (const auto& ex : train) {
      auto part = build_corrector_examples(ex, oof.nbest.at(ex.id), 2);
      examples.insert(examples.end(), part.begin(), part.end());
    }
    sort_corrector_examples(examples);
    const auto records = attach_text(examples, train);
    const auto corrector = train_corrector(records, corrector_setup(seed));

    inject.seed = derive_seed(seed, {4});
    const auto reader = flawed_reader(dev, inject);
    const auto corrected = correct_all(reader.predictions, dev, corrector);

    SeedRun run;
    run.reader_em = evaluate(reader.predictions, dev).exact_match;
    run.corrected_em = evaluate(corrected, dev).exact_match;
    for (const auto& ex : dev) {
      if (exact_match(reader.predictions.at(ex.id).text, ex.ground_truths) != 1) continue;
      ++run.exact;
      run.preserved += exact_match(corrected.at(ex.id).text, ex.ground_truths) == 1;
    }
    h.runs.push_back(run);

    const std::string dir = "c7/seed" + std::to_string(seed) + "/";
    h.files[dir + "records.jsonl"] = io::corrector_records_jsonl(records);
    h.files[dir + "reader.json"] = io::predictions_json(reader.predictions, dev);
    h.files[dir + "corrected.json"] = io::predictions_json(corrected, dev);
    h.files[dir + "changes.csv"] = change_stats(reader.predictions, corrected, dev).to_csv();
    h.files[dir + "categories.csv"] =
        category_correction_stats(label_partial_matches(reader.predictions, dev), corrected, dev).to_csv();
  }
  h.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return h;
}

Result correction_gain(const Headline& h) {
  Result r;
  double gain = 0.0;
  std::string per_seed;
  for (const auto& run : h.runs) {
    gain += run.corrected_em - run.reader_em;
    per_seed += fmt(" %.1f->%.1f", run.reader_em, run.corrected_em);
  }
  gain /= static_cast<double>(h.runs.size());
  r.pass = gain >= 5.0 && h.seconds < 600.0;
  r.detail = fmt("mean EM gain %+.2f over %zu seeds (", gain, h.runs.size()) + per_seed.substr(1) +
             fmt("), %.0fs", h.seconds);
  r.files = h.files;
  return r;
}

Result identity_preservation(const Headline& h) {
  Result r;
  r.pass = !h.runs.empty();
  std::size_t kept = 0, total = 0;
  std::string per_seed;
  for (const auto& run : h.runs) {
    const double rate = run.exact ? static_cast<double>(run.preserved) / static_cast<double>(run.exact) : 0.0;
    r.pass &= rate >= 0.9;
    kept += run.preserved;
    total += run.exact;
    per_seed += fmt(" %zu/%zu", run.preserved, run.exact);
  }
  r.detail = fmt("preserved %zu/%zu exact reader answers (%.1f%%); per seed", kept, total,
                 total ? 100.0 * static_cast<double>(kept) / static_cast<double>(total) : 0.0) +
             per_seed;
  return r;
}

// 9 -------------------------------------------------------------------------

Result ensembling() {
  const auto t0 = std::chrono::steady_clock::now();
  Result r;
  const auto train = corpus(2000, 909, "train");
  const auto dev = corpus(500, 910, "dev");
  auto setup = [](std::uint64_t seed) {
    ReaderTraining s;
    s.train.optimizer = OptimizerKind::Adam;
    s.train.learning_rate = 1e-3;
    s.train.epochs = 2;
    s.model.seed = seed;
    s.train.seed = seed + 100;
    return s;
  };
  const auto a = train_reader(train, setup(1));
  const auto b = train_reader(train, setup(2));
  const std::vector<const SpanModel*> just_a = {&a}, a_twice = {&a, &a}, just_b = {&b}, both = {&a, &b};
  const auto pa = predict_all(just_a, dev, 5);
  const auto paa = predict_all(a_twice, dev, 5);
  const auto pb = predict_all(just_b, dev, 5);
  const auto pab = predict_all(both, dev, 5);

  std::size_t same = 0;
  for (const auto& ex : dev) same += pa.at(ex.id) == paa.at(ex.id);
  const double em_a = evaluate(top1(pa), dev).exact_match;
  const double em_b = evaluate(top1(pb), dev).exact_match;
  const double em_ab = evaluate(top1(pab), dev).exact_match;
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  r.pass = same == dev.size() && em_ab >= std::min(em_a, em_b) && seconds < 120.0;
  r.detail = fmt("self-ensemble identical %zu/%zu; EM a %.1f, b %.1f, a+b %.1f; %.0fs", same,
                 dev.size(), em_a, em_b, em_ab, seconds);
  r.files["c9/a.json"] = io::nbest_json(pa, dev);
  r.files["c9/b.json"] = io::nbest_json(pb, dev);
  r.files["c9/ab.json"] = io::nbest_json(pab, dev);
  return r;
}

// 11 ------------------------------------------------------------------------

Result gradient_check() {
  const std::string question = "who won the race ?";
  const std::string context = "The race was won by Ada , who beat Bo in the final lap .";
  const std::vector<std::string> texts = {question, context};
  const auto vocab = Vocab::build(texts);
  ModelConfig cfg;
  cfg.layers = 2;
  cfg.heads = 2;
  cfg.dim = 8;
  cfg.ff_dim = 16;
  cfg.max_seq_len = 32;
  cfg.max_query_len = 8;
  cfg.dropout = 0.0;
  SpanModel model(cfg, vocab);
  const auto input = encode(question, context, std::nullopt, vocab, cfg);
  const auto at = context.find("Ada");
  const auto pos = input.positions_for(CharSpan(at, at + 3));
  Result r;
  if (!pos) {
    r.detail = "answer not encodable";
    return r;
  }
  const auto check = oracle::check_gradients(model, input, pos->begin, pos->end - 1, 1000, 11);
  const double share = static_cast<double>(check.agreed) / static_cast<double>(check.sampled);
  r.pass = share >= 0.99;
  r.detail = fmt("%zu/%zu parameters within 1e-3 (%.1f%%), worst outlier %.2e", check.agreed,
                 check.sampled, 100.0 * share, check.worst_relative_error);
  return r;
}

// ---------------------------------------------------------------------------

bool report(int id, const char* name, const std::function<Result()>& fn, double limit_seconds,
            Files* files = nullptr) {
  const auto t0 = std::chrono::steady_clock::now();
  Result r;
  try {
    r = fn();
  } catch (const std::exception& e) {
    r = Result{};
    r.detail = fmt("threw: %s", e.what());
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_seconds > 0 && s >= limit_seconds) {
    r.pass = false;
    r.detail += fmt("; over the %.0fs limit", limit_seconds);
  }
  std::printf("criterion %2d: %s  %-28s %s [%.1fs]\n", id, r.pass ? "PASS" : "FAIL", name,
              r.detail.c_str(), s);
  std::fflush(stdout);
  if (files) files->insert(r.files.begin(), r.files.end());
  return r.pass;
}

}  // namespace

int main() {
  bool ok = true;
  ok &= report(1, "taxonomy fixtures", taxonomy_fixtures, 1.0);
  ok &= report(2, "metric oracle", metric_oracle, 1.0);
  ok &= report(3, "decoder oracle", decoder_oracle, 5.0);
  ok &= report(4, "fisher oracle", fisher_oracle, 30.0);

  Files first;
  ok &= report(5, "datagen contract", datagen_contract, 60.0, &first);
  ok &= report(6, "injection agreement", injection_agreement, 30.0, &first);
  Headline headline;
  ok &= report(7, "correction gain", [&] {
    headline = headline_runs();
    return correction_gain(headline);
  }, 600.0, &first);
  ok &= report(8, "identity preservation", [&] { return identity_preservation(headline); }, 0.0);
  ok &= report(9, "ensembling", ensembling, 120.0, &first);

  ok &= report(10, "determinism", [&] {
    Files second;
    for (auto* fn : {&datagen_contract, &injection_agreement, &ensembling}) {
      auto r = fn();
      second.insert(r.files.begin(), r.files.end());
    }
    const auto again = correction_gain(headline_runs());
    second.insert(again.files.begin(), again.files.end());
    std::size_t same = 0;
    std::string differ;
    for (const auto& [name, bytes] : first) {
      auto it = second.find(name);
      if (it != second.end() && it->second == bytes) {
        ++same;
      } else {
        differ += " " + name;
      }
    }
    Result r;
    r.pass = same == first.size() && second.size() == first.size() && !first.empty();
    r.detail = fmt("%zu/%zu files byte-identical", same, first.size()) +
               (differ.empty() ? "" : "; differ:" + differ);
    return r;
  }, 0.0);

  ok &= report(11, "gradient check", gradient_check, 60.0);
  std::printf("%s\n", ok ? "all criteria passed" : "some criteria failed");
  return ok ? 0 : 1;
}
