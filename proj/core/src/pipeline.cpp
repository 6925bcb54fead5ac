#include "spancorr/pipeline.hpp"

#include <unordered_map>

#include "parallel.hpp"
#include "spancorr/error.hpp"
#include "spancorr/metrics.hpp"

namespace spancorr {
namespace {

std::unordered_map<std::string, const MRCExample*> index_by_id(std::span<const MRCExample> examples) {
  std::unordered_map<std::string, const MRCExample*> out;
  for (const auto& ex : examples) out.emplace(ex.id, &ex);
  return out;
}

}  // namespace

std::vector<CorrectorRecord> attach_text(std::span<const CorrectorExample> examples,
                                         std::span<const MRCExample> dataset) {
  const auto index = index_by_id(dataset);
  std::vector<CorrectorRecord> out;
  out.reserve(examples.size());
  for (const auto& ex : examples) {
    auto it = index.find(ex.source_example_id);
    if (it == index.end()) throw DataError("unknown example id " + ex.source_example_id);
    out.push_back({ex, it->second->question, it->second->context});
  }
  return out;
}

SpanLogits span_logits(std::span<const SpanModel* const> models, const MRCExample& example,
                       std::optional<CharSpan> marked) {
  if (models.empty()) throw std::invalid_argument("no models given");
  std::vector<SpanLogits> parts;
  for (const auto* m : models) {
    const auto& c = m->config();
    const auto& first = models.front()->config();
    if (c.max_seq_len != first.max_seq_len || c.max_query_len != first.max_query_len) {
      throw ConfigError("ensembled models disagree on sequence limits");
    }
    parts.push_back(m->forward(encode(example.question, example.context, marked, m->vocab(), c)));
  }
  return parts.size() == 1 ? parts.front() : ensemble_logits(parts);
}

NBestList predict_nbest(std::span<const SpanModel* const> models, const MRCExample& example,
                        std::size_t n) {
  const auto& first = *models.front();
  const auto input = encode(example.question, example.context, std::nullopt, first.vocab(), first.config());
  const auto logits = span_logits(models, example);
  return decode_nbest(logits, input, example.context, n,
                      static_cast<std::size_t>(first.config().max_answer_len), example.id);
}

NBestList predict_nbest(const SpanModel& model, const MRCExample& example, std::size_t n) {
  const SpanModel* models[] = {&model};
  return predict_nbest(models, example, n);
}

NBestMap predict_all(std::span<const SpanModel* const> models,
                     std::span<const MRCExample> examples, std::size_t n, int jobs) {
  std::vector<NBestList> results(examples.size());
  detail::parallel_for(examples.size(), jobs,
                       [&](std::size_t i) { results[i] = predict_nbest(models, examples[i], n); });
  NBestMap out;
  for (std::size_t i = 0; i < examples.size(); ++i) out[examples[i].id] = std::move(results[i]);
  return out;
}

Prediction correct(const Prediction& reader_prediction, const MRCExample& example,
                   const SpanModel& corrector) {
  std::optional<CharSpan> marked = reader_prediction.span;
  if (!marked && !reader_prediction.text.empty()) {
    marked = locate(reader_prediction.text, example.context);
  }
  const auto input = encode(example.question, example.context, marked, corrector.vocab(),
                            corrector.config());
  const auto best = decode_nbest(corrector.forward(input), input, example.context, 1,
                                 static_cast<std::size_t>(corrector.config().max_answer_len),
                                 example.id);
  if (best.empty()) return reader_prediction;
  return best.front();
}

PredictionMap correct_all(const PredictionMap& reader_predictions,
                          std::span<const MRCExample> examples, const SpanModel& corrector,
                          int jobs) {
  const auto index = index_by_id(examples);
  std::vector<const Prediction*> preds;
  std::vector<const MRCExample*> sources;
  for (const auto& [id, pred] : reader_predictions) {
    auto it = index.find(id);
    if (it == index.end()) throw DataError("prediction for unknown example id " + id);
    preds.push_back(&pred);
    sources.push_back(it->second);
  }
  std::vector<Prediction> results(preds.size());
  detail::parallel_for(preds.size(), jobs, [&](std::size_t i) {
    results[i] = correct(*preds[i], *sources[i], corrector);
  });
  PredictionMap out;
  for (std::size_t i = 0; i < preds.size(); ++i) out[sources[i]->id] = std::move(results[i]);
  return out;
}

PredictionMap top1(const NBestMap& nbest) {
  PredictionMap out;
  for (const auto& [id, list] : nbest) {
    out[id] = list.empty() ? Prediction{id, "", std::nullopt, 0.0} : list.front();
  }
  return out;
}

SpanModel train_reader(std::span<const MRCExample> examples, const ReaderTraining& setup,
                       TrainingSummary* summary, const TrainOptions& options) {
  setup.model.validate();
  const Vocab vocab = Vocab::build(examples, setup.min_count);
  std::vector<TrainingExample> data;
  std::size_t unusable = 0;
  for (const auto& ex : examples) {
    const Annotation* gt = ex.first_single_span();
    if (gt == nullptr) {
      ++unusable;
      continue;
    }
    auto te = make_training_example(ex.question, ex.context, std::nullopt, gt->first().span, vocab,
                                    setup.model);
    if (te) {
      data.push_back(std::move(*te));
    } else {
      ++unusable;
    }
  }
  SpanModel model = train(data, setup.model, vocab, setup.train, summary, options);
  if (summary) {
    summary->examples += unusable;
    summary->rejected += unusable;
  }
  return model;
}

SpanModel train_corrector(std::span<const CorrectorRecord> records, const ReaderTraining& setup,
                          TrainingSummary* summary, const TrainOptions& options) {
  setup.model.validate();
  std::vector<std::string> texts;
  std::string last_context;
  for (const auto& r : records) {
    // Records of one source example repeat its text; count it once.
    if (r.context == last_context && !texts.empty()) continue;
    texts.push_back(r.question);
    texts.push_back(r.context);
    last_context = r.context;
  }
  const Vocab vocab = Vocab::build(texts, setup.min_count);
  std::vector<TrainingExample> data;
  std::size_t unusable = 0;
  for (const auto& r : records) {
    auto te = make_training_example(r.question, r.context, r.example.marked_span,
                                    r.example.target_span, vocab, setup.model);
    if (te) {
      data.push_back(std::move(*te));
    } else {
      ++unusable;
    }
  }
  SpanModel model = train(data, setup.model, vocab, setup.train, summary, options);
  if (summary) {
    summary->examples += unusable;
    summary->rejected += unusable;
  }
  return model;
}

NBestMap kfold_nbest(std::span<const MRCExample> examples, const FoldPlan& plan,
                     const ReaderTraining& setup, std::size_t n, int jobs) {
  const auto index = index_by_id(examples);
  if (plan.assignments.size() != examples.size()) {
    throw DataError("fold plan covers " + std::to_string(plan.assignments.size()) +
                    " ids but the dataset has " + std::to_string(examples.size()));
  }
  for (const auto& [id, fold] : plan.assignments) {
    if (!index.contains(id)) throw DataError("fold plan id " + id + " not in dataset");
  }
  auto collect = [&](const std::vector<std::string>& ids) {
    std::vector<MRCExample> out;
    for (const auto& id : ids) out.push_back(*index.at(id));
    return out;
  };
  std::vector<NBestMap> per_fold(static_cast<std::size_t>(plan.n_folds));
  detail::parallel_for(per_fold.size(), jobs, [&](std::size_t f) {
    const auto fold = static_cast<int>(f);
    ReaderTraining fold_setup = setup;
    fold_setup.model.seed = derive_seed(setup.model.seed, {f});
    fold_setup.train.seed = derive_seed(setup.train.seed, {f});
    const auto train_set = collect(plan.train_ids(fold));
    const auto holdout = collect(plan.holdout_ids(fold));
    const SpanModel reader = train_reader(train_set, fold_setup);
    const SpanModel* models[] = {&reader};
    per_fold[f] = predict_all(models, holdout, n, 1);
  });
  NBestMap out;
  for (auto& m : per_fold) out.merge(m);
  return out;
}

}  // namespace spancorr
