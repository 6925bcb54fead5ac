#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "spancorr/datagen.hpp"
#include "spancorr/decode.hpp"
#include "spancorr/span.hpp"
#include "spancorr/trainer.hpp"
#include "spancorr/transformer.hpp"

namespace spancorr {

using PredictionMap = std::map<std::string, Prediction>;
using NBestMap = std::map<std::string, NBestList>;

/// A corrector training record: the example plus its source text.
struct CorrectorRecord {
  CorrectorExample example;
  std::string question;
  std::string context;
};

/// Attaches question/context from `dataset`. Throws DataError on unknown ids.
std::vector<CorrectorRecord> attach_text(std::span<const CorrectorExample> examples,
                                         std::span<const MRCExample> dataset);

/// Logits of one model, or the mean over several models, for one example.
/// All models must share max_seq_len and max_query_len so positions align.
SpanLogits span_logits(std::span<const SpanModel* const> models, const MRCExample& example,
                       std::optional<CharSpan> marked = std::nullopt);

NBestList predict_nbest(std::span<const SpanModel* const> models, const MRCExample& example,
                        std::size_t n);
NBestList predict_nbest(const SpanModel& model, const MRCExample& example, std::size_t n);

/// Runs prediction over a dataset with `jobs` workers; output is independent of `jobs`.
NBestMap predict_all(std::span<const SpanModel* const> models,
                     std::span<const MRCExample> examples, std::size_t n, int jobs = 1);

/// Marks the reader span in context and returns the corrector's top-1 span.
/// Falls back to the reader prediction when nothing can be decoded.
Prediction correct(const Prediction& reader_prediction, const MRCExample& example,
                   const SpanModel& corrector);

/// Corrects every reader prediction; ids must exist in `examples`.
PredictionMap correct_all(const PredictionMap& reader_predictions,
                          std::span<const MRCExample> examples, const SpanModel& corrector,
                          int jobs = 1);

/// Top-1 entries of an n-best map. Ids with empty lists get an empty prediction.
PredictionMap top1(const NBestMap& nbest);

struct ReaderTraining {
  ModelConfig model;
  TrainConfig train;
  int min_count = 1;
};

/// Builds a vocabulary from `examples` and trains a reader on their first
/// single-span annotations.
SpanModel train_reader(std::span<const MRCExample> examples, const ReaderTraining& setup,
                       TrainingSummary* summary = nullptr, const TrainOptions& options = {});

/// Builds a vocabulary from the records' text and trains a corrector.
SpanModel train_corrector(std::span<const CorrectorRecord> records, const ReaderTraining& setup,
                          TrainingSummary* summary = nullptr, const TrainOptions& options = {});

/// Out-of-fold n-best predictions: one reader per fold trained on the other
/// folds, predicting its holdout. Folds run on up to `jobs` threads.
NBestMap kfold_nbest(std::span<const MRCExample> examples, const FoldPlan& plan,
                     const ReaderTraining& setup, std::size_t n, int jobs = 1);

}  // namespace spancorr
