#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "spancorr/datagen.hpp"
#include "spancorr/pipeline.hpp"
#include "spancorr/reporting.hpp"
#include "spancorr/span.hpp"
#include "spancorr/taxonomy.hpp"

// File formats. Every offset written to disk counts Unicode code points;
// in memory offsets are UTF-8 byte offsets.

namespace spancorr::io {

/// Whole-file read. Throws NotFound for a missing file.
std::string read_text(const std::filesystem::path& path);
/// Writes via a temporary file and rename, creating parent directories.
void write_text(const std::filesystem::path& path, std::string_view text);

/// SQuAD-style dataset. A qa with a "spans" list holds one multi-span
/// annotation whose parts are also listed under "answers".
std::vector<MRCExample> parse_dataset(std::string_view json);
std::string dataset_json(std::span<const MRCExample> examples,
                         const std::string& version = "spancorr-1");
std::vector<MRCExample> read_dataset(const std::filesystem::path& path);
void write_dataset(const std::filesystem::path& path, std::span<const MRCExample> examples,
                   const std::string& version = "spancorr-1");

/// id -> {text, start, end, score}; start and end are -1 for a prediction
/// without a span. Spans are checked against the dataset contexts.
PredictionMap parse_predictions(std::string_view json, std::span<const MRCExample> dataset);
std::string predictions_json(const PredictionMap& predictions,
                             std::span<const MRCExample> dataset);
PredictionMap read_predictions(const std::filesystem::path& path,
                               std::span<const MRCExample> dataset);
void write_predictions(const std::filesystem::path& path, const PredictionMap& predictions,
                       std::span<const MRCExample> dataset);

/// id -> [entry, ...] sorted by score.
NBestMap parse_nbest(std::string_view json, std::span<const MRCExample> dataset);
std::string nbest_json(const NBestMap& nbest, std::span<const MRCExample> dataset);
NBestMap read_nbest(const std::filesystem::path& path, std::span<const MRCExample> dataset);
void write_nbest(const std::filesystem::path& path, const NBestMap& nbest,
                 std::span<const MRCExample> dataset);

/// One JSON object per line: source_id, question, context, marked_start,
/// marked_end, target_start, target_end, is_identity.
std::vector<CorrectorRecord> parse_corrector_records(std::string_view jsonl);
std::string corrector_records_jsonl(std::span<const CorrectorRecord> records);
std::vector<CorrectorRecord> read_corrector_records(const std::filesystem::path& path);
void write_corrector_records(const std::filesystem::path& path,
                             std::span<const CorrectorRecord> records);

FoldPlan parse_fold_plan(std::string_view json);
std::string fold_plan_json(const FoldPlan& plan);

/// id -> category name, or null for examples left exact.
std::map<std::string, std::optional<ErrorCategory>> parse_labels(std::string_view json);
std::string labels_json(const std::map<std::string, std::optional<ErrorCategory>>& labels);

/// {question_lang: {context_lang: value}}, order preserved.
LanguageGrid parse_language_grid(std::string_view json);

}  // namespace spancorr::io
