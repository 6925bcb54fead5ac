#include "spancorr/io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "spancorr/error.hpp"
#include "spancorr/utf8.hpp"

namespace spancorr::io {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

ordered_json parse_json(std::string_view text, std::string_view what) {
  try {
    return ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string(what) + ": malformed JSON: " + e.what());
  }
}

template <typename T>
T field(const ordered_json& j, const char* key, std::string_view what) {
  if (!j.is_object() || !j.contains(key)) {
    throw DataError(std::string(what) + ": missing field '" + key + "'");
  }
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw DataError(std::string(what) + ": field '" + key + "' has the wrong type");
  }
}

CharSpan span_from_chars(std::string_view context, long long start, long long end,
                         std::string_view what) {
  if (start < 0 || end <= start) {
    throw DataError(std::string(what) + ": invalid span [" + std::to_string(start) + ", " +
                    std::to_string(end) + ")");
  }
  return {utf8::byte_offset(context, static_cast<std::size_t>(start)),
          utf8::byte_offset(context, static_cast<std::size_t>(end))};
}

std::unordered_map<std::string, const MRCExample*> index(std::span<const MRCExample> dataset) {
  std::unordered_map<std::string, const MRCExample*> out;
  for (const auto& ex : dataset) out.emplace(ex.id, &ex);
  return out;
}

const MRCExample& lookup(const std::unordered_map<std::string, const MRCExample*>& idx,
                         const std::string& id) {
  const auto it = idx.find(id);
  if (it == idx.end()) throw DataError("prediction for unknown example id '" + id + "'");
  return *it->second;
}

ordered_json prediction_entry(const Prediction& p, const MRCExample& ex) {
  ordered_json j;
  j["text"] = p.text;
  if (p.span) {
    j["start"] = utf8::char_offset(ex.context, p.span->start());
    j["end"] = utf8::char_offset(ex.context, p.span->end());
  } else {
    j["start"] = -1;
    j["end"] = -1;
  }
  j["score"] = p.score;
  return j;
}

Prediction parse_entry(const ordered_json& j, const MRCExample& ex) {
  const std::string what = "prediction '" + ex.id + "'";
  Prediction p;
  p.example_id = ex.id;
  p.text = field<std::string>(j, "text", what);
  p.score = j.contains("score") ? field<double>(j, "score", what) : 0.0;
  const auto start = j.contains("start") ? field<long long>(j, "start", what) : -1;
  const auto end = j.contains("end") ? field<long long>(j, "end", what) : -1;
  if (start >= 0 || end >= 0) {
    p.span = span_from_chars(ex.context, start, end, what);
    if (p.span->in(ex.context) != p.text) {
      throw DataError(what + ": text does not match the context at its span");
    }
  }
  return p;
}

}  // namespace

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NotFound("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw DataError("write failed for '" + path.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

std::vector<MRCExample> parse_dataset(std::string_view text) {
  const auto root = parse_json(text, "dataset");
  std::vector<MRCExample> out;
  for (const auto& article : field<ordered_json>(root, "data", "dataset")) {
    for (const auto& para : field<ordered_json>(article, "paragraphs", "dataset article")) {
      const auto context = field<std::string>(para, "context", "paragraph");
      for (const auto& qa : field<ordered_json>(para, "qas", "paragraph")) {
        MRCExample ex;
        ex.id = field<std::string>(qa, "id", "qa");
        const std::string what = "qa '" + ex.id + "'";
        ex.question = field<std::string>(qa, "question", what);
        ex.context = context;
        if (qa.contains("spans") && !qa.at("spans").is_null()) {
          std::vector<CharSpan> spans;
          for (const auto& s : field<ordered_json>(qa, "spans", what)) {
            if (!s.is_array() || s.size() != 2) throw DataError(what + ": spans must be pairs");
            spans.push_back(
                span_from_chars(context, s[0].get<long long>(), s[1].get<long long>(), what));
          }
          ex.ground_truths.push_back(Annotation::from_spans(spans, context));
        } else {
          for (const auto& a : field<ordered_json>(qa, "answers", what)) {
            const auto answer = field<std::string>(a, "text", what);
            const auto start = field<long long>(a, "answer_start", what);
            const auto begin = span_from_chars(context, start, start + 1, what).start();
            ex.ground_truths.push_back(
                Annotation({{CharSpan(begin, begin + answer.size()), answer}}, context));
          }
        }
        validate(ex);
        out.push_back(std::move(ex));
      }
    }
  }
  validate(std::span<const MRCExample>(out));
  return out;
}

std::string dataset_json(std::span<const MRCExample> examples, const std::string& version) {
  ordered_json paragraphs = ordered_json::array();
  for (const auto& ex : examples) {
    ordered_json qa;
    qa["id"] = ex.id;
    qa["question"] = ex.question;
    ordered_json answers = ordered_json::array();
    ordered_json spans;
    for (const auto& ann : ex.ground_truths) {
      for (const auto& part : ann.spans()) {
        answers.push_back({{"text", part.text},
                           {"answer_start", utf8::char_offset(ex.context, part.span.start())}});
      }
      if (ann.is_multi_span()) {
        if (ex.ground_truths.size() != 1) {
          throw DataError("example '" + ex.id +
                          "': a multi-span annotation must be the only annotation");
        }
        spans = ordered_json::array();
        for (const auto& part : ann.spans()) {
          spans.push_back({utf8::char_offset(ex.context, part.span.start()),
                           utf8::char_offset(ex.context, part.span.end())});
        }
      }
    }
    qa["answers"] = std::move(answers);
    if (!spans.is_null()) qa["spans"] = std::move(spans);
    ordered_json para;
    para["context"] = ex.context;
    para["qas"] = ordered_json::array({std::move(qa)});
    paragraphs.push_back(std::move(para));
  }
  ordered_json root;
  root["version"] = version;
  root["data"] = ordered_json::array({{{"title", "spancorr"}, {"paragraphs", std::move(paragraphs)}}});
  return root.dump(1) + "\n";
}

std::vector<MRCExample> read_dataset(const std::filesystem::path& path) {
  return parse_dataset(read_text(path));
}

void write_dataset(const std::filesystem::path& path, std::span<const MRCExample> examples,
                   const std::string& version) {
  write_text(path, dataset_json(examples, version));
}

PredictionMap parse_predictions(std::string_view text, std::span<const MRCExample> dataset) {
  const auto root = parse_json(text, "predictions");
  if (!root.is_object()) throw DataError("predictions: expected a JSON object");
  const auto idx = index(dataset);
  PredictionMap out;
  for (const auto& [id, entry] : root.items()) {
    out[id] = parse_entry(entry, lookup(idx, id));
  }
  return out;
}

std::string predictions_json(const PredictionMap& predictions,
                             std::span<const MRCExample> dataset) {
  const auto idx = index(dataset);
  ordered_json root = ordered_json::object();
  for (const auto& [id, p] : predictions) root[id] = prediction_entry(p, lookup(idx, id));
  return root.dump(1) + "\n";
}

PredictionMap read_predictions(const std::filesystem::path& path,
                               std::span<const MRCExample> dataset) {
  return parse_predictions(read_text(path), dataset);
}

void write_predictions(const std::filesystem::path& path, const PredictionMap& predictions,
                       std::span<const MRCExample> dataset) {
  write_text(path, predictions_json(predictions, dataset));
}

NBestMap parse_nbest(std::string_view text, std::span<const MRCExample> dataset) {
  const auto root = parse_json(text, "n-best");
  if (!root.is_object()) throw DataError("n-best: expected a JSON object");
  const auto idx = index(dataset);
  NBestMap out;
  for (const auto& [id, entries] : root.items()) {
    if (!entries.is_array()) throw DataError("n-best '" + id + "': expected an array");
    const auto& ex = lookup(idx, id);
    NBestList list;
    for (const auto& e : entries) {
      list.push_back(parse_entry(e, ex));
      if (list.size() > 1 && list[list.size() - 2].score < list.back().score) {
        throw DataError("n-best '" + id + "': entries not sorted by score");
      }
    }
    out[id] = std::move(list);
  }
  return out;
}

std::string nbest_json(const NBestMap& nbest, std::span<const MRCExample> dataset) {
  const auto idx = index(dataset);
  ordered_json root = ordered_json::object();
  for (const auto& [id, list] : nbest) {
    const auto& ex = lookup(idx, id);
    ordered_json arr = ordered_json::array();
    for (const auto& p : list) arr.push_back(prediction_entry(p, ex));
    root[id] = std::move(arr);
  }
  return root.dump(1) + "\n";
}

NBestMap read_nbest(const std::filesystem::path& path, std::span<const MRCExample> dataset) {
  return parse_nbest(read_text(path), dataset);
}

void write_nbest(const std::filesystem::path& path, const NBestMap& nbest,
                 std::span<const MRCExample> dataset) {
  write_text(path, nbest_json(nbest, dataset));
}

std::vector<CorrectorRecord> parse_corrector_records(std::string_view text) {
  std::vector<CorrectorRecord> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    const std::string what = "corrector record line " + std::to_string(line_no);
    const auto j = parse_json(line, what);
    CorrectorRecord r;
    r.question = field<std::string>(j, "question", what);
    r.context = field<std::string>(j, "context", what);
    r.example.source_example_id = field<std::string>(j, "source_id", what);
    r.example.marked_span = span_from_chars(r.context, field<long long>(j, "marked_start", what),
                                            field<long long>(j, "marked_end", what), what);
    r.example.target_span = span_from_chars(r.context, field<long long>(j, "target_start", what),
                                            field<long long>(j, "target_end", what), what);
    r.example.is_identity = field<bool>(j, "is_identity", what);
    if (r.example.is_identity != (r.example.marked_span == r.example.target_span)) {
      throw DataError(what + ": is_identity disagrees with the spans");
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::string corrector_records_jsonl(std::span<const CorrectorRecord> records) {
  std::string out;
  for (const auto& r : records) {
    ordered_json j;
    j["source_id"] = r.example.source_example_id;
    j["question"] = r.question;
    j["context"] = r.context;
    j["marked_start"] = utf8::char_offset(r.context, r.example.marked_span.start());
    j["marked_end"] = utf8::char_offset(r.context, r.example.marked_span.end());
    j["target_start"] = utf8::char_offset(r.context, r.example.target_span.start());
    j["target_end"] = utf8::char_offset(r.context, r.example.target_span.end());
    j["is_identity"] = r.example.is_identity;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<CorrectorRecord> read_corrector_records(const std::filesystem::path& path) {
  return parse_corrector_records(read_text(path));
}

void write_corrector_records(const std::filesystem::path& path,
                             std::span<const CorrectorRecord> records) {
  write_text(path, corrector_records_jsonl(records));
}

FoldPlan parse_fold_plan(std::string_view text) {
  const auto root = parse_json(text, "fold plan");
  FoldPlan plan;
  plan.n_folds = field<int>(root, "n_folds", "fold plan");
  plan.seed = field<std::uint64_t>(root, "seed", "fold plan");
  plan.holdouts = field<std::vector<std::vector<std::string>>>(root, "holdouts", "fold plan");
  if (plan.n_folds < 2 || plan.holdouts.size() != static_cast<std::size_t>(plan.n_folds)) {
    throw DataError("fold plan: holdout count does not match n_folds");
  }
  for (int f = 0; f < plan.n_folds; ++f) {
    for (const auto& id : plan.holdouts[static_cast<std::size_t>(f)]) {
      if (!plan.assignments.emplace(id, f).second) {
        throw DataError("fold plan: id '" + id + "' assigned twice");
      }
    }
  }
  return plan;
}

std::string fold_plan_json(const FoldPlan& plan) {
  ordered_json root;
  root["n_folds"] = plan.n_folds;
  root["seed"] = plan.seed;
  root["holdouts"] = plan.holdouts;
  return root.dump(1) + "\n";
}

std::map<std::string, std::optional<ErrorCategory>> parse_labels(std::string_view text) {
  const auto root = parse_json(text, "labels");
  if (!root.is_object()) throw DataError("labels: expected a JSON object");
  std::map<std::string, std::optional<ErrorCategory>> out;
  for (const auto& [id, v] : root.items()) {
    if (v.is_null()) {
      out[id] = std::nullopt;
    } else if (v.is_string()) {
      out[id] = parse_category(v.get<std::string>());
    } else {
      throw DataError("labels: '" + id + "' must be a category name or null");
    }
  }
  return out;
}

std::string labels_json(const std::map<std::string, std::optional<ErrorCategory>>& labels) {
  ordered_json root = ordered_json::object();
  for (const auto& [id, c] : labels) {
    root[id] = c ? ordered_json(std::string(to_string(*c))) : ordered_json(nullptr);
  }
  return root.dump(1) + "\n";
}

LanguageGrid parse_language_grid(std::string_view text) {
  const auto root = parse_json(text, "language grid");
  if (!root.is_object()) throw DataError("language grid: expected a JSON object");
  LanguageGrid grid;
  for (const auto& [q, row] : root.items()) {
    if (!row.is_object()) throw DataError("language grid: row '" + q + "' must be an object");
    for (const auto& [c, v] : row.items()) {
      if (!v.is_number()) throw DataError("language grid: value for " + q + "/" + c);
      grid.set(q, c, v.get<double>());
    }
  }
  return grid;
}

}  // namespace spancorr::io
