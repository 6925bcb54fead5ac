#include "spancorr/synth.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>

#include "spancorr/error.hpp"
#include "spancorr/metrics.hpp"
#include "spancorr/rng.hpp"
#include "spancorr/tokenizer.hpp"

namespace spancorr {
namespace {

// ---------------------------------------------------------------------------
// Corpus generation

struct Sentence {
  std::vector<std::string> words;
  /// Word ranges [first, last) of the answer parts, in order.
  std::vector<std::pair<std::size_t, std::size_t>> answer;
};

class Picker {
 public:
  explicit Picker(Rng& rng) : rng_(rng) {}

  /// Draws from a pool without repeating within one example.
  const std::string& distinct(const std::vector<std::string>& pool) {
    auto& used = used_[&pool];
    if (used.size() >= pool.size()) used.clear();
    while (true) {
      const auto i = uniform_index(rng_, pool.size());
      if (used.insert(i).second) return pool[i];
    }
  }
  const std::string& any(const std::vector<std::string>& pool) {
    return pool[uniform_index(rng_, pool.size())];
  }

 private:
  Rng& rng_;
  std::map<const std::vector<std::string>*, std::set<std::size_t>> used_;
};

void push_words(std::vector<std::string>& out, std::string_view phrase) {
  std::size_t i = 0;
  while (i < phrase.size()) {
    while (i < phrase.size() && phrase[i] == ' ') ++i;
    const std::size_t start = i;
    while (i < phrase.size() && phrase[i] != ' ') ++i;
    if (i > start) out.emplace_back(phrase.substr(start, i - start));
  }
}

std::string plural(const std::string& noun) {
  if (noun.ends_with("s") || noun.ends_with("ch") || noun.ends_with("sh")) return noun + "es";
  return noun + "s";
}

/// "The <role> of the <event> was|were <answer> ."
Sentence fact_sentence(TemplateKind kind, bool multi_span, const std::string& role,
                       const std::string& event, const SynthConfig& cfg, Picker& pick, Rng& rng) {
  Sentence s;
  s.words.push_back("The");
  push_words(s.words, kind == TemplateKind::ListAnswer ? plural(role) : role);
  s.words.push_back("of");
  s.words.push_back("the");
  push_words(s.words, event);
  s.words.push_back(kind == TemplateKind::ListAnswer ? "were" : "was");
  const std::size_t begin = s.words.size();
  switch (kind) {
    case TemplateKind::PlainEntity:
      s.words.push_back(pick.distinct(cfg.given_names));
      s.answer.emplace_back(begin, s.words.size());
      break;
    case TemplateKind::QualifiedAnswer:
      s.words.push_back(pick.distinct(cfg.given_names));
      s.words.push_back(pick.any(cfg.family_names));
      if (uniform01(rng) < 0.5) {
        s.words.push_back("from");
        s.words.push_back("Team");
        s.words.push_back(pick.any(cfg.teams));
      } else {
        s.words.push_back("of");
        s.words.push_back("the");
        s.words.push_back(pick.any(cfg.places));
        s.words.push_back("club");
      }
      s.answer.emplace_back(begin, s.words.size());
      break;
    case TemplateKind::ListAnswer: {
      const int items = uniform_int(rng, 2, 4);
      for (int i = 0; i < items; ++i) {
        if (i > 0) s.words.push_back((i == items - 1 && !multi_span) ? "and" : ",");
        s.words.push_back(pick.distinct(cfg.given_names));
        if (multi_span) s.answer.emplace_back(s.words.size() - 1, s.words.size());
      }
      if (!multi_span) s.answer.emplace_back(begin, s.words.size());
      break;
    }
  }
  s.words.push_back(".");
  return s;
}

Sentence filler_sentence(const SynthConfig& cfg, Picker& pick, Rng& rng) {
  Sentence s;
  const std::string& place = pick.any(cfg.places);
  switch (uniform_index(rng, 4)) {
    case 0: push_words(s.words, "It was held near " + place + " ."); break;
    case 1: push_words(s.words, "Many visitors travelled from " + place + " ."); break;
    case 2: push_words(s.words, "Tickets sold out in " + place + " within a day ."); break;
    default:
      push_words(s.words, "The " + pick.any(cfg.events) + " returns to " + place + " next year .");
  }
  return s;
}

// ---------------------------------------------------------------------------
// Flawed reader

bool is_word(std::string_view s) {
  return std::any_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)); });
}

/// Whitespace-token view of one example used to build deformed spans.
struct TokenView {
  const MRCExample* example = nullptr;
  std::vector<CharSpan> tokens;
  std::vector<bool> word;
  std::vector<bool> stop;  // sentence-final "."

  explicit TokenView(const MRCExample& ex) : example(&ex), tokens(whitespace_tokens(ex.context)) {
    for (const auto& t : tokens) {
      const auto text = t.in(ex.context);
      word.push_back(is_word(text));
      stop.push_back(text == ".");
    }
  }

  std::optional<std::size_t> index_starting_at(std::size_t byte) const {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i].start() == byte) return i;
    }
    return std::nullopt;
  }
  std::optional<std::size_t> index_ending_at(std::size_t byte) const {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i].end() == byte) return i;
    }
    return std::nullopt;
  }
  /// First token of the sentence containing token i.
  std::size_t sentence_start(std::size_t i) const {
    while (i > 0 && !stop[i - 1]) --i;
    return i;
  }
  /// Last token of the sentence containing token i.
  std::size_t sentence_end(std::size_t i) const {
    while (i + 1 < tokens.size() && !stop[i]) ++i;
    return i;
  }
  CharSpan span(std::size_t a, std::size_t b) const { return {tokens[a].start(), tokens[b].end()}; }
};

struct Candidate {
  std::size_t first = 0;  // inclusive whitespace-token indices
  std::size_t last = 0;
};

/// Token range of an annotation span, if it is whitespace-token aligned.
std::optional<Candidate> aligned(const TokenView& view, const CharSpan& span) {
  const auto a = view.index_starting_at(span.start());
  const auto b = view.index_ending_at(span.end());
  if (!a || !b || *a > *b) return std::nullopt;
  return Candidate{*a, *b};
}

constexpr std::size_t kMaxLeftExtension = 8;
constexpr std::size_t kMaxRightExtension = 4;

/// Valid partial-match spans of the requested category for a single-span reference.
std::vector<Candidate> single_span_candidates(const TokenView& view, Candidate gt,
                                              ErrorCategory category) {
  const MRCExample& ex = *view.example;
  const auto gts = ex.gt_texts();
  const std::size_t lo = std::max(view.sentence_start(gt.first),
                                  gt.first > kMaxLeftExtension ? gt.first - kMaxLeftExtension : 0);
  const std::size_t hi = std::min(view.sentence_end(gt.last), gt.last + kMaxRightExtension);
  std::vector<Candidate> out;
  for (std::size_t a = lo; a <= hi; ++a) {
    for (std::size_t b = a; b <= hi; ++b) {
      if (!view.word[a] || !view.word[b]) continue;
      if (a == gt.first && b == gt.last) continue;
      ErrorCategory c;
      if (a >= gt.first && b <= gt.last) {
        c = ErrorCategory::PredSubsetGT;
      } else if (a <= gt.first && b >= gt.last) {
        c = ErrorCategory::GTSubsetPred;
      } else if ((a < gt.first && b >= gt.first) || (a <= gt.last && b > gt.last)) {
        c = ErrorCategory::PartialOverlap;
      } else {
        continue;
      }
      if (c != category) continue;
      const auto text = view.span(a, b).in(ex.context);
      if (exact_match(text, gts) == 1 || f1_max(text, ex.ground_truths) <= 0.0) continue;
      out.push_back({a, b});
    }
  }
  return out;
}

Prediction make_prediction(const TokenView& view, Candidate c, double score) {
  const CharSpan span = view.span(c.first, c.last);
  return {view.example->id, std::string(span.in(view.example->context)), span, score};
}

/// Deformation for one category, or nothing if the example cannot realize it.
std::optional<Prediction> deform(const TokenView& view, ErrorCategory category, Rng& rng) {
  const MRCExample& ex = *view.example;
  const Annotation& ref = ex.ground_truths.front();
  if (category == ErrorCategory::MultiSpanGT) {
    if (!ref.is_multi_span()) return std::nullopt;
    const auto& member = ref.spans()[uniform_index(rng, ref.spans().size())];
    return Prediction{ex.id, member.text, member.span, 0.0};
  }
  if (ref.is_multi_span()) return std::nullopt;
  const auto gt = aligned(view, ref.first().span);
  if (!gt) return std::nullopt;
  auto cands = single_span_candidates(view, *gt, category);
  if (cands.empty()) return std::nullopt;
  if (category == ErrorCategory::PredSubsetGT && uniform01(rng) < 0.75) {
    // Mostly drop trailing words, as readers tend to.
    std::vector<Candidate> tail;
    for (const auto& c : cands) {
      if (c.first == gt->first) tail.push_back(c);
    }
    if (!tail.empty()) cands = std::move(tail);
  }
  return make_prediction(view, cands[uniform_index(rng, cands.size())], 0.0);
}

/// The span a correct reader would output: the single span, or the stretch
/// covering every part of a multi-span answer.
std::optional<Prediction> exact_prediction(const MRCExample& ex) {
  const Annotation& ref = ex.ground_truths.front();
  const CharSpan span(ref.spans().front().span.start(), ref.spans().back().span.end());
  Prediction p{ex.id, std::string(span.in(ex.context)), span, 0.0};
  if (exact_match(p.text, ex.gt_texts()) != 1) return std::nullopt;
  return p;
}

/// Lower n-best entries: nearby word-bounded spans with some token overlap.
std::vector<Prediction> nearby_spans(const TokenView& view) {
  const MRCExample& ex = *view.example;
  const Annotation& ref = ex.ground_truths.front();
  const auto first = view.index_starting_at(ref.spans().front().span.start());
  const auto last = view.index_ending_at(ref.spans().back().span.end());
  std::vector<Prediction> out;
  if (!first || !last) return out;
  const std::size_t lo = std::max(view.sentence_start(*first),
                                  *first > kMaxLeftExtension ? *first - kMaxLeftExtension : 0);
  const std::size_t hi = std::min(view.sentence_end(*last), *last + kMaxRightExtension);
  for (std::size_t a = lo; a <= hi; ++a) {
    for (std::size_t b = a; b <= hi; ++b) {
      if (!view.word[a] || !view.word[b]) continue;
      const auto p = make_prediction(view, {a, b}, 0.0);
      if (f1_max(p.text, ex.ground_truths) > 0.0) out.push_back(p);
    }
  }
  return out;
}

std::vector<std::size_t> quotas(std::size_t total, const std::array<double, 4>& rates) {
  std::vector<std::size_t> q(rates.size());
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t assigned = 0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double exact = rates[i] * static_cast<double>(total);
    q[i] = static_cast<std::size_t>(std::floor(exact));
    assigned += q[i];
    remainders.emplace_back(exact - std::floor(exact), i);
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) ++q[remainders[i % q.size()].second];
  return q;
}

}  // namespace

std::string_view to_string(TemplateKind k) {
  switch (k) {
    case TemplateKind::ListAnswer: return "list";
    case TemplateKind::QualifiedAnswer: return "qualified";
    case TemplateKind::PlainEntity: return "plain";
  }
  return "?";
}

SynthConfig SynthConfig::defaults() {
  SynthConfig c;
  c.given_names = {"Nora",  "Ilsa",  "Tomas",  "Bram",  "Odile",  "Petra",   "Kasimir", "Lena",
                   "Mirek", "Anouk", "Soren",  "Talia", "Emil",   "Frida",   "Gustav",  "Hanne",
                   "Ivo",   "Jorun", "Kaja",   "Linus", "Maren",  "Nils",    "Oskar",   "Pia",
                   "Quinn", "Rhea",  "Sten",   "Tove",  "Ulla",   "Viggo",   "Wanda",   "Xaver",
                   "Yrsa",  "Zeno",  "Alma",   "Bodil", "Cato",   "Dagny",   "Espen",   "Fenna",
                   "Gorm",  "Hedda", "Ingrid", "Jens",  "Knut",   "Liv",     "Magnus",  "Nanna"};
  c.family_names = {"Vale",   "Brandt", "Okafor", "Lindqvist", "Moreau",    "Castell", "Duarte",
                    "Falk",   "Grieve", "Holm",   "Ibarra",    "Janssen",   "Kovac",   "Larsen",
                    "Mendes", "Novak",  "Orlov",  "Pryce",     "Quist",     "Rasmussen", "Sato",
                    "Thorne", "Ueda",   "Varga",  "Weiss",     "Yilmaz",    "Zorn",    "Abbott",
                    "Bishop", "Crane",  "Dahl",   "Ekberg"};
  c.teams = {"Sherif", "Jeffery", "Aurora", "Borealis", "Cobalt", "Delta",  "Ember",    "Falcon",
             "Granite", "Harbor", "Iris",   "Juniper",  "Kestrel", "Lumen", "Meridian", "Nimbus"};
  c.events = {"spring cup",    "river race",    "harvest fair",  "winter derby",  "city marathon",
              "chess open",    "glass festival", "dance final",  "kite contest",  "choir meet",
              "film gala",     "robot league",  "poetry slam",   "baking show",   "sailing regatta",
              "rowing trophy", "science expo",  "garden show",   "jazz night",    "tennis open",
              "comic fair",    "quiz bowl",     "art biennial",  "street parade"};
  c.roles = {"winner", "captain", "founder",  "judge", "host",    "sponsor",
             "organizer", "champion", "coach", "referee", "mentor", "narrator"};
  c.places = {"Ardmore", "Bexley", "Corran", "Dunmore", "Elgin",  "Fintona",
              "Galway",  "Hexham", "Inverness", "Jarrow", "Kelso", "Lisburn"};
  return c;
}

void SynthConfig::validate() const {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw ConfigError("template weights must be non-negative");
    sum += w;
  }
  if (!(sum > 0.0)) throw ConfigError("template weights must not all be zero");
  if (multi_span_fraction < 0.0 || multi_span_fraction > 1.0) {
    throw ConfigError("multi-span fraction must be in [0, 1]");
  }
  if (min_distractors < 0 || max_distractors < min_distractors || min_filler < 0 ||
      max_filler < min_filler) {
    throw ConfigError("invalid distractor or filler range");
  }
  if (given_names.size() < 5 || family_names.empty() || teams.empty() || events.size() < 2 ||
      roles.empty() || places.empty()) {
    throw ConfigError("vocabulary pools are empty or too small");
  }
}

SynthCorpus gen_corpus(const SynthConfig& config) {
  config.validate();
  SynthCorpus corpus;
  const int width = std::max<int>(5, static_cast<int>(std::to_string(config.n_examples).size()));
  for (std::size_t index = 0; index < config.n_examples; ++index) {
    Rng rng(derive_seed(config.seed, {index}));
    Picker pick(rng);
    const auto kind = static_cast<TemplateKind>(sample_weighted(rng, config.weights));
    const bool multi = kind == TemplateKind::ListAnswer && uniform01(rng) < config.multi_span_fraction;
    const std::string role = pick.distinct(config.roles);
    const std::string event = pick.distinct(config.events);

    std::vector<Sentence> sentences;
    sentences.push_back(fact_sentence(kind, multi, role, event, config, pick, rng));
    const int distractors = uniform_int(rng, config.min_distractors, config.max_distractors);
    for (int d = 0; d < distractors; ++d) {
      const auto dkind = static_cast<TemplateKind>(uniform_index(rng, 3));
      // A distractor never repeats the asked (role, event) pair.
      const bool same_event = uniform01(rng) < 0.3;
      std::string drole = same_event ? pick.distinct(config.roles) : pick.any(config.roles);
      std::string devent = same_event ? event : pick.distinct(config.events);
      Sentence s = fact_sentence(dkind, false, drole, devent, config, pick, rng);
      s.answer.clear();
      sentences.push_back(std::move(s));
    }
    const int fillers = uniform_int(rng, config.min_filler, config.max_filler);
    for (int f = 0; f < fillers; ++f) sentences.push_back(filler_sentence(config, pick, rng));
    shuffle(sentences, rng);

    MRCExample ex;
    char id[64];
    std::snprintf(id, sizeof id, "%s-%0*zu", config.id_prefix.c_str(), width, index);
    ex.id = id;
    ex.question = (kind == TemplateKind::ListAnswer ? "who were the " + plural(role) + " of the "
                                                    : "who was the " + role + " of the ") +
                  event + " ?";
    std::vector<CharSpan> answer_spans;
    for (const auto& s : sentences) {
      std::vector<std::size_t> starts;
      for (const auto& w : s.words) {
        if (!ex.context.empty()) ex.context += ' ';
        starts.push_back(ex.context.size());
        ex.context += w;
      }
      for (const auto& [a, b] : s.answer) {
        answer_spans.emplace_back(starts[a], starts[b - 1] + s.words[b - 1].size());
      }
    }
    ex.ground_truths.push_back(Annotation::from_spans(answer_spans, ex.context));
    corpus.examples.push_back(std::move(ex));
    corpus.kinds.push_back(kind);
  }
  return corpus;
}

double CategoryRates::rate(ErrorCategory c) const {
  switch (c) {
    case ErrorCategory::PredSubsetGT: return pred_subset_gt;
    case ErrorCategory::GTSubsetPred: return gt_subset_pred;
    case ErrorCategory::PartialOverlap: return partial_overlap;
    case ErrorCategory::MultiSpanGT: return multi_span_gt;
    case ErrorCategory::UnresolvedTextOverlap: return 0.0;
  }
  return 0.0;
}

void ErrorInjectionConfig::validate() const {
  if (partial_rate < 0.0 || partial_rate > 1.0) throw ConfigError("partial-match rate must be in [0, 1]");
  const std::array<double, 4> r = {rates.pred_subset_gt, rates.gt_subset_pred,
                                   rates.partial_overlap, rates.multi_span_gt};
  double sum = 0.0;
  for (double v : r) {
    if (v < 0.0 || v > 1.0) throw ConfigError("category rates must be in [0, 1]");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw ConfigError("category rates must sum to 1");
  if (nbest_size == 0) throw ConfigError("n-best size must be at least 1");
}

FlawedReaderOutput flawed_reader(std::span<const MRCExample> examples,
                                 const ErrorInjectionConfig& config) {
  config.validate();
  FlawedReaderOutput out;
  out.summary.examples = examples.size();

  // Order of categories when filling quotas: most constrained first.
  const std::array<ErrorCategory, 4> order = {ErrorCategory::MultiSpanGT,
                                              ErrorCategory::PartialOverlap,
                                              ErrorCategory::PredSubsetGT,
                                              ErrorCategory::GTSubsetPred};
  std::array<double, 4> rates{};
  for (std::size_t i = 0; i < order.size(); ++i) rates[i] = config.rates.rate(order[i]);
  const auto partial_total = static_cast<std::size_t>(
      std::llround(config.partial_rate * static_cast<double>(examples.size())));
  auto quota = quotas(partial_total, rates);

  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < examples.size(); ++i) {
    if (examples[i].ground_truths.size() == 1) candidates.push_back(i);
  }
  Rng order_rng(derive_seed(config.seed, {0x0DE7}));
  shuffle(candidates, order_rng);

  std::vector<std::optional<Prediction>> top(examples.size());
  std::vector<std::optional<ErrorCategory>> label(examples.size());
  std::vector<TokenView> views;
  views.reserve(examples.size());
  for (const auto& ex : examples) views.emplace_back(ex);

  Rng resample_rng(derive_seed(config.seed, {0x5A3E}));
  for (std::size_t ci = 0; ci < order.size(); ++ci) {
    const ErrorCategory category = order[ci];
    std::size_t filled = 0;
    for (std::size_t idx : candidates) {
      if (filled == quota[ci]) break;
      if (label[idx]) continue;
      Rng rng(derive_seed(config.seed, {idx, static_cast<std::uint64_t>(category)}));
      auto p = deform(views[idx], category, rng);
      if (!p) continue;
      top[idx] = std::move(p);
      label[idx] = category;
      ++filled;
    }
    const std::size_t shortfall = quota[ci] - filled;
    if (shortfall == 0) continue;
    // Move the unmet quota to the remaining categories in proportion to their rates.
    double rest = 0.0;
    for (std::size_t cj = ci + 1; cj < order.size(); ++cj) rest += rates[cj];
    if (rest <= 0.0) {
      out.summary.unsatisfied += shortfall;
      continue;
    }
    for (std::size_t k = 0; k < shortfall; ++k) {
      std::vector<double> w(rates.begin() + static_cast<std::ptrdiff_t>(ci + 1), rates.end());
      ++quota[ci + 1 + sample_weighted(resample_rng, w)];
      ++out.summary.resampled;
    }
  }

  for (std::size_t idx = 0; idx < examples.size(); ++idx) {
    const MRCExample& ex = examples[idx];
    Rng rng(derive_seed(config.seed, {idx, 0xB357}));
    if (!top[idx] && ex.ground_truths.size() == 1) top[idx] = exact_prediction(ex);
    if (!top[idx]) {
      // Examples the simulator cannot handle get their first annotation span.
      const auto& s = ex.ground_truths.front().first();
      top[idx] = Prediction{ex.id, s.text, s.span, 0.0};
    }
    NBestList list;
    double score = 8.0 + 4.0 * uniform01(rng);
    Prediction first = *top[idx];
    first.score = score;
    list.push_back(first);

    auto pool = nearby_spans(views[idx]);
    std::erase_if(pool, [&](const Prediction& p) { return p.span == first.span; });
    const auto exact = exact_prediction(ex);
    if (exact && label[idx]) {
      std::erase_if(pool, [&](const Prediction& p) { return p.span == exact->span; });
      if (uniform01(rng) < 0.5) pool.insert(pool.begin(), *exact);
    }
    shuffle(pool, rng);
    for (auto& p : pool) {
      if (list.size() >= config.nbest_size) break;
      score -= 0.2 + 1.5 * uniform01(rng);
      p.score = score;
      list.push_back(std::move(p));
    }
    out.predictions[ex.id] = list.front();
    out.nbest[ex.id] = std::move(list);
    out.labels[ex.id] = label[idx];
    if (label[idx]) {
      ++out.summary.injected;
      ++out.summary.per_category[*label[idx]];
    }
  }
  return out;
}

FlawedReaderOutput flawed_reader_by_fold(std::span<const MRCExample> examples,
                                         const FoldPlan& plan,
                                         const ErrorInjectionConfig& config) {
  config.validate();
  std::vector<std::vector<MRCExample>> folds(static_cast<std::size_t>(plan.n_folds));
  for (const auto& ex : examples) {
    const auto it = plan.assignments.find(ex.id);
    if (it == plan.assignments.end()) throw DataError("example '" + ex.id + "' is not in the fold plan");
    folds[static_cast<std::size_t>(it->second)].push_back(ex);
  }
  FlawedReaderOutput out;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    ErrorInjectionConfig fold_config = config;
    fold_config.seed = derive_seed(config.seed, {f});
    auto part = flawed_reader(folds[f], fold_config);
    out.predictions.merge(part.predictions);
    out.nbest.merge(part.nbest);
    out.labels.merge(part.labels);
    out.summary.examples += part.summary.examples;
    out.summary.injected += part.summary.injected;
    out.summary.resampled += part.summary.resampled;
    out.summary.unsatisfied += part.summary.unsatisfied;
    for (const auto& [c, n] : part.summary.per_category) out.summary.per_category[c] += n;
  }
  return out;
}

}  // namespace spancorr
