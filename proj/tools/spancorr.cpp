// spancorr: reader/corrector pipeline driver.

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <memory>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "spancorr/checkpoint.hpp"
#include "spancorr/datagen.hpp"
#include "spancorr/error.hpp"
#include "spancorr/io.hpp"
#include "spancorr/metrics.hpp"
#include "spancorr/pipeline.hpp"
#include "spancorr/reporting.hpp"
#include "spancorr/significance.hpp"
#include "spancorr/synth.hpp"
#include "spancorr/taxonomy.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace spancorr;

namespace {

struct ModelFlags {
  ModelConfig model;
  TrainConfig train;
  std::string optimizer = "sgd";
  int min_count = 1;
  bool verbose = false;

  ReaderTraining setup() const {
    ReaderTraining s{model, train, min_count};
    s.train.optimizer = parse_optimizer(optimizer);
    return s;
  }
  TrainOptions options() const {
    TrainOptions o;
    if (verbose) {
      o.on_step = [](std::size_t step, std::size_t total, double loss) {
        if (step % 10 == 0 || step == total) {
          std::fprintf(stderr, "step %zu/%zu loss %.4f\n", step, total, loss);
        }
      };
    }
    return o;
  }
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--layers", f.model.layers, "Encoder layers")->capture_default_str();
  cmd->add_option("--heads", f.model.heads, "Attention heads")->capture_default_str();
  cmd->add_option("--dim", f.model.dim, "Embedding dim")->capture_default_str();
  cmd->add_option("--ff-dim", f.model.ff_dim, "Feed-forward dim")->capture_default_str();
  cmd->add_option("--max-seq-len", f.model.max_seq_len)->capture_default_str();
  cmd->add_option("--max-query-len", f.model.max_query_len)->capture_default_str();
  cmd->add_option("--max-answer-len", f.model.max_answer_len)->capture_default_str();
  cmd->add_option("--dropout", f.model.dropout)->capture_default_str();
  cmd->add_option("--model-seed", f.model.seed, "Initialization seed")->capture_default_str();
  cmd->add_option("--epochs", f.train.epochs)->capture_default_str();
  cmd->add_option("--batch-size", f.train.batch_size)->capture_default_str();
  cmd->add_option("--lr", f.train.learning_rate, "Peak learning rate")->capture_default_str();
  cmd->add_option("--warmup", f.train.warmup, "Warmup fraction of steps")->capture_default_str();
  cmd->add_option("--optimizer", f.optimizer, "sgd or adam")->capture_default_str();
  cmd->add_option("--clip-norm", f.train.clip_norm)->capture_default_str();
  cmd->add_option("--seed", f.train.seed, "Shuffling and dropout seed")->capture_default_str();
  cmd->add_option("--min-count", f.min_count, "Vocabulary count threshold")->capture_default_str();
  cmd->add_flag("--verbose", f.verbose, "Print training progress to stderr");
}

void print_json(const ordered_json& j) { std::cout << j.dump(2) << "\n"; }

std::vector<SpanModel> load_models(const std::vector<std::string>& paths) {
  std::vector<SpanModel> models;
  models.reserve(paths.size());
  for (const auto& p : paths) models.push_back(load_checkpoint(fs::path(p)));
  return models;
}

std::vector<const SpanModel*> pointers(const std::vector<SpanModel>& models) {
  std::vector<const SpanModel*> out;
  for (const auto& m : models) out.push_back(&m);
  return out;
}

ordered_json summary_json(const InjectionSummary& s) {
  ordered_json j;
  j["examples"] = s.examples;
  j["injected"] = s.injected;
  ordered_json per = ordered_json::object();
  for (const auto c : kAllCategories) {
    const auto it = s.per_category.find(c);
    per[std::string(to_string(c))] = it == s.per_category.end() ? 0 : it->second;
  }
  j["per_category"] = per;
  j["resampled"] = s.resampled;
  j["unsatisfied"] = s.unsatisfied;
  return j;
}

ordered_json training_json(const TrainingSummary& s) {
  ordered_json j;
  j["examples"] = s.examples;
  j["rejected"] = s.rejected;
  j["steps"] = s.steps;
  j["final_loss"] = s.batch_losses.empty() ? 0.0 : s.batch_losses.back();
  return j;
}

FoldPlan fold_plan_for(const std::vector<MRCExample>& data, const std::string& plan_path,
                       int folds, std::uint64_t seed) {
  if (!plan_path.empty()) {
    auto plan = io::parse_fold_plan(io::read_text(plan_path));
    if (plan.assignments.size() != data.size()) {
      throw DataError("fold plan does not cover the dataset");
    }
    for (const auto& ex : data) {
      if (!plan.assignments.contains(ex.id)) {
        throw DataError("fold plan has no entry for '" + ex.id + "'");
      }
    }
    return plan;
  }
  std::vector<std::string> ids;
  for (const auto& ex : data) ids.push_back(ex.id);
  return make_fold_plan(ids, folds, seed);
}

int run(int argc, char** argv) {
  CLI::App app{"Answer-span correction pipeline for extractive reading comprehension"};
  app.set_config("--config", "", "TOML config file; command-line flags take precedence");
  app.require_subcommand(1);
  app.fallthrough();
  int jobs = 1;
  app.add_option("--jobs", jobs, "Worker threads for fold training and prediction")
      ->capture_default_str();

  // gen-corpus
  auto* gen = app.add_subcommand("gen-corpus", "Generate synthetic train and dev sets");
  std::string gen_out = "data";
  std::size_t train_size = 2000;
  std::size_t dev_size = 500;
  std::uint64_t gen_seed = 1;
  std::vector<double> weights = {1.0, 1.0, 1.0};
  auto synth_defaults = SynthConfig::defaults();
  gen->add_option("--out-dir", gen_out)->capture_default_str();
  gen->add_option("--train-size", train_size)->capture_default_str();
  gen->add_option("--dev-size", dev_size)->capture_default_str();
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--weights", weights, "list,qualified,plain template weights")
      ->expected(3)
      ->delimiter(',');
  gen->add_option("--multi-span-fraction", synth_defaults.multi_span_fraction)
      ->capture_default_str();

  // simulate-reader
  auto* sim = app.add_subcommand("simulate-reader", "Flawed reader with injected span errors");
  std::string sim_data, sim_pred, sim_nbest, sim_labels, sim_plan;
  ErrorInjectionConfig inject;
  std::vector<double> rates;
  int sim_folds = 0;
  std::uint64_t sim_fold_seed = 0;
  sim->add_option("--data", sim_data)->required();
  sim->add_option("--out-predictions", sim_pred)->required();
  sim->add_option("--out-nbest", sim_nbest);
  sim->add_option("--out-labels", sim_labels);
  sim->add_option("--partial-rate", inject.partial_rate)->capture_default_str();
  sim->add_option("--rates", rates, "PredSubsetGT,GTSubsetPred,PartialOverlap,MultiSpanGT")
      ->expected(4)
      ->delimiter(',');
  sim->add_option("--seed", inject.seed)->capture_default_str();
  sim->add_option("--nbest-size", inject.nbest_size)->capture_default_str();
  sim->add_option("--folds", sim_folds, "Simulate out-of-fold output over this many folds (0: off)")
      ->capture_default_str();
  sim->add_option("--fold-plan", sim_plan, "Fold plan file (overrides --folds)");
  sim->add_option("--fold-seed", sim_fold_seed)->capture_default_str();

  // plan-folds
  auto* plan_cmd = app.add_subcommand("plan-folds", "Assign training ids to folds");
  std::string plan_data, plan_out;
  int plan_folds = 5;
  std::uint64_t plan_seed = 0;
  plan_cmd->add_option("--data", plan_data)->required();
  plan_cmd->add_option("--out", plan_out)->required();
  plan_cmd->add_option("--folds", plan_folds)->capture_default_str();
  plan_cmd->add_option("--seed", plan_seed)->capture_default_str();

  // train-reader
  auto* tr = app.add_subcommand("train-reader", "Train a reader on a dataset");
  std::string tr_data, tr_out;
  ModelFlags tr_flags;
  tr->add_option("--data", tr_data)->required();
  tr->add_option("--out", tr_out, "Checkpoint path")->required();
  add_model_flags(tr, tr_flags);

  // predict
  auto* pred = app.add_subcommand("predict", "Reader predictions; --kfold for out-of-fold n-best");
  std::string pred_data, pred_out, pred_nbest_out, pred_plan;
  std::vector<std::string> pred_models;
  std::size_t pred_n = 20;
  bool kfold = false;
  int pred_folds = 5;
  std::uint64_t pred_fold_seed = 0;
  ModelFlags pred_flags;
  pred->add_option("--data", pred_data)->required();
  pred->add_option("--model", pred_models, "Checkpoint; repeat to ensemble by mean logits");
  pred->add_option("--out-predictions", pred_out);
  pred->add_option("--out-nbest", pred_nbest_out);
  pred->add_option("--nbest", pred_n, "N-best size")->capture_default_str();
  pred->add_flag("--kfold", kfold, "Train one reader per fold and predict its holdout");
  pred->add_option("--folds", pred_folds)->capture_default_str();
  pred->add_option("--fold-plan", pred_plan);
  pred->add_option("--fold-seed", pred_fold_seed)->capture_default_str();
  add_model_flags(pred, pred_flags);

  // gen-corrector-data
  auto* gcd = app.add_subcommand("gen-corrector-data", "Build corrector training records");
  std::string gcd_data, gcd_nbest, gcd_out;
  int k = 2;
  gcd->add_option("--data", gcd_data)->required();
  gcd->add_option("--nbest", gcd_nbest, "Out-of-fold n-best file")->required();
  gcd->add_option("--out", gcd_out, "JSONL output")->required();
  gcd->add_option("--k", k, "Incorrect predictions per example")->capture_default_str();

  // train-corrector
  auto* tc = app.add_subcommand("train-corrector", "Train a corrector on delimited records");
  std::string tc_records, tc_out;
  ModelFlags tc_flags;
  tc->add_option("--records", tc_records)->required();
  tc->add_option("--out", tc_out, "Checkpoint path")->required();
  add_model_flags(tc, tc_flags);

  // correct
  auto* cor = app.add_subcommand("correct", "Apply a corrector to reader predictions");
  std::string cor_data, cor_pred, cor_model, cor_out;
  cor->add_option("--data", cor_data)->required();
  cor->add_option("--predictions", cor_pred)->required();
  cor->add_option("--model", cor_model)->required();
  cor->add_option("--out", cor_out)->required();

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "EM and F1 of predictions against gold");
  std::string ev_data, ev_pred, ev_out;
  bool keep_articles = false;
  ev->add_option("--data", ev_data)->required();
  ev->add_option("--predictions", ev_pred)->required();
  ev->add_option("--out", ev_out, "Also write the summary JSON here");
  ev->add_flag("--keep-articles", keep_articles, "Do not strip English articles");

  // analyze
  auto* an = app.add_subcommand("analyze", "Error taxonomy, change and per-category reports");
  std::string an_data, an_reader, an_corr, an_out = "reports";
  an->add_option("--data", an_data)->required();
  an->add_option("--reader", an_reader)->required();
  an->add_option("--corrector", an_corr)->required();
  an->add_option("--out-dir", an_out)->capture_default_str();
  an->add_flag("--keep-articles", keep_articles, "Do not strip English articles");

  // sigtest
  auto* sig = app.add_subcommand("sigtest", "Paired Fisher randomization test on EM");
  std::string sig_data, sig_a, sig_b;
  RandomizationOptions rand_opts;
  sig->add_option("--data", sig_data)->required();
  sig->add_option("--a", sig_a, "Predictions of system A")->required();
  sig->add_option("--b", sig_b, "Predictions of system B")->required();
  sig->add_option("--resamples", rand_opts.resamples)->capture_default_str();
  sig->add_option("--seed", rand_opts.seed)->capture_default_str();
  sig->add_option("--exhaustive-limit", rand_opts.exhaustive_limit)->capture_default_str();
  sig->add_flag("--keep-articles", keep_articles, "Do not strip English articles");

  // xlt-delta
  auto* xlt = app.add_subcommand("xlt-delta", "EM change per question/context language pair");
  std::string xlt_base, xlt_sys, xlt_out = "reports";
  xlt->add_option("--baseline", xlt_base)->required();
  xlt->add_option("--system", xlt_sys)->required();
  xlt->add_option("--out-dir", xlt_out)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    std::cerr << "spancorr: error[usage]: " << msg << "\n";
    return 1;
  }
  if (jobs < 1) throw ConfigError("--jobs must be at least 1");
  const NormalizeOptions norm{!keep_articles};

  if (*gen) {
    SynthConfig cfg = synth_defaults;
    for (std::size_t i = 0; i < 3; ++i) cfg.weights[i] = weights[i];
    cfg.validate();
    ordered_json out;
    for (const auto& [name, size, tag] :
         {std::tuple<std::string, std::size_t, std::uint64_t>{"train", train_size, 1},
          {"dev", dev_size, 2}}) {
      cfg.n_examples = size;
      cfg.seed = derive_seed(gen_seed, {tag});
      cfg.id_prefix = name;
      const auto corpus = gen_corpus(cfg);
      io::write_dataset(fs::path(gen_out) / (name + ".json"), corpus.examples);
      ordered_json kinds = ordered_json::object();
      std::map<std::string, std::size_t> counts;
      for (std::size_t i = 0; i < corpus.examples.size(); ++i) {
        kinds[corpus.examples[i].id] = std::string(to_string(corpus.kinds[i]));
        ++counts[std::string(to_string(corpus.kinds[i]))];
      }
      io::write_text(fs::path(gen_out) / (name + ".templates.json"), kinds.dump(1) + "\n");
      out[name] = {{"examples", size}, {"templates", counts}};
    }
    print_json(out);
    return 0;
  }

  if (*sim) {
    if (!rates.empty()) {
      inject.rates = {rates[0], rates[1], rates[2], rates[3]};
    }
    inject.validate();
    const auto data = io::read_dataset(sim_data);
    FlawedReaderOutput out;
    if (sim_folds > 0 || !sim_plan.empty()) {
      out = flawed_reader_by_fold(data, fold_plan_for(data, sim_plan, sim_folds, sim_fold_seed),
                                  inject);
    } else {
      out = flawed_reader(data, inject);
    }
    io::write_predictions(sim_pred, out.predictions, data);
    if (!sim_nbest.empty()) io::write_nbest(sim_nbest, out.nbest, data);
    if (!sim_labels.empty()) io::write_text(sim_labels, io::labels_json(out.labels));
    print_json(summary_json(out.summary));
    return 0;
  }

  if (*plan_cmd) {
    const auto data = io::read_dataset(plan_data);
    const auto plan = fold_plan_for(data, "", plan_folds, plan_seed);
    io::write_text(plan_out, io::fold_plan_json(plan));
    ordered_json sizes = ordered_json::array();
    for (const auto& h : plan.holdouts) sizes.push_back(h.size());
    print_json({{"n_folds", plan.n_folds}, {"holdout_sizes", sizes}});
    return 0;
  }

  if (*tr) {
    const auto setup = tr_flags.setup();
    const auto data = io::read_dataset(tr_data);
    TrainingSummary summary;
    const auto model = train_reader(data, setup, &summary, tr_flags.options());
    save_checkpoint(model, fs::path(tr_out));
    print_json(training_json(summary));
    return 0;
  }

  if (*pred) {
    const auto data = io::read_dataset(pred_data);
    if (pred_out.empty() && pred_nbest_out.empty()) {
      throw ConfigError("predict needs --out-predictions or --out-nbest");
    }
    if (pred_n == 0) throw ConfigError("--nbest must be at least 1");
    NBestMap nbest;
    if (kfold) {
      if (!pred_models.empty()) throw ConfigError("--kfold trains its own readers; drop --model");
      const auto setup = pred_flags.setup();
      const auto plan = fold_plan_for(data, pred_plan, pred_folds, pred_fold_seed);
      nbest = kfold_nbest(data, plan, setup, pred_n, jobs);
    } else {
      if (pred_models.empty()) throw ConfigError("predict needs --model (or --kfold)");
      const auto models = load_models(pred_models);
      nbest = predict_all(pointers(models), data, pred_n, jobs);
    }
    if (!pred_nbest_out.empty()) io::write_nbest(pred_nbest_out, nbest, data);
    const auto preds = top1(nbest);
    if (!pred_out.empty()) io::write_predictions(pred_out, preds, data);
    const auto eval = evaluate(preds, data);
    print_json({{"examples", nbest.size()}, {"exact_match", eval.exact_match}, {"f1", eval.f1}});
    return 0;
  }

  if (*gcd) {
    if (k < 0) throw ConfigError("--k must be non-negative");
    const auto data = io::read_dataset(gcd_data);
    const auto nbest = io::read_nbest(gcd_nbest, data);
    std::vector<CorrectorExample> examples;
    GenerationSummary summary;
    for (const auto& ex : data) {
      const auto it = nbest.find(ex.id);
      if (it == nbest.end()) throw DataError("n-best file has no entry for '" + ex.id + "'");
      auto part = build_corrector_examples(ex, it->second, k, &summary);
      examples.insert(examples.end(), part.begin(), part.end());
    }
    sort_corrector_examples(examples);
    io::write_corrector_records(gcd_out, attach_text(examples, data));
    print_json({{"examples", summary.examples},
                {"usable", summary.usable},
                {"skipped_multi_span", summary.skipped_multi_span},
                {"identity", summary.identity},
                {"corrections", summary.corrections},
                {"duplicate_texts", summary.duplicate_texts},
                {"unresolved_predictions", summary.unresolved_predictions}});
    return 0;
  }

  if (*tc) {
    const auto setup = tc_flags.setup();
    const auto records = io::read_corrector_records(tc_records);
    if (records.empty()) throw DataError("no corrector records in '" + tc_records + "'");
    TrainingSummary summary;
    const auto model = train_corrector(records, setup, &summary, tc_flags.options());
    save_checkpoint(model, fs::path(tc_out));
    print_json(training_json(summary));
    return 0;
  }

  if (*cor) {
    const auto data = io::read_dataset(cor_data);
    const auto reader = io::read_predictions(cor_pred, data);
    const auto model = load_checkpoint(fs::path(cor_model));
    const auto corrected = correct_all(reader, data, model, jobs);
    io::write_predictions(cor_out, corrected, data);
    std::size_t changed = 0;
    for (const auto& [id, p] : corrected) {
      if (normalize_text(p.text) != normalize_text(reader.at(id).text)) ++changed;
    }
    print_json({{"examples", corrected.size()}, {"changed", changed}});
    return 0;
  }

  if (*ev) {
    const auto data = io::read_dataset(ev_data);
    const auto preds = io::read_predictions(ev_pred, data);
    const auto s = evaluate(preds, data, norm);
    const ordered_json j = {{"count", s.count}, {"exact_match", s.exact_match}, {"f1", s.f1}};
    if (!ev_out.empty()) io::write_text(ev_out, j.dump(2) + "\n");
    print_json(j);
    return 0;
  }

  if (*an) {
    const auto data = io::read_dataset(an_data);
    const auto reader = io::read_predictions(an_reader, data);
    const auto corrector = io::read_predictions(an_corr, data);
    const fs::path dir(an_out);
    std::vector<TaxonomyCase> cases;
    for (const auto& ex : data) {
      const auto it = reader.find(ex.id);
      if (it == reader.end()) continue;
      cases.push_back({it->second, ex.ground_truths, ex.context});
    }
    const auto taxonomy = distribution(cases, norm);
    io::write_text(dir / "taxonomy.txt", taxonomy.to_table());
    io::write_text(dir / "taxonomy.csv", taxonomy.to_csv());
    const auto changes = change_stats(reader, corrector, data, norm);
    io::write_text(dir / "changes.txt", changes.to_table());
    io::write_text(dir / "changes.csv", changes.to_csv());
    const auto labelled = label_partial_matches(reader, data, norm);
    const auto per_cat = category_correction_stats(labelled, corrector, data, norm);
    io::write_text(dir / "categories.txt", per_cat.to_table());
    io::write_text(dir / "categories.csv", per_cat.to_csv());
    const auto a = evaluate(reader, data, norm);
    const auto b = evaluate(corrector, data, norm);
    const std::vector<std::pair<std::string, double>> rows = {{"Reader", a.exact_match},
                                                              {"Reader + Corrector", b.exact_match}};
    io::write_text(dir / "em.txt", em_table(rows));
    std::cout << taxonomy.to_table() << "\n" << changes.to_table() << "\n" << per_cat.to_table();
    return 0;
  }

  if (*sig) {
    const auto data = io::read_dataset(sig_data);
    const auto a = io::read_predictions(sig_a, data);
    const auto b = io::read_predictions(sig_b, data);
    PairedScores scores;
    for (const auto& ex : data) scores.ids.push_back(ex.id);
    scores.a = per_example_em(a, data, norm);
    scores.b = per_example_em(b, data, norm);
    const auto r = fisher_randomization(scores, rand_opts);
    print_json({{"n", r.n},
                {"statistic", r.statistic},
                {"p", r.p_value},
                {"method", std::string(to_string(r.method))},
                {"resamples", r.resamples},
                {"seed", r.seed}});
    return 0;
  }

  if (*xlt) {
    const auto base = io::parse_language_grid(io::read_text(xlt_base));
    const auto system = io::parse_language_grid(io::read_text(xlt_sys));
    const auto m = delta_matrix(base, system);
    io::write_text(fs::path(xlt_out) / "delta.txt", m.to_table());
    io::write_text(fs::path(xlt_out) / "delta.csv", m.to_csv());
    std::cout << m.to_table();
    return 0;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ConfigError& e) {
    std::cerr << "spancorr: error[config]: " << e.what() << "\n";
    return 1;
  } catch (const NotFound& e) {
    std::cerr << "spancorr: error[data]: " << e.what() << "\n";
    return 2;
  } catch (const DataError& e) {
    std::cerr << "spancorr: error[data]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "spancorr: error[data]: " << e.what() << "\n";
    return 2;
  }
}
