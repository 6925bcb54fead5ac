#include <benchmark/benchmark.h>

#include <random>

#include "spancorr/decode.hpp"
#include "spancorr/encode.hpp"
#include "spancorr/metrics.hpp"
#include "spancorr/significance.hpp"
#include "spancorr/synth.hpp"
#include "spancorr/transformer.hpp"
#include "spancorr/vocab.hpp"

using namespace spancorr;

static void BM_Normalize(benchmark::State& state) {
  const std::string text = "The quick, brown fox (an old one) jumped over the lazy dog's back!";
  for (auto _ : state) benchmark::DoNotOptimize(normalize_text(text));
}
BENCHMARK(BM_Normalize);

static void BM_F1(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(token_f1("Jesse Frederick James Conaway (born 1948)", "Jesse Frederick James Conaway"));
  }
}
BENCHMARK(BM_F1);

static void BM_TopSpans(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::mt19937_64 rng(1);
  std::normal_distribution<double> z;
  SpanLogits l;
  for (std::size_t i = 0; i < n; ++i) {
    l.start.push_back(z(rng));
    l.end.push_back(z(rng));
  }
  const std::vector<char> mask(n, 1);
  for (auto _ : state) benchmark::DoNotOptimize(top_spans(l, mask, 20, 30));
}
BENCHMARK(BM_TopSpans)->Arg(64)->Arg(256);

static void BM_Forward(benchmark::State& state) {
  auto cfg = SynthConfig::defaults();
  cfg.n_examples = 8;
  const auto data = gen_corpus(cfg).examples;
  const auto vocab = Vocab::build(data);
  ModelConfig mc;
  mc.dim = static_cast<int>(state.range(0));
  mc.ff_dim = 2 * mc.dim;
  const SpanModel model(mc, vocab);
  const auto input = encode(data[0].question, data[0].context, std::nullopt, vocab, mc);
  for (auto _ : state) benchmark::DoNotOptimize(model.forward(input));
}
BENCHMARK(BM_Forward)->Arg(32)->Arg(64);

static void BM_Fisher(benchmark::State& state) {
  std::mt19937_64 rng(3);
  PairedScores s;
  for (int i = 0; i < 500; ++i) {
    s.ids.push_back(std::to_string(i));
    s.a.push_back(static_cast<double>(rng() % 2));
    s.b.push_back(static_cast<double>(rng() % 2));
  }
  RandomizationOptions o;
  o.resamples = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fisher_randomization(s, o));
}
BENCHMARK(BM_Fisher)->Arg(1000)->Arg(10000);
