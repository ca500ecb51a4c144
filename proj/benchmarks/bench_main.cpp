#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "vocablab/bpe.hpp"
#include "vocablab/metrics.hpp"
#include "vocablab/miner.hpp"
#include "vocablab/vocab.hpp"

namespace {

using namespace vocablab;

std::vector<std::string> corpus(std::size_t lines, std::uint64_t seed) {
  static const std::string letters = "abcdefghijklmnoprstuvyäö";
  std::mt19937_64 rng(seed);
  std::vector<std::string> lexicon;
  for (int w = 0; w < 2000; ++w) {
    std::string word;
    for (std::size_t k = 0, n = 2 + rng() % 9; k < n; ++k) word += letters[rng() % 22];
    lexicon.push_back(word);
  }
  std::vector<std::string> out;
  for (std::size_t l = 0; l < lines; ++l) {
    std::string line;
    for (std::size_t k = 0, n = 3 + rng() % 20; k < n; ++k) {
      if (k) line += ' ';
      // Zipf-ish: small ids are much more frequent.
      line += lexicon[static_cast<std::size_t>(std::pow(rng() % 2000, 2) / 2000)];
    }
    out.push_back(line);
  }
  return out;
}

void BM_BpeTrain(benchmark::State& state) {
  const auto text = corpus(static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) {
    auto m = bpe::train(text, {static_cast<std::size_t>(state.range(1)), true, bpe::Normalization::kNone, 1});
    benchmark::DoNotOptimize(m);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_BpeTrain)->Args({2000, 1000})->Args({10000, 2000})->Unit(benchmark::kMillisecond);

void BM_BpeEncode(benchmark::State& state) {
  const auto text = corpus(5000, 2);
  const auto model = bpe::train(text, {2000, true, bpe::Normalization::kNone, 1});
  for (auto _ : state) {
    auto tok = bpe::encode_corpus(model, text, "xx", static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(tok);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_BpeEncode)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_VocabExtract(benchmark::State& state) {
  const auto text = corpus(20000, 3);
  const auto model = bpe::train(text, {2000, true, bpe::Normalization::kNone, 1});
  const auto tok = bpe::encode_corpus(model, text, "xx");
  for (auto _ : state) {
    auto v = vocab::extract(tok, static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(v);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tok.token_count()));
}
BENCHMARK(BM_VocabExtract)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

std::vector<metrics::EvalPair> eval_pairs(std::size_t n) {
  const auto refs = corpus(n, 4);
  auto hyps = corpus(n, 5);
  for (std::size_t i = 0; i < n; i += 2) hyps[i] = refs[i].substr(0, refs[i].size() * 3 / 4);
  std::vector<metrics::EvalPair> pairs;
  for (std::size_t i = 0; i < n; ++i) pairs.push_back({hyps[i], refs[i]});
  return pairs;
}

void BM_Chrf(benchmark::State& state) {
  const auto pairs = eval_pairs(2000);
  for (auto _ : state) {
    auto r = metrics::chrf(pairs, {}, static_cast<std::size_t>(state.range(0)));
    benchmark::DoNotOptimize(r);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pairs.size()));
}
BENCHMARK(BM_Chrf)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_Bleu(benchmark::State& state) {
  const auto pairs = eval_pairs(2000);
  for (auto _ : state) benchmark::DoNotOptimize(metrics::bleu(pairs));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pairs.size()));
}
BENCHMARK(BM_Bleu)->Unit(benchmark::kMillisecond);

void BM_Mine(benchmark::State& state) {
  const auto pairs = eval_pairs(1000);
  std::vector<std::string> src(pairs.size(), "s"), ref, a, b;
  for (const auto& p : pairs) {
    ref.push_back(p.reference);
    a.push_back(p.hypothesis);
    b.push_back(p.reference.substr(p.reference.size() / 2));
  }
  for (auto _ : state) benchmark::DoNotOptimize(miner::mine_divergence(src, ref, a, b));
}
BENCHMARK(BM_Mine)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
