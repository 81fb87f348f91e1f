// Copyright 2026 The SpanSteer Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "spansteer/marking.h"
#include "spansteer/oracles.h"
#include "spansteer/rouge.h"
#include "spansteer/seq2seq.h"

namespace spansteer {
namespace {

std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t n, std::size_t vocab) {
  std::vector<std::string> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back("w" + std::to_string(rng() % vocab));
  return out;
}

// A document of `sentences` sentences of 20 tokens, ending in ".".
Document random_document(std::mt19937_64& rng, std::size_t sentences) {
  Document doc;
  doc.id = "bench";
  for (std::size_t s = 0; s < sentences; ++s) {
    const auto start = doc.tokens.size();
    for (auto& w : random_tokens(rng, 19, 200)) doc.tokens.push_back(std::move(w));
    doc.tokens.push_back(".");
    doc.sentences.push_back({start, doc.tokens.size() - 1});
  }
  return doc;
}

void BM_Rouge2(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const auto a = random_tokens(rng, static_cast<std::size_t>(state.range(0)), 500);
  const auto b = random_tokens(rng, 60, 500);
  for (auto _ : state) benchmark::DoNotOptimize(rouge_n(a, b, 2));
}
BENCHMARK(BM_Rouge2)->Arg(100)->Arg(800);

void BM_RougeL(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const auto a = random_tokens(rng, static_cast<std::size_t>(state.range(0)), 500);
  const auto b = random_tokens(rng, 60, 500);
  for (auto _ : state) benchmark::DoNotOptimize(rouge_l(a, b));
}
BENCHMARK(BM_RougeL)->Arg(100)->Arg(800);

void BM_GreedyOracle(benchmark::State& state) {
  std::mt19937_64 rng(3);
  const auto doc = random_document(rng, static_cast<std::size_t>(state.range(0)));
  GoldSummary summary;
  summary.tokens = random_tokens(rng, 60, 200);
  summary.sentences = {{0, 59}};
  for (auto _ : state) benchmark::DoNotOptimize(greedy_rouge2_picks(doc, summary, 3));
}
BENCHMARK(BM_GreedyOracle)->Arg(10)->Arg(40);

void BM_MarkSpans(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const auto tokens = random_tokens(rng, 800, 500);
  std::vector<TokenSpan> spans;
  for (std::size_t s = 0; s + 3 < tokens.size(); s += static_cast<std::size_t>(state.range(0))) {
    spans.push_back({s, s + 2});
  }
  for (auto _ : state) {
    auto marked = mark_spans(tokens, spans);
    benchmark::DoNotOptimize(strip_markers(marked.tokens));
  }
}
BENCHMARK(BM_MarkSpans)->Arg(10)->Arg(50);

void BM_TinyDecode(benchmark::State& state) {
  std::mt19937_64 rng(5);
  const auto doc = random_document(rng, 20);
  TinySeq2Seq model;
  const std::vector<TokenSpan> spans{{2, 4}, {45, 47}};
  const auto source = mark_spans(doc.tokens, spans);
  DecodeConfig decode;
  decode.beam = static_cast<std::size_t>(state.range(0));
  decode.max_length = 60;
  for (auto _ : state) benchmark::DoNotOptimize(model.generate(source, decode));
}
BENCHMARK(BM_TinyDecode)->Arg(1)->Arg(4);

}  // namespace
}  // namespace spansteer

BENCHMARK_MAIN();
