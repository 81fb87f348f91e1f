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

#ifndef SPANSTEER_TESTS_SUPPORT_FIXTURES_H_
#define SPANSTEER_TESTS_SUPPORT_FIXTURES_H_

// Shared fixtures for unit and acceptance tests.

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "spansteer/corpus.h"

namespace spansteer::testing {

// Tokenizes and annotates document and summary with the fixture provider.
AnnotatedExample raw_example(const std::string& id, const std::string& text,
                             const std::string& summary);

// Labels with the stub question generator / answerer.
AnnotatedExample qa_labeled(AnnotatedExample ex);

// News-style documents whose summaries compress a few of their sentences.
// Optionally appends a summary sentence no document span supports.
struct SyntheticOptions {
  std::size_t min_sentences = 4;
  std::size_t max_sentences = 7;
  std::size_t min_summary = 1;
  std::size_t max_summary = 3;
  double unsupported_rate = 0.0;
  // Summarize the leading sentences instead of a random subset.
  bool lead_summary = false;
};
std::vector<AnnotatedExample> synthetic_corpus(std::size_t n, std::uint64_t seed,
                                               const SyntheticOptions& options = {});

// Two occurrences of "Sierra Leone"; the summary answers the question of
// the first only.
AnnotatedExample sierra_leone_example();

// Three summary sentences; spans map to the first two, nothing maps to the third.
AnnotatedExample three_sentence_summary_example();

// Structurally valid qa example with random spans and random summary mapping.
AnnotatedExample random_qa_example(std::mt19937_64& rng, const std::string& id);

std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t n,
                                       std::size_t vocabulary);

// Non-overlapping spans over [0, n).
std::vector<TokenSpan> random_disjoint_spans(std::mt19937_64& rng, std::size_t n);

// Document whose sentences are the given token lists.
Document document_from_sentences(const std::vector<std::vector<std::string>>& sentences);
GoldSummary summary_from_sentences(const std::vector<std::vector<std::string>>& sentences);

std::string temp_dir(const std::string& name);

}  // namespace spansteer::testing

#endif  // SPANSTEER_TESTS_SUPPORT_FIXTURES_H_
