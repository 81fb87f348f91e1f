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

#ifndef SPANSTEER_AUGMENTATION_H_
#define SPANSTEER_AUGMENTATION_H_

// Controllability augmentation: drop gold-summary sentences that no salient
// span supports, then emit one prefix example per remaining sentence count.

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "spansteer/corpus.h"

namespace spansteer {

// Salient label index <-> summary sentence, kept consistent in both directions.
struct SpanSummaryMapping {
  std::map<std::size_t, std::size_t> label_to_sentence;
  std::vector<std::vector<std::size_t>> sentence_to_labels;  // one entry per summary sentence

  bool consistent() const;
  bool supported(std::size_t sentence) const { return !sentence_to_labels.at(sentence).empty(); }
};

// From qa labels: uses each salient label's summary_sentence. Non-salient
// labels are ignored even when they carry a stale sentence index.
SpanSummaryMapping build_mapping(std::span<const SpanLabel> labels, const GoldSummary& summary);

// Lexical labels (entity / np): each salient span maps to the summary
// sentence holding the first occurrence of its surface string.
SpanSummaryMapping build_lexical_mapping(const AnnotatedExample& ex);

// Dispatches on ex.span_type. Sentence labels are not augmentable.
SpanSummaryMapping build_example_mapping(const AnnotatedExample& ex);

struct MappedExample {
  AnnotatedExample example;
  SpanSummaryMapping mapping;
};

// nullopt when no sentence is supported (the example is dropped).
std::optional<MappedExample> remove_unsupported_sentences(const AnnotatedExample& ex,
                                                          const SpanSummaryMapping& mapping);

// One example per k in 1..m. The k = m example is the cleaned input itself.
std::vector<AnnotatedExample> generate_prefix_examples(const AnnotatedExample& ex,
                                                       const SpanSummaryMapping& mapping);

struct AugmentStats {
  std::size_t input = 0;
  std::size_t dropped = 0;
  std::size_t removed_sentences = 0;
  std::size_t output = 0;
};

std::vector<AnnotatedExample> augment_corpus(std::span<const AnnotatedExample> corpus,
                                             AugmentStats* stats = nullptr);

// Keeps the sentences of `summary` listed in `keep` (ascending), re-tokenized
// consistently with the original text.
GoldSummary select_summary_sentences(const GoldSummary& summary,
                                     std::span<const std::size_t> keep);

}  // namespace spansteer

#endif  // SPANSTEER_AUGMENTATION_H_
