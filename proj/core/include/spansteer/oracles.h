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

#ifndef SPANSTEER_ORACLES_H_
#define SPANSTEER_ORACLES_H_

// Oracle salient-span labeling: greedy ROUGE-2 sentences, first-occurrence
// lexical matching of entities/NPs, and question-based NP salience.

#include <cstddef>
#include <string>
#include <vector>

#include "spansteer/corpus.h"
#include "spansteer/qa.h"

namespace spansteer {

// Greedily adds the sentence that maximizes ROUGE-2 F1 of the selection
// (concatenated in document order) against the summary. Stops after k
// sentences or when no candidate strictly improves the score. Ties go to the
// lowest sentence index. Returned spans are in document order.
std::vector<TokenSpan> greedy_rouge2_sentences(const Document& doc, const GoldSummary& summary,
                                               std::size_t k);

// Same selection, but returned in the order sentences were picked.
std::vector<std::size_t> greedy_rouge2_picks(const Document& doc, const GoldSummary& summary,
                                             std::size_t k);

// One label per candidate of `type`; only the earliest occurrence of each
// lowercased surface string found verbatim in the summary is salient.
std::vector<SpanLabel> lexical_first_occurrence(const Document& doc, const GoldSummary& summary,
                                                PhraseType type);

// The sentence a span sits in, as text, with the span's character range.
struct SentenceContext {
  std::size_t sentence = 0;
  std::string sentence_text;
  std::string answer_text;
  CharRange answer_chars;
};

// Builds the question-generation input for `span`. Uses the original text
// when the tokens align with it, else the detokenized tokens.
SentenceContext sentence_context(const Document& doc, const TokenSpan& span);

GeneratedQuestion generate_question(const Document& doc, const TokenSpan& span,
                                    const QuestionGenerator& qg);

// Text handed to the answerer for a gold summary, and the char offsets of
// its tokens inside that text.
struct SummaryContext {
  std::string text;
  std::vector<std::pair<std::size_t, std::size_t>> token_offsets;
};
SummaryContext summary_context(const GoldSummary& summary);

// Summary sentence holding the answer's first character.
std::size_t map_answer_to_sentence(const GoldSummary& summary, const SummaryContext& ctx,
                                   const QAPrediction& prediction);

// Question-based salience: for every NP, generate a question from its
// sentence and answer it against the summary. Salient iff answerable and
// answer_is_correct(answer, NP surface). Exactly one label per NP.
std::vector<SpanLabel> qa_salience(const Document& doc, const GoldSummary& summary,
                                   const QuestionGenerator& qg, const QuestionAnswerer& qa);

struct LabelingOptions {
  SpanType span_type = SpanType::kQuestionAnswer;
  std::size_t sentence_k = 3;  // budget for greedy sentence labeling
  const QuestionGenerator* qg = nullptr;
  const QuestionAnswerer* qa = nullptr;
};

// Fills span_type and oracle_spans of `ex` with the chosen strategy.
AnnotatedExample label_example(AnnotatedExample ex, const LabelingOptions& options);

}  // namespace spansteer

#endif  // SPANSTEER_ORACLES_H_
