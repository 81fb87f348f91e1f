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

#ifndef SPANSTEER_EVALUATION_H_
#define SPANSTEER_EVALUATION_H_

// Summary-quality and controllability metrics, and report assembly.

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "spansteer/annotation.h"
#include "spansteer/classifier.h"
#include "spansteer/corpus.h"
#include "spansteer/generation.h"
#include "spansteer/qa.h"
#include "spansteer/seq2seq.h"

namespace spansteer {

// Token F1 over normalized token multisets. Both empty -> 1, one empty -> 0.
double answer_token_f1(std::string_view predicted, std::string_view expected);

struct QuestionOutcome {
  std::string question;
  std::string expected;  // source phrase surface
  bool answerable = false;
  std::string answer;
  bool answered = false;  // answerable and answer_is_correct
  double f1 = 0.0;
};

// QAEval-style score: one question per gold-summary noun phrase, answered
// against the generated summary, scored by token F1. nullopt when the gold
// summary has no noun phrases.
std::optional<double> qaeval_score(const GoldSummary& gold,
                                   std::span<const std::string> generated,
                                   const QuestionGenerator& qg, const QuestionAnswerer& qa,
                                   const SyntacticProvider& provider,
                                   std::vector<QuestionOutcome>* details = nullptr);

// Fraction of the labels' questions answered correctly by `generated`.
// Every label needs a question; an empty label list is an error.
double question_recall(const Document& doc, std::span<const SpanLabel> labels,
                       std::string_view generated, const QuestionAnswerer& qa,
                       std::vector<QuestionOutcome>* details = nullptr);

// Attaches a generated question to each span (sentence-local context).
std::vector<SpanLabel> questions_for_spans(const Document& doc, std::span<const TokenSpan> spans,
                                           const QuestionGenerator& qg);

double k_length_ratio(std::size_t k, std::size_t summary_tokens);

struct ProbeResult {
  TokenSpan marked;
  std::string question;
  bool answered = false;
  std::size_t summary_length = 0;
};

// Marks only the kth document-order occurrence of the top-ranked span's
// normalized surface string. nullopt when it occurs fewer than k times.
std::optional<ProbeResult> kth_occurrence_probe(const Document& doc,
                                                std::span<const SpanScore> ranked,
                                                std::span<const TokenSpan> candidates,
                                                const Seq2SeqAdapter& generator,
                                                const QuestionGenerator& qg,
                                                const QuestionAnswerer& qa, std::size_t k,
                                                const DecodeConfig& decode = {});

struct ProbeSummary {
  std::size_t k = 0;
  std::size_t feasible = 0;
  std::size_t skipped = 0;
  double question_recall = 0.0;
  double mean_summary_length = 0.0;
};

ProbeSummary run_kth_occurrence_probe(std::span<const AnnotatedExample> corpus,
                                      const TokenEncoder& encoder, const ClassifierHead& head,
                                      const Seq2SeqAdapter& generator,
                                      const QuestionGenerator& qg, const QuestionAnswerer& qa,
                                      std::size_t k, const DecodeConfig& decode = {});

// Optional plug-in metric (e.g. an embedding-based score served elsewhere).
class ExternalMetric {
 public:
  virtual ~ExternalMetric() = default;
  virtual std::string name() const = 0;
  virtual double score(std::string_view candidate, std::string_view reference) const = 0;
};

inline constexpr std::string_view kMetricNames[] = {
    "rouge1", "rouge2", "rougeL", "qaeval_f1", "question_recall", "k_length_ratio",
    "summary_length_tokens"};

struct ExampleMetrics {
  std::string id;
  std::map<std::string, double> values;  // undefined metrics are absent
};

struct EvalOptions {
  SpanType span_type = SpanType::kQuestionAnswer;
  std::size_t k = 1;
  std::map<std::string, std::string> checkpoints;  // stage -> manifest hash
  const QuestionGenerator* qg = nullptr;           // null disables question metrics
  const QuestionAnswerer* qa = nullptr;
  const SyntacticProvider* provider = nullptr;     // null disables qaeval
  std::vector<std::shared_ptr<const ExternalMetric>> external;
  std::size_t workers = 1;
};

struct EvalReport {
  nlohmann::ordered_json config;
  std::vector<std::string> metrics;               // column order
  std::map<std::string, double> corpus;           // mean over defined values
  std::map<std::string, std::size_t> defined;     // examples contributing
  std::vector<ExampleMetrics> examples;           // sorted by id

  nlohmann::ordered_json to_json() const;
  std::string to_csv() const;
  static EvalReport from_json(const nlohmann::ordered_json& j);
};

EvalReport evaluate_run(std::span<const SummaryOutput> generated,
                        std::span<const AnnotatedExample> references,
                        const EvalOptions& options);

struct PermutationTest {
  double mean_difference = 0.0;  // mean(a - b)
  double p_value = 1.0;          // two-sided
  std::size_t n = 0;
};

// Paired sign-flip permutation test.
PermutationTest paired_permutation_test(std::span<const double> a, std::span<const double> b,
                                        std::size_t iterations = 10000, std::uint64_t seed = 13);

// Aligns two reports by example id on `metric` and tests them.
PermutationTest compare_reports(const EvalReport& a, const EvalReport& b,
                                const std::string& metric, std::size_t iterations = 10000,
                                std::uint64_t seed = 13);

}  // namespace spansteer

#endif  // SPANSTEER_EVALUATION_H_
