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

#ifndef SPANSTEER_CORPUS_H_
#define SPANSTEER_CORPUS_H_

// Document/summary data types and the JSONL corpus format.
//
// Span indices are 0-based and inclusive on both ends: TokenSpan{2, 4}
// covers tokens 2, 3 and 4. Every other module uses the same convention.

#include <compare>
#include <cstddef>
#include <fstream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace spansteer {

struct TokenSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start + 1; }
  bool contains(const TokenSpan& other) const {
    return start <= other.start && other.end <= end;
  }
  bool overlaps(const TokenSpan& other) const {
    return start <= other.end && other.start <= end;
  }

  friend auto operator<=>(const TokenSpan&, const TokenSpan&) = default;
};

enum class PhraseType { kNounPhrase, kEntity };

struct Phrase {
  TokenSpan span;
  PhraseType type = PhraseType::kNounPhrase;

  friend auto operator<=>(const Phrase&, const Phrase&) = default;
};

// Labeling strategy that produced an example's oracle spans.
enum class SpanType { kSentence, kEntity, kNounPhrase, kQuestionAnswer };

std::string_view to_string(PhraseType t);
std::string_view to_string(SpanType t);
PhraseType parse_phrase_type(std::string_view s);
SpanType parse_span_type(std::string_view s);

struct Document {
  std::string id;
  std::string text;
  std::vector<std::string> tokens;
  std::vector<TokenSpan> sentences;
  std::vector<Phrase> phrases;

  // Tokens covered by `span`, space-joined verbatim.
  std::string surface(const TokenSpan& span) const;
  // Index of the sentence containing token `index`.
  std::optional<std::size_t> sentence_of(std::size_t index) const;
  std::vector<TokenSpan> phrases_of(PhraseType type) const;
};

struct GoldSummary {
  std::string text;
  std::vector<std::string> tokens;
  std::vector<TokenSpan> sentences;

  std::optional<std::size_t> sentence_of(std::size_t index) const;
  std::vector<std::string> sentence_tokens(std::size_t sentence) const;
  // Original text of one sentence when the tokens align with `text`,
  // otherwise the detokenized sentence tokens.
  std::string sentence_text(std::size_t sentence) const;
};

// One candidate span together with its salience verdict. The question,
// answer and summary-sentence fields are filled by question-based labeling.
struct SpanLabel {
  TokenSpan span;
  bool salient = false;
  std::optional<std::string> question;
  std::optional<std::string> predicted_answer;
  std::optional<std::size_t> summary_sentence;

  friend bool operator==(const SpanLabel&, const SpanLabel&) = default;
};

// Provenance of a training example produced by prefix augmentation.
struct AugmentationInfo {
  std::string source_id;
  std::size_t k = 0;
  std::size_t m = 0;

  friend bool operator==(const AugmentationInfo&, const AugmentationInfo&) = default;
};

struct AnnotatedExample {
  Document document;
  GoldSummary summary;
  SpanType span_type = SpanType::kQuestionAnswer;
  std::vector<SpanLabel> oracle_spans;
  std::optional<AugmentationInfo> augmentation;

  std::vector<TokenSpan> salient_spans() const;
};

enum class CorpusSchema { kRaw, kAnnotated };

// Returns one description per broken invariant; empty when valid.
std::vector<std::string> validate_example(const AnnotatedExample& ex);

// Parses one JSONL record. `line_number` (1-based) is used in error text.
// Throws ValidationError naming the line and offending field.
AnnotatedExample parse_record(std::string_view line, CorpusSchema schema,
                              std::size_t line_number = 0);

// Canonical record form: fixed field order, compact separators.
nlohmann::ordered_json to_json(const AnnotatedExample& ex, CorpusSchema schema);
std::string serialize_record(const AnnotatedExample& ex, CorpusSchema schema);

nlohmann::ordered_json to_json(const TokenSpan& span);

// Streams validated examples from a JSONL file in order. Blank lines are
// skipped.
class CorpusReader {
 public:
  CorpusReader(const std::string& path, CorpusSchema schema);

  std::optional<AnnotatedExample> next();
  std::size_t line_number() const { return line_number_; }

 private:
  std::ifstream in_;
  CorpusSchema schema_;
  std::size_t line_number_ = 0;
};

std::vector<AnnotatedExample> load_corpus(const std::string& path, CorpusSchema schema);

void write_corpus(const std::string& path, const std::vector<AnnotatedExample>& examples,
                  CorpusSchema schema);

}  // namespace spansteer

#endif  // SPANSTEER_CORPUS_H_
