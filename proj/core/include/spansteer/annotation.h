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

#ifndef SPANSTEER_ANNOTATION_H_
#define SPANSTEER_ANNOTATION_H_

// Sentence segmentation and phrase candidates behind a pluggable provider.

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "spansteer/corpus.h"
#include "spansteer/json_channel.h"

namespace spansteer {

struct ProviderCapabilities {
  bool sentences = true;
  bool noun_phrases = true;
  bool entities = true;
  // Exclusive providers must not be called concurrently.
  bool exclusive = false;
};

// Raw provider output, checked and normalized by annotate().
struct SyntacticAnalysis {
  std::vector<std::string> tokens;
  std::vector<TokenSpan> sentences;
  std::vector<Phrase> phrases;
};

class SyntacticProvider {
 public:
  virtual ~SyntacticProvider() = default;
  virtual std::string name() const = 0;
  virtual ProviderCapabilities capabilities() const = 0;
  virtual SyntacticAnalysis analyze(std::string_view text) const = 0;
};

enum class CrossSentencePolicy {
  kReject,               // phrase over a sentence boundary is an error
  kClipToStartSentence,  // cut it back to the sentence holding its first token
};

struct AnnotateOptions {
  std::string id;
  CrossSentencePolicy cross_sentence = CrossSentencePolicy::kReject;
};

// Builds a Document from `text`. Phrases come back sorted by (start, end,
// type) and deduplicated per type.
Document annotate(std::string_view text, const SyntacticProvider& provider,
                  const AnnotateOptions& options = {});

// Deterministic rule-based provider used by tests and demos:
//  * tokens: whitespace split, trailing punctuation run detached;
//  * sentences end at a token whose trailing punctuation contains . ! or ?;
//  * entities: maximal runs of capitalized tokens (pronouns, interjections
//    and function words never count as capitalized);
//  * NPs: the entity runs plus determiner (the/a/an/his/her/its) followed by
//    up to three tokens that are not verbs, function words or punctuation.
class FixtureProvider : public SyntacticProvider {
 public:
  std::string name() const override { return "fixture"; }
  ProviderCapabilities capabilities() const override { return {}; }
  SyntacticAnalysis analyze(std::string_view text) const override;
};

std::unique_ptr<SyntacticProvider> fixture_provider();

// Reference binding for an external toolkit speaking
//   {"op":"annotate","text":str} -> {"tokens":[..],"sentences":[[s,e],..],
//                                    "phrases":[{"start","end","type"},..]}
// Declared exclusive; callers should clip cross-sentence phrases.
class RemoteSyntacticProvider : public SyntacticProvider {
 public:
  explicit RemoteSyntacticProvider(std::shared_ptr<JsonChannel> channel);
  std::string name() const override;
  ProviderCapabilities capabilities() const override;
  SyntacticAnalysis analyze(std::string_view text) const override;

 private:
  std::shared_ptr<JsonChannel> channel_;
};

// Wire encoding of an analysis (used by the remote binding and stub server).
nlohmann::json analysis_to_json(const SyntacticAnalysis& a);
SyntacticAnalysis analysis_from_json(const nlohmann::json& j);

}  // namespace spansteer

#endif  // SPANSTEER_ANNOTATION_H_
