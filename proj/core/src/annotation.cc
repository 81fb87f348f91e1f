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

#include "spansteer/annotation.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>

#include "spansteer/error.h"
#include "spansteer/text.h"

namespace spansteer {
namespace {

constexpr std::array<std::string_view, 6> kDeterminers = {"the", "a", "an", "his", "her", "its"};

// Capitalized words that are never names.
constexpr std::array<std::string_view, 25> kNotNames = {
    "i",  "he",   "she",   "it",  "we", "they", "you",  "me",   "him",
    "us", "them", "our",   "their", "my", "your", "this", "that", "these",
    "those", "hi", "hello", "yes", "no", "ok", "oh"};

constexpr std::array<std::string_view, 24> kVerbs = {
    "is",  "was", "are",  "were", "be",    "been",  "being", "has",
    "have", "had", "do",  "does", "did",   "will",  "would", "can",
    "could", "should", "may", "might", "must", "said", "says", "say"};

template <std::size_t N>
bool in(const std::array<std::string_view, N>& list, std::string_view w) {
  return std::find(list.begin(), list.end(), w) != list.end();
}

bool is_capitalized(const std::string& tok) {
  if (tok.empty() || !std::isupper(static_cast<unsigned char>(tok[0]))) return false;
  const auto norm = normalize_token(tok);
  return !norm.empty() && !is_stopword(norm) && !in(kDeterminers, norm) && !in(kNotNames, norm);
}

bool is_verb(const std::string& tok) {
  const auto norm = normalize_token(tok);
  if (in(kVerbs, norm)) return true;
  const bool lower = !tok.empty() && std::islower(static_cast<unsigned char>(tok[0]));
  return lower && norm.size() > 4 && norm.ends_with("ed");
}

bool np_body(const std::string& tok) {
  if (is_punctuation_token(tok)) return false;
  const auto norm = normalize_token(tok);
  return !norm.empty() && !is_stopword(norm) && !is_verb(tok);
}

}  // namespace

SyntacticAnalysis FixtureProvider::analyze(std::string_view text) const {
  SyntacticAnalysis out;
  std::vector<bool> ends_sentence;
  for (const auto& word : split_whitespace(text)) {
    std::size_t k = word.size();
    while (k > 0 && std::ispunct(static_cast<unsigned char>(word[k - 1]))) --k;
    const std::string trailing = word.substr(k);
    if (k == 0) {
      out.tokens.push_back(word);
      ends_sentence.push_back(false);
    } else {
      out.tokens.push_back(word.substr(0, k));
      ends_sentence.push_back(false);
      if (!trailing.empty()) {
        out.tokens.push_back(trailing);
        ends_sentence.push_back(false);
      }
    }
    if (trailing.find_first_of(".!?") != std::string::npos ||
        (k == 0 && word.find_first_of(".!?") != std::string::npos)) {
      ends_sentence.back() = true;
    }
  }
  const auto n = out.tokens.size();
  std::size_t start = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (ends_sentence[i] || i + 1 == n) {
      out.sentences.push_back({start, i});
      start = i + 1;
    }
  }

  for (const auto& sent : out.sentences) {
    // Capitalized runs: NP and entity.
    std::size_t i = sent.start;
    while (i <= sent.end) {
      if (!is_capitalized(out.tokens[i])) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j + 1 <= sent.end && is_capitalized(out.tokens[j + 1])) ++j;
      out.phrases.push_back({{i, j}, PhraseType::kNounPhrase});
      out.phrases.push_back({{i, j}, PhraseType::kEntity});
      i = j + 1;
    }
    // Determiner + up to three non-verb content tokens.
    for (std::size_t d = sent.start; d <= sent.end; ++d) {
      if (!in(kDeterminers, to_lower(out.tokens[d]))) continue;
      std::size_t last = d;
      while (last + 1 <= sent.end && last - d < 3 && np_body(out.tokens[last + 1])) ++last;
      if (last > d) out.phrases.push_back({{d, last}, PhraseType::kNounPhrase});
    }
  }
  return out;
}

std::unique_ptr<SyntacticProvider> fixture_provider() {
  return std::make_unique<FixtureProvider>();
}

Document annotate(std::string_view text, const SyntacticProvider& provider,
                  const AnnotateOptions& options) {
  if (text.find_first_not_of(" \t\r\n") == std::string_view::npos) {
    throw ValidationError("annotate: empty text");
  }
  SyntacticAnalysis a;
  try {
    a = provider.analyze(text);
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw AdapterError("syntactic provider '" + provider.name() + "'", e.what());
  }
  const auto caps = provider.capabilities();

  Document doc;
  doc.id = options.id;
  doc.text = std::string(text);
  doc.tokens = std::move(a.tokens);
  const auto n = doc.tokens.size();
  if (n == 0) {
    throw AdapterError("syntactic provider '" + provider.name() + "'", "produced no tokens");
  }
  if (caps.sentences && !a.sentences.empty()) {
    doc.sentences = std::move(a.sentences);
  } else {
    doc.sentences = {{0, n - 1}};
  }

  std::set<Phrase> phrases;
  for (auto p : a.phrases) {
    if ((p.type == PhraseType::kNounPhrase && !caps.noun_phrases) ||
        (p.type == PhraseType::kEntity && !caps.entities)) {
      continue;
    }
    if (p.span.start > p.span.end || p.span.end >= n) {
      throw ValidationError("annotate: provider '" + provider.name() +
                            "' returned span out of bounds [" + std::to_string(p.span.start) +
                            "," + std::to_string(p.span.end) + "]");
    }
    const auto s = doc.sentence_of(p.span.start);
    if (s && p.span.end > doc.sentences[*s].end) {
      if (options.cross_sentence == CrossSentencePolicy::kReject) {
        throw ValidationError("annotate: containment violation: phrase [" +
                              std::to_string(p.span.start) + "," + std::to_string(p.span.end) +
                              "] crosses a sentence boundary");
      }
      p.span.end = doc.sentences[*s].end;
    }
    phrases.insert(p);
  }
  doc.phrases.assign(phrases.begin(), phrases.end());

  AnnotatedExample probe;
  probe.document = doc;
  probe.oracle_spans.clear();
  for (const auto& v : validate_example(probe)) {
    if (v.rfind("summary", 0) == 0) continue;
    throw ValidationError("annotate: provider '" + provider.name() + "' output invalid: " + v);
  }
  return doc;
}

nlohmann::json analysis_to_json(const SyntacticAnalysis& a) {
  nlohmann::json j;
  j["tokens"] = a.tokens;
  j["sentences"] = nlohmann::json::array();
  for (const auto& s : a.sentences) j["sentences"].push_back({s.start, s.end});
  j["phrases"] = nlohmann::json::array();
  for (const auto& p : a.phrases) {
    j["phrases"].push_back(
        {{"start", p.span.start}, {"end", p.span.end}, {"type", to_string(p.type)}});
  }
  return j;
}

SyntacticAnalysis analysis_from_json(const nlohmann::json& j) {
  SyntacticAnalysis a;
  try {
    a.tokens = j.at("tokens").get<std::vector<std::string>>();
    for (const auto& s : j.at("sentences")) {
      a.sentences.push_back({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
    }
    for (const auto& p : j.at("phrases")) {
      a.phrases.push_back({{p.at("start").get<std::size_t>(), p.at("end").get<std::size_t>()},
                           parse_phrase_type(p.at("type").get<std::string>())});
    }
  } catch (const nlohmann::json::exception& e) {
    throw AdapterError("syntactic provider", std::string("malformed analysis: ") + e.what());
  }
  return a;
}

RemoteSyntacticProvider::RemoteSyntacticProvider(std::shared_ptr<JsonChannel> channel)
    : channel_(std::move(channel)) {}

std::string RemoteSyntacticProvider::name() const { return channel_->describe(); }

ProviderCapabilities RemoteSyntacticProvider::capabilities() const {
  ProviderCapabilities caps;
  caps.exclusive = true;
  return caps;
}

SyntacticAnalysis RemoteSyntacticProvider::analyze(std::string_view text) const {
  return analysis_from_json(channel_->call({{"op", "annotate"}, {"text", std::string(text)}}));
}

}  // namespace spansteer
