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

#include "spansteer/corpus.h"

#include <algorithm>
#include <set>
#include <sstream>
#include <utility>

#include "spansteer/error.h"
#include "spansteer/text.h"

namespace spansteer {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string span_str(const TokenSpan& s) {
  return "[" + std::to_string(s.start) + "," + std::to_string(s.end) + "]";
}

std::optional<std::size_t> containing(const std::vector<TokenSpan>& sentences,
                                      std::size_t index) {
  auto it = std::upper_bound(sentences.begin(), sentences.end(), index,
                             [](std::size_t i, const TokenSpan& s) { return i < s.start; });
  if (it == sentences.begin()) return std::nullopt;
  --it;
  if (index <= it->end) return static_cast<std::size_t>(it - sentences.begin());
  return std::nullopt;
}

void check_partition(const std::vector<TokenSpan>& sentences, std::size_t n_tokens,
                     const std::string& what, std::vector<std::string>& out) {
  if (n_tokens == 0) {
    if (!sentences.empty()) out.push_back(what + ": sentences given for empty token list");
    return;
  }
  if (sentences.empty()) {
    out.push_back(what + ": no sentences cover " + std::to_string(n_tokens) + " tokens");
    return;
  }
  std::size_t expected = 0;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    const auto& s = sentences[i];
    if (s.start > s.end) {
      out.push_back(what + ": sentence " + std::to_string(i) + " " + span_str(s) +
                    " has start > end");
    } else if (s.end >= n_tokens) {
      out.push_back(what + ": span out of bounds: sentence " + std::to_string(i) + " " +
                    span_str(s) + " exceeds " + std::to_string(n_tokens) + " tokens");
    } else if (s.start < expected) {
      out.push_back(what + ": sentence " + std::to_string(i) + " " + span_str(s) +
                    " overlaps the previous sentence");
    } else if (s.start > expected) {
      out.push_back(what + ": gap before sentence " + std::to_string(i) + " " + span_str(s));
    }
    expected = std::max(expected, s.end + 1);
  }
  if (expected < n_tokens && out.empty()) {
    out.push_back(what + ": sentences stop at token " + std::to_string(expected) + " of " +
                  std::to_string(n_tokens));
  }
}

// Field accessors that name the field and line on failure.
class RecordView {
 public:
  RecordView(const json& j, std::size_t line) : j_(j), line_(line) {}

  [[noreturn]] void fail(const std::string& field, const std::string& what) const {
    std::string prefix = line_ ? "line " + std::to_string(line_) + ": " : "";
    throw ValidationError(prefix + "field '" + field + "': " + what);
  }

  const json& require(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.is_object()) fail(path, "expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) fail(path.empty() ? key : path + "." + key, "missing");
    return *it;
  }

  std::string string_field(const json& obj, const std::string& key,
                           const std::string& path) const {
    const auto& v = require(obj, key, path);
    if (!v.is_string()) fail(path.empty() ? key : path + "." + key, "expected a string");
    return v.get<std::string>();
  }

  std::vector<std::string> string_list(const json& obj, const std::string& key,
                                       const std::string& path) const {
    const auto& v = require(obj, key, path);
    const auto name = path.empty() ? key : path + "." + key;
    if (!v.is_array()) fail(name, "expected an array of strings");
    std::vector<std::string> out;
    out.reserve(v.size());
    for (const auto& e : v) {
      if (!e.is_string()) fail(name, "expected an array of strings");
      out.push_back(e.get<std::string>());
    }
    return out;
  }

  std::size_t index(const json& v, const std::string& name) const {
    if (!v.is_number_integer() || v.get<long long>() < 0) {
      fail(name, "expected a non-negative integer");
    }
    return v.get<std::size_t>();
  }

  std::vector<TokenSpan> span_pairs(const json& obj, const std::string& key,
                                    const std::string& path) const {
    const auto& v = require(obj, key, path);
    const auto name = path.empty() ? key : path + "." + key;
    if (!v.is_array()) fail(name, "expected an array of [start,end] pairs");
    std::vector<TokenSpan> out;
    for (const auto& p : v) {
      if (!p.is_array() || p.size() != 2) fail(name, "expected an array of [start,end] pairs");
      out.push_back({index(p[0], name), index(p[1], name)});
    }
    return out;
  }

  const json& root() const { return j_; }

 private:
  const json& j_;
  std::size_t line_;
};

ordered_json label_json(const SpanLabel& l) {
  ordered_json j;
  j["start"] = l.span.start;
  j["end"] = l.span.end;
  j["salient"] = l.salient;
  j["question"] = l.question ? ordered_json(*l.question) : ordered_json(nullptr);
  j["predicted_answer"] =
      l.predicted_answer ? ordered_json(*l.predicted_answer) : ordered_json(nullptr);
  j["summary_sentence"] =
      l.summary_sentence ? ordered_json(*l.summary_sentence) : ordered_json(nullptr);
  return j;
}

}  // namespace

std::string_view to_string(PhraseType t) {
  return t == PhraseType::kNounPhrase ? "np" : "entity";
}

std::string_view to_string(SpanType t) {
  switch (t) {
    case SpanType::kSentence: return "sentence";
    case SpanType::kEntity: return "entity";
    case SpanType::kNounPhrase: return "np";
    case SpanType::kQuestionAnswer: return "qa";
  }
  return "qa";
}

PhraseType parse_phrase_type(std::string_view s) {
  if (s == "np") return PhraseType::kNounPhrase;
  if (s == "entity") return PhraseType::kEntity;
  throw ValidationError("unknown phrase type '" + std::string(s) + "'");
}

SpanType parse_span_type(std::string_view s) {
  if (s == "sentence") return SpanType::kSentence;
  if (s == "entity") return SpanType::kEntity;
  if (s == "np") return SpanType::kNounPhrase;
  if (s == "qa") return SpanType::kQuestionAnswer;
  throw ValidationError("unknown span type '" + std::string(s) +
                        "' (expected sentence, entity, np or qa)");
}

std::string Document::surface(const TokenSpan& span) const {
  std::string out;
  for (std::size_t i = span.start; i <= span.end && i < tokens.size(); ++i) {
    if (i != span.start) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

std::optional<std::size_t> Document::sentence_of(std::size_t index) const {
  return containing(sentences, index);
}

std::vector<TokenSpan> Document::phrases_of(PhraseType type) const {
  std::vector<TokenSpan> out;
  for (const auto& p : phrases) {
    if (p.type == type) out.push_back(p.span);
  }
  return out;
}

std::optional<std::size_t> GoldSummary::sentence_of(std::size_t index) const {
  return containing(sentences, index);
}

std::vector<std::string> GoldSummary::sentence_tokens(std::size_t sentence) const {
  const auto& s = sentences.at(sentence);
  return {tokens.begin() + static_cast<std::ptrdiff_t>(s.start),
          tokens.begin() + static_cast<std::ptrdiff_t>(s.end + 1)};
}

std::string GoldSummary::sentence_text(std::size_t sentence) const {
  const auto& s = sentences.at(sentence);
  if (auto offsets = align_tokens(text, tokens)) {
    const auto b = (*offsets)[s.start].first;
    const auto e = (*offsets)[s.end].second;
    return text.substr(b, e - b);
  }
  const auto toks = sentence_tokens(sentence);
  return detokenize(toks);
}

std::vector<TokenSpan> AnnotatedExample::salient_spans() const {
  std::vector<TokenSpan> out;
  for (const auto& l : oracle_spans) {
    if (l.salient) out.push_back(l.span);
  }
  return out;
}

std::vector<std::string> validate_example(const AnnotatedExample& ex) {
  std::vector<std::string> out;
  const auto& doc = ex.document;
  const auto n = doc.tokens.size();

  std::vector<std::string> sentence_violations;
  check_partition(doc.sentences, n, "document", sentence_violations);
  out.insert(out.end(), sentence_violations.begin(), sentence_violations.end());

  std::set<Phrase> seen_phrases;
  for (std::size_t i = 0; i < doc.phrases.size(); ++i) {
    const auto& p = doc.phrases[i];
    const auto where = "phrase " + std::to_string(i) + " " + span_str(p.span);
    if (p.span.start > p.span.end) {
      out.push_back(where + " has start > end");
      continue;
    }
    if (p.span.end >= n) {
      out.push_back("span out of bounds: " + where + " exceeds " + std::to_string(n) +
                    " tokens");
      continue;
    }
    if (!seen_phrases.insert(p).second) {
      out.push_back(where + " duplicated for type " + std::string(to_string(p.type)));
    }
    if (sentence_violations.empty()) {
      const auto s = doc.sentence_of(p.span.start);
      if (!s || p.span.end > doc.sentences[*s].end) {
        out.push_back(where + " crosses a sentence boundary");
      }
    }
  }

  check_partition(ex.summary.sentences, ex.summary.tokens.size(), "summary", out);

  std::set<TokenSpan> candidates;
  if (ex.span_type == SpanType::kSentence) {
    candidates.insert(doc.sentences.begin(), doc.sentences.end());
  } else {
    const auto type = ex.span_type == SpanType::kEntity ? PhraseType::kEntity
                                                        : PhraseType::kNounPhrase;
    for (const auto& p : doc.phrases) {
      if (p.type == type) candidates.insert(p.span);
    }
  }
  const bool qa = ex.span_type == SpanType::kQuestionAnswer;
  std::set<TokenSpan> seen_labels;
  for (std::size_t i = 0; i < ex.oracle_spans.size(); ++i) {
    const auto& l = ex.oracle_spans[i];
    const auto where = "oracle span " + std::to_string(i) + " " + span_str(l.span);
    if (l.span.start > l.span.end || l.span.end >= n) {
      out.push_back("span out of bounds: " + where + " in a " + std::to_string(n) +
                    "-token document");
      continue;
    }
    if (!candidates.contains(l.span)) {
      out.push_back(where + " is not a " + std::string(to_string(ex.span_type)) +
                    " candidate");
    }
    if (!seen_labels.insert(l.span).second) out.push_back(where + " is duplicated");
    if (!qa && (l.question || l.summary_sentence)) {
      out.push_back(where + " carries question fields outside qa labeling");
    }
    if (qa && l.salient && (!l.question || !l.predicted_answer || !l.summary_sentence)) {
      out.push_back(where + " is salient but lacks question, answer or summary sentence");
    }
    if (l.summary_sentence && *l.summary_sentence >= ex.summary.sentences.size()) {
      out.push_back(where + " maps to missing summary sentence " +
                    std::to_string(*l.summary_sentence));
    }
  }
  return out;
}

AnnotatedExample parse_record(std::string_view line, CorpusSchema schema,
                              std::size_t line_number) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    std::string prefix = line_number ? "line " + std::to_string(line_number) + ": " : "";
    throw ValidationError(prefix + "malformed JSON: " + e.what());
  }
  RecordView v(j, line_number);
  if (!j.is_object()) v.fail("<record>", "expected a JSON object");

  AnnotatedExample ex;
  auto& doc = ex.document;
  doc.id = v.string_field(j, "id", "");
  doc.text = v.string_field(j, "text", "");
  doc.tokens = v.string_list(j, "tokens", "");
  doc.sentences = v.span_pairs(j, "sentences", "");
  const auto& phrases = v.require(j, "phrases", "");
  if (!phrases.is_array()) v.fail("phrases", "expected an array");
  for (std::size_t i = 0; i < phrases.size(); ++i) {
    const auto path = "phrases[" + std::to_string(i) + "]";
    const auto& p = phrases[i];
    Phrase ph;
    ph.span.start = v.index(v.require(p, "start", path), path + ".start");
    ph.span.end = v.index(v.require(p, "end", path), path + ".end");
    try {
      ph.type = parse_phrase_type(v.string_field(p, "type", path));
    } catch (const ValidationError& e) {
      v.fail(path + ".type", e.what());
    }
    doc.phrases.push_back(ph);
  }

  const auto& summary = v.require(j, "summary", "");
  ex.summary.text = v.string_field(summary, "text", "summary");
  ex.summary.tokens = v.string_list(summary, "tokens", "summary");
  ex.summary.sentences = v.span_pairs(summary, "sentences", "summary");

  if (schema == CorpusSchema::kAnnotated) {
    try {
      ex.span_type = parse_span_type(v.string_field(j, "span_type", ""));
    } catch (const ValidationError& e) {
      v.fail("span_type", e.what());
    }
    const auto& spans = v.require(j, "oracle_spans", "");
    if (!spans.is_array()) v.fail("oracle_spans", "expected an array");
    for (std::size_t i = 0; i < spans.size(); ++i) {
      const auto path = "oracle_spans[" + std::to_string(i) + "]";
      const auto& s = spans[i];
      SpanLabel l;
      l.span.start = v.index(v.require(s, "start", path), path + ".start");
      l.span.end = v.index(v.require(s, "end", path), path + ".end");
      const auto& salient = v.require(s, "salient", path);
      if (!salient.is_boolean()) v.fail(path + ".salient", "expected a boolean");
      l.salient = salient.get<bool>();
      auto opt_string = [&](const char* key) -> std::optional<std::string> {
        auto it = s.find(key);
        if (it == s.end() || it->is_null()) return std::nullopt;
        if (!it->is_string()) v.fail(path + "." + key, "expected a string or null");
        return it->get<std::string>();
      };
      l.question = opt_string("question");
      l.predicted_answer = opt_string("predicted_answer");
      if (auto it = s.find("summary_sentence"); it != s.end() && !it->is_null()) {
        l.summary_sentence = v.index(*it, path + ".summary_sentence");
      }
      ex.oracle_spans.push_back(std::move(l));
    }
    if (auto it = j.find("augmentation"); it != j.end() && !it->is_null()) {
      AugmentationInfo info;
      info.source_id = v.string_field(*it, "source_id", "augmentation");
      info.k = v.index(v.require(*it, "k", "augmentation"), "augmentation.k");
      info.m = v.index(v.require(*it, "m", "augmentation"), "augmentation.m");
      ex.augmentation = std::move(info);
    }
  }

  const auto violations = validate_example(ex);
  if (!violations.empty()) {
    std::string prefix = line_number ? "line " + std::to_string(line_number) + ": " : "";
    std::string msg = prefix + "record '" + doc.id + "' is invalid: " + violations.front();
    if (violations.size() > 1) {
      msg += " (+" + std::to_string(violations.size() - 1) + " more)";
    }
    throw ValidationError(msg);
  }
  return ex;
}

ordered_json to_json(const TokenSpan& span) { return ordered_json::array({span.start, span.end}); }

ordered_json to_json(const AnnotatedExample& ex, CorpusSchema schema) {
  ordered_json j;
  const auto& doc = ex.document;
  j["id"] = doc.id;
  j["text"] = doc.text;
  j["tokens"] = doc.tokens;
  j["sentences"] = ordered_json::array();
  for (const auto& s : doc.sentences) j["sentences"].push_back(to_json(s));
  j["phrases"] = ordered_json::array();
  for (const auto& p : doc.phrases) {
    ordered_json pj;
    pj["start"] = p.span.start;
    pj["end"] = p.span.end;
    pj["type"] = to_string(p.type);
    j["phrases"].push_back(std::move(pj));
  }
  ordered_json sj;
  sj["text"] = ex.summary.text;
  sj["tokens"] = ex.summary.tokens;
  sj["sentences"] = ordered_json::array();
  for (const auto& s : ex.summary.sentences) sj["sentences"].push_back(to_json(s));
  j["summary"] = std::move(sj);
  if (schema == CorpusSchema::kAnnotated) {
    j["span_type"] = to_string(ex.span_type);
    j["oracle_spans"] = ordered_json::array();
    for (const auto& l : ex.oracle_spans) j["oracle_spans"].push_back(label_json(l));
    if (ex.augmentation) {
      ordered_json aj;
      aj["source_id"] = ex.augmentation->source_id;
      aj["k"] = ex.augmentation->k;
      aj["m"] = ex.augmentation->m;
      j["augmentation"] = std::move(aj);
    }
  }
  return j;
}

std::string serialize_record(const AnnotatedExample& ex, CorpusSchema schema) {
  return to_json(ex, schema).dump();
}

CorpusReader::CorpusReader(const std::string& path, CorpusSchema schema)
    : in_(path), schema_(schema) {
  if (!in_) throw ValidationError("cannot open corpus file " + path);
}

std::optional<AnnotatedExample> CorpusReader::next() {
  std::string line;
  while (std::getline(in_, line)) {
    ++line_number_;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    return parse_record(line, schema_, line_number_);
  }
  return std::nullopt;
}

std::vector<AnnotatedExample> load_corpus(const std::string& path, CorpusSchema schema) {
  CorpusReader reader(path, schema);
  std::vector<AnnotatedExample> out;
  while (auto ex = reader.next()) out.push_back(std::move(*ex));
  return out;
}

void write_corpus(const std::string& path, const std::vector<AnnotatedExample>& examples,
                  CorpusSchema schema) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  for (const auto& ex : examples) out << serialize_record(ex, schema) << '\n';
}

}  // namespace spansteer
