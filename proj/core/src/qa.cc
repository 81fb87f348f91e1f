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

#include "spansteer/qa.h"

#include <algorithm>
#include <limits>
#include <set>
#include <vector>

#include "spansteer/annotation.h"
#include "spansteer/error.h"
#include "spansteer/text.h"

namespace spansteer {
namespace {

std::vector<std::string> normalized_tokens(std::string_view s) {
  std::vector<std::string> out;
  for (const auto& t : split_whitespace(s)) {
    auto n = normalize_token(t);
    if (!n.empty()) out.push_back(std::move(n));
  }
  return out;
}

std::set<std::string> content_set(const std::vector<std::string>& normalized) {
  std::set<std::string> out;
  for (const auto& t : normalized) {
    if (!is_stopword(t)) out.insert(t);
  }
  return out;
}

// Offsets of `tok` with surrounding punctuation removed.
std::pair<std::size_t, std::size_t> core_range(const TextToken& tok) {
  std::size_t b = tok.begin;
  std::size_t e = tok.end;
  const auto& s = tok.text;
  std::size_t lead = 0;
  while (lead < s.size() && std::ispunct(static_cast<unsigned char>(s[lead]))) ++lead;
  std::size_t trail = 0;
  while (trail + lead < s.size() &&
         std::ispunct(static_cast<unsigned char>(s[s.size() - 1 - trail]))) {
    ++trail;
  }
  if (lead + trail >= s.size()) return {b, e};
  return {b + lead, e - trail};
}

// Smallest [i, j] over `norm` whose tokens cover `required`; nullopt if none.
std::optional<std::pair<std::size_t, std::size_t>> shortest_cover(
    const std::vector<std::string>& norm, std::size_t lo, std::size_t hi,
    const std::set<std::string>& required) {
  std::optional<std::pair<std::size_t, std::size_t>> best;
  for (std::size_t i = lo; i < hi; ++i) {
    if (!required.contains(norm[i])) continue;
    std::set<std::string> seen;
    for (std::size_t j = i; j < hi; ++j) {
      if (required.contains(norm[j])) seen.insert(norm[j]);
      if (seen.size() == required.size()) {
        if (!best || j - i < best->second - best->first) best = {{i, j}};
        break;
      }
    }
  }
  return best;
}

}  // namespace

bool answer_is_correct(std::string_view predicted, std::string_view source_phrase) {
  const auto source = normalized_tokens(source_phrase);
  const auto source_content = content_set(source);
  if (source_content.empty()) {
    std::set<std::string> raw_source;
    for (const auto& t : split_whitespace(source_phrase)) raw_source.insert(to_lower(t));
    for (const auto& t : split_whitespace(predicted)) {
      if (raw_source.contains(to_lower(t))) return true;
    }
    return false;
  }
  for (const auto& t : content_set(normalized_tokens(predicted))) {
    if (source_content.contains(t)) return true;
  }
  return false;
}

std::string TemplateStubGenerator::generate(std::string_view sentence_text,
                                            std::string_view answer_text,
                                            CharRange answer_chars) const {
  auto [ab, ae] = answer_chars;
  if (ab >= ae || ae > sentence_text.size()) {
    const auto pos = sentence_text.find(answer_text);
    if (pos == std::string_view::npos) {
      ab = ae = 0;
    } else {
      ab = pos;
      ae = pos + answer_text.size();
    }
  }
  std::string key;
  for (const auto& tok : split_whitespace_with_offsets(sentence_text)) {
    if (tok.begin < ae && ab < tok.end) continue;
    const auto norm = normalize_token(tok.text);
    if (norm.empty() || is_stopword(norm)) continue;
    key = norm;
    break;
  }
  return "Q[" + std::string(answer_text) + "|" + key + "]?";
}

std::optional<std::pair<std::string, std::string>> parse_stub_question(std::string_view q) {
  if (!q.starts_with("Q[") || !q.ends_with("]?")) return std::nullopt;
  const auto body = q.substr(2, q.size() - 4);
  const auto bar = body.rfind('|');
  if (bar == std::string_view::npos) return std::nullopt;
  return std::pair{std::string(body.substr(0, bar)), std::string(body.substr(bar + 1))};
}

QAPrediction LexicalStubAnswerer::answer(std::string_view question,
                                         std::string_view context) const {
  if (!overrides_.empty()) {
    auto it = overrides_.find({std::string(question), sha256_hex(context)});
    if (it != overrides_.end()) return it->second;
  }
  const auto parsed = parse_stub_question(question);
  if (!parsed) return QAPrediction::unanswerable();
  const auto& [phrase, key] = *parsed;

  const auto phrase_norm = normalized_tokens(phrase);
  auto phrase_required = content_set(phrase_norm);
  if (phrase_required.empty()) phrase_required.insert(phrase_norm.begin(), phrase_norm.end());
  if (phrase_required.empty()) return QAPrediction::unanswerable();
  auto required = phrase_required;
  if (!key.empty()) required.insert(key);

  const auto toks = split_whitespace_with_offsets(context);
  std::vector<std::string> norm;
  norm.reserve(toks.size());
  for (const auto& t : toks) norm.push_back(normalize_token(t.text));

  std::optional<std::pair<std::size_t, std::size_t>> best;
  std::pair<std::size_t, std::size_t> best_sentence;  // [begin, end)
  std::size_t s = 0;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    const auto& raw = toks[i].text;
    std::size_t k = raw.size();
    while (k > 0 && std::ispunct(static_cast<unsigned char>(raw[k - 1]))) --k;
    const bool boundary = raw.substr(k).find_first_of(".!?") != std::string::npos;
    if (boundary || i + 1 == toks.size()) {
      auto w = shortest_cover(norm, s, i + 1, required);
      if (w && (!best || w->second - w->first < best->second - best->first)) {
        best = w;
        best_sentence = {s, i + 1};
      }
      s = i + 1;
    }
  }
  if (!best) return QAPrediction::unanswerable();
  // The answer is the phrase itself: verbatim when the sentence holds it
  // whole, otherwise its content tokens as they occur inside the window.
  auto span = shortest_cover(norm, best->first, best->second + 1, phrase_required);
  if (!phrase_norm.empty()) {
    for (std::size_t i = best_sentence.first; i + phrase_norm.size() <= best_sentence.second; ++i) {
      if (std::equal(phrase_norm.begin(), phrase_norm.end(), norm.begin() + static_cast<std::ptrdiff_t>(i)) &&
          i <= span->first && span->second < i + phrase_norm.size()) {
        span = std::pair{i, i + phrase_norm.size() - 1};
        break;
      }
    }
  }
  const auto b = core_range(toks[span->first]).first;
  const auto e = core_range(toks[span->second]).second;
  QAPrediction p;
  p.is_answerable = true;
  p.answer_text = std::string(context.substr(b, e - b));
  p.confidence = 1.0;
  p.answer_start = b;
  return p;
}

std::unique_ptr<QuestionGenerator> template_stub_generator() {
  return std::make_unique<TemplateStubGenerator>();
}

std::unique_ptr<QuestionAnswerer> lexical_stub_answerer(
    LexicalStubAnswerer::OverrideTable overrides) {
  return std::make_unique<LexicalStubAnswerer>(std::move(overrides));
}

bool is_answerable(double best_span_score, double null_score, double threshold) {
  return null_score - best_span_score < threshold;
}

RemoteQuestionGenerator::RemoteQuestionGenerator(std::shared_ptr<JsonChannel> channel,
                                                 std::size_t max_concurrency)
    : channel_(std::move(channel)), max_concurrency_(max_concurrency) {}

std::string RemoteQuestionGenerator::generate(std::string_view sentence_text,
                                              std::string_view answer_text,
                                              CharRange answer_chars) const {
  nlohmann::json req = {{"op", "generate"},
                        {"sentence", std::string(sentence_text)},
                        {"answer", std::string(answer_text)},
                        {"answer_start", answer_chars.first}};
  const auto reply = channel_->call(req);
  auto it = reply.find("question");
  if (it == reply.end() || !it->is_string() || it->get<std::string>().empty()) {
    throw AdapterError(version(), "generate reply lacks a non-empty 'question'");
  }
  return it->get<std::string>();
}

RemoteQuestionAnswerer::RemoteQuestionAnswerer(std::shared_ptr<JsonChannel> channel,
                                               double no_answer_threshold,
                                               std::size_t max_concurrency)
    : channel_(std::move(channel)),
      threshold_(no_answer_threshold),
      max_concurrency_(max_concurrency) {}

QAPrediction RemoteQuestionAnswerer::answer(std::string_view question,
                                            std::string_view context) const {
  const auto reply = channel_->call(
      {{"op", "answer"}, {"question", std::string(question)}, {"context", std::string(context)}});
  QAPrediction p;
  try {
    if (reply.contains("best_span_score") && reply.contains("null_score")) {
      p.is_answerable = is_answerable(reply.at("best_span_score").get<double>(),
                                      reply.at("null_score").get<double>(), threshold_);
    } else {
      p.is_answerable = reply.at("answerable").get<bool>();
    }
    if (p.is_answerable) p.answer_text = reply.value("answer", std::string());
    p.confidence = std::clamp(reply.value("confidence", p.is_answerable ? 1.0 : 0.0), 0.0, 1.0);
    if (p.is_answerable && reply.contains("answer_start") && !reply["answer_start"].is_null()) {
      p.answer_start = reply["answer_start"].get<std::size_t>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw AdapterError(version(), std::string("malformed answer reply: ") + e.what());
  }
  if (p.is_answerable && p.answer_text.empty()) p.is_answerable = false;
  return p;
}

nlohmann::json handle_adapter_request(const nlohmann::json& request, const QuestionGenerator& qg,
                                      const QuestionAnswerer& qa,
                                      const SyntacticProvider& provider) {
  try {
    const auto op = request.at("op").get<std::string>();
    if (op == "generate") {
      const auto sentence = request.at("sentence").get<std::string>();
      const auto answer = request.at("answer").get<std::string>();
      std::size_t start = sentence.find(answer);
      if (request.contains("answer_start") && request["answer_start"].is_number_unsigned()) {
        start = request["answer_start"].get<std::size_t>();
      }
      CharRange range = start == std::string::npos ? CharRange{0, 0}
                                                   : CharRange{start, start + answer.size()};
      return {{"question", qg.generate(sentence, answer, range)}};
    }
    if (op == "answer") {
      const auto p = qa.answer(request.at("question").get<std::string>(),
                               request.at("context").get<std::string>());
      nlohmann::json reply = {
          {"answerable", p.is_answerable}, {"answer", p.answer_text}, {"confidence", p.confidence}};
      if (p.answer_start) reply["answer_start"] = *p.answer_start;
      return reply;
    }
    if (op == "annotate") {
      return analysis_to_json(provider.analyze(request.at("text").get<std::string>()));
    }
    return {{"error", "unknown op '" + op + "'"}};
  } catch (const std::exception& e) {
    return {{"error", e.what()}};
  }
}

}  // namespace spansteer
