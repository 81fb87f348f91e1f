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

#include "spansteer/oracles.h"

#include <algorithm>
#include <map>
#include <set>

#include "spansteer/error.h"
#include "spansteer/rouge.h"
#include "spansteer/text.h"

namespace spansteer {
namespace {

std::vector<std::string> lowered(const std::vector<std::string>& tokens, const TokenSpan& s) {
  std::vector<std::string> out;
  for (std::size_t i = s.start; i <= s.end; ++i) out.push_back(to_lower(tokens[i]));
  return out;
}

bool contains_subsequence(const std::vector<std::string>& hay,
                          const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  return std::search(hay.begin(), hay.end(), needle.begin(), needle.end()) != hay.end();
}

std::string span_name(const TokenSpan& s) {
  return "[" + std::to_string(s.start) + "," + std::to_string(s.end) + "]";
}

}  // namespace

std::vector<std::size_t> greedy_rouge2_picks(const Document& doc, const GoldSummary& summary,
                                             std::size_t k) {
  std::vector<std::size_t> picks;
  std::vector<bool> chosen(doc.sentences.size(), false);
  double current = 0.0;
  while (picks.size() < k) {
    std::optional<std::size_t> best;
    double best_score = current;
    for (std::size_t s = 0; s < doc.sentences.size(); ++s) {
      if (chosen[s]) continue;
      std::vector<std::string> selection;
      for (std::size_t t = 0; t < doc.sentences.size(); ++t) {
        if (!chosen[t] && t != s) continue;
        const auto& span = doc.sentences[t];
        selection.insert(selection.end(), doc.tokens.begin() + static_cast<std::ptrdiff_t>(span.start),
                         doc.tokens.begin() + static_cast<std::ptrdiff_t>(span.end + 1));
      }
      const double score = rouge_n(selection, summary.tokens, 2).f1;
      if (score > best_score) {
        best_score = score;
        best = s;
      }
    }
    if (!best) break;
    chosen[*best] = true;
    picks.push_back(*best);
    current = best_score;
  }
  return picks;
}

std::vector<TokenSpan> greedy_rouge2_sentences(const Document& doc, const GoldSummary& summary,
                                               std::size_t k) {
  if (k == 0) throw ConfigError("greedy_rouge2_sentences: k must be >= 1");
  auto picks = greedy_rouge2_picks(doc, summary, k);
  std::sort(picks.begin(), picks.end());
  std::vector<TokenSpan> out;
  for (auto s : picks) out.push_back(doc.sentences[s]);
  return out;
}

std::vector<SpanLabel> lexical_first_occurrence(const Document& doc, const GoldSummary& summary,
                                                PhraseType type) {
  std::vector<std::string> summary_lower;
  for (const auto& t : summary.tokens) summary_lower.push_back(to_lower(t));

  auto candidates = doc.phrases_of(type);
  std::sort(candidates.begin(), candidates.end());
  std::set<std::vector<std::string>> claimed;
  std::vector<SpanLabel> out;
  for (const auto& span : candidates) {
    SpanLabel l;
    l.span = span;
    auto surface = lowered(doc.tokens, span);
    if (!claimed.contains(surface) && contains_subsequence(summary_lower, surface)) {
      l.salient = true;
      claimed.insert(std::move(surface));
    }
    out.push_back(std::move(l));
  }
  return out;
}

SentenceContext sentence_context(const Document& doc, const TokenSpan& span) {
  const auto sent = doc.sentence_of(span.start);
  if (!sent) throw ValidationError("span " + span_name(span) + " is outside every sentence");
  const auto& s = doc.sentences[*sent];
  SentenceContext ctx;
  ctx.sentence = *sent;
  if (auto offsets = align_tokens(doc.text, doc.tokens)) {
    const auto base = (*offsets)[s.start].first;
    ctx.sentence_text = doc.text.substr(base, (*offsets)[s.end].second - base);
    ctx.answer_chars = {(*offsets)[span.start].first - base, (*offsets)[span.end].second - base};
  } else {
    std::vector<std::string> all(doc.tokens.begin() + static_cast<std::ptrdiff_t>(s.start),
                                 doc.tokens.begin() + static_cast<std::ptrdiff_t>(s.end + 1));
    ctx.sentence_text = detokenize(all);
    // Re-locate the span inside the detokenized sentence.
    auto offs = align_tokens(ctx.sentence_text, all);
    const auto i = span.start - s.start;
    const auto j = span.end - s.start;
    ctx.answer_chars = offs ? CharRange{(*offs)[i].first, (*offs)[j].second} : CharRange{0, 0};
  }
  ctx.answer_text = ctx.sentence_text.substr(ctx.answer_chars.first,
                                             ctx.answer_chars.second - ctx.answer_chars.first);
  return ctx;
}

GeneratedQuestion generate_question(const Document& doc, const TokenSpan& span,
                                    const QuestionGenerator& qg) {
  const auto ctx = sentence_context(doc, span);
  GeneratedQuestion q;
  q.source_span = span;
  q.source_sentence = ctx.sentence;
  try {
    q.question = qg.generate(ctx.sentence_text, ctx.answer_text, ctx.answer_chars);
  } catch (const std::exception& e) {
    throw AdapterError("question generation for span " + span_name(span) + " of '" + doc.id + "'",
                       e.what());
  }
  if (q.question.empty()) {
    throw AdapterError("question generation for span " + span_name(span) + " of '" + doc.id + "'",
                       "empty question");
  }
  return q;
}

SummaryContext summary_context(const GoldSummary& summary) {
  SummaryContext ctx;
  if (auto offsets = align_tokens(summary.text, summary.tokens)) {
    ctx.text = summary.text;
    ctx.token_offsets = std::move(*offsets);
  } else {
    ctx.text = detokenize(summary.tokens);
    ctx.token_offsets = align_tokens(ctx.text, summary.tokens).value_or(
        std::vector<std::pair<std::size_t, std::size_t>>{});
  }
  return ctx;
}

std::size_t map_answer_to_sentence(const GoldSummary& summary, const SummaryContext& ctx,
                                   const QAPrediction& prediction) {
  if (summary.sentences.empty()) return 0;
  std::optional<std::size_t> pos = prediction.answer_start;
  if (!pos || *pos >= ctx.text.size()) {
    const auto found = ctx.text.find(prediction.answer_text);
    if (found != std::string::npos) {
      pos = found;
    } else {
      const auto lower_found = to_lower(ctx.text).find(to_lower(prediction.answer_text));
      if (lower_found != std::string::npos) pos = lower_found;
    }
  }
  if (pos && !ctx.token_offsets.empty()) {
    // First token ending after the answer start holds it.
    for (std::size_t t = 0; t < ctx.token_offsets.size(); ++t) {
      if (ctx.token_offsets[t].second > *pos) return summary.sentence_of(t).value_or(0);
    }
    return summary.sentences.size() - 1;
  }
  // Fall back to the first sentence sharing a content token with the answer.
  for (std::size_t s = 0; s < summary.sentences.size(); ++s) {
    if (answer_is_correct(summary.sentence_text(s), prediction.answer_text)) return s;
  }
  return 0;
}

std::vector<SpanLabel> qa_salience(const Document& doc, const GoldSummary& summary,
                                   const QuestionGenerator& qg, const QuestionAnswerer& qa) {
  const auto ctx = summary_context(summary);
  auto nps = doc.phrases_of(PhraseType::kNounPhrase);
  std::sort(nps.begin(), nps.end());
  std::vector<SpanLabel> out;
  out.reserve(nps.size());
  for (const auto& span : nps) {
    const auto q = generate_question(doc, span, qg);
    QAPrediction p;
    try {
      p = qa.answer(q.question, ctx.text);
    } catch (const std::exception& e) {
      throw AdapterError("question answering for span " + span_name(span) + " of '" + doc.id + "'",
                         e.what());
    }
    SpanLabel l;
    l.span = span;
    l.question = q.question;
    l.predicted_answer = p.is_answerable ? p.answer_text : std::string();
    l.salient = p.is_answerable && answer_is_correct(p.answer_text, doc.surface(span));
    if (l.salient) l.summary_sentence = map_answer_to_sentence(summary, ctx, p);
    out.push_back(std::move(l));
  }
  return out;
}

AnnotatedExample label_example(AnnotatedExample ex, const LabelingOptions& options) {
  ex.span_type = options.span_type;
  ex.oracle_spans.clear();
  switch (options.span_type) {
    case SpanType::kSentence: {
      const auto picked = greedy_rouge2_sentences(ex.document, ex.summary, options.sentence_k);
      for (const auto& s : ex.document.sentences) {
        SpanLabel l;
        l.span = s;
        l.salient = std::find(picked.begin(), picked.end(), s) != picked.end();
        ex.oracle_spans.push_back(std::move(l));
      }
      break;
    }
    case SpanType::kEntity:
      ex.oracle_spans = lexical_first_occurrence(ex.document, ex.summary, PhraseType::kEntity);
      break;
    case SpanType::kNounPhrase:
      ex.oracle_spans = lexical_first_occurrence(ex.document, ex.summary, PhraseType::kNounPhrase);
      break;
    case SpanType::kQuestionAnswer:
      if (!options.qg || !options.qa) {
        throw ConfigError("qa labeling needs a question generator and answerer");
      }
      ex.oracle_spans = qa_salience(ex.document, ex.summary, *options.qg, *options.qa);
      break;
  }
  return ex;
}

}  // namespace spansteer
