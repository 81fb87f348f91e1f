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

#include "spansteer/augmentation.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <string>

#include "spansteer/error.h"
#include "spansteer/text.h"

namespace spansteer {
namespace {

std::vector<std::string> lowered(std::span<const std::string> tokens, const TokenSpan& s) {
  std::vector<std::string> out;
  for (auto i = s.start; i <= s.end; ++i) out.push_back(to_lower(tokens[i]));
  return out;
}

std::optional<std::size_t> find_subsequence(const std::vector<std::string>& hay,
                                            const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > hay.size()) return std::nullopt;
  auto it = std::search(hay.begin(), hay.end(), needle.begin(), needle.end());
  if (it == hay.end()) return std::nullopt;
  return static_cast<std::size_t>(it - hay.begin());
}

SpanSummaryMapping empty_mapping(const GoldSummary& summary) {
  SpanSummaryMapping m;
  m.sentence_to_labels.resize(summary.sentences.size());
  return m;
}

}  // namespace

bool SpanSummaryMapping::consistent() const {
  std::size_t listed = 0;
  for (std::size_t j = 0; j < sentence_to_labels.size(); ++j) {
    for (auto l : sentence_to_labels[j]) {
      auto it = label_to_sentence.find(l);
      if (it == label_to_sentence.end() || it->second != j) return false;
      ++listed;
    }
  }
  return listed == label_to_sentence.size();
}

SpanSummaryMapping build_mapping(std::span<const SpanLabel> labels, const GoldSummary& summary) {
  auto m = empty_mapping(summary);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& l = labels[i];
    if (!l.salient) continue;
    if (!l.summary_sentence) {
      throw ValidationError("salient label " + std::to_string(i) + " has no summary_sentence");
    }
    if (*l.summary_sentence >= summary.sentences.size()) {
      throw ValidationError("salient label " + std::to_string(i) + " maps to missing sentence " +
                            std::to_string(*l.summary_sentence));
    }
    m.label_to_sentence[i] = *l.summary_sentence;
    m.sentence_to_labels[*l.summary_sentence].push_back(i);
  }
  return m;
}

SpanSummaryMapping build_lexical_mapping(const AnnotatedExample& ex) {
  auto m = empty_mapping(ex.summary);
  std::vector<std::string> summary_lower;
  for (const auto& t : ex.summary.tokens) summary_lower.push_back(to_lower(t));
  for (std::size_t i = 0; i < ex.oracle_spans.size(); ++i) {
    const auto& l = ex.oracle_spans[i];
    if (!l.salient) continue;
    const auto at = find_subsequence(summary_lower, lowered(ex.document.tokens, l.span));
    if (!at) {
      throw ValidationError("salient label " + std::to_string(i) +
                            " does not occur in the gold summary");
    }
    const auto j = *ex.summary.sentence_of(*at);
    m.label_to_sentence[i] = j;
    m.sentence_to_labels[j].push_back(i);
  }
  return m;
}

SpanSummaryMapping build_example_mapping(const AnnotatedExample& ex) {
  switch (ex.span_type) {
    case SpanType::kQuestionAnswer:
      return build_mapping(ex.oracle_spans, ex.summary);
    case SpanType::kEntity:
    case SpanType::kNounPhrase:
      return build_lexical_mapping(ex);
    case SpanType::kSentence:
      break;
  }
  throw ConfigError("augmentation is not defined for sentence spans");
}

GoldSummary select_summary_sentences(const GoldSummary& summary,
                                     std::span<const std::size_t> keep) {
  GoldSummary out;
  std::vector<std::string> texts;
  for (auto j : keep) {
    const auto& s = summary.sentences.at(j);
    const auto start = out.tokens.size();
    out.tokens.insert(out.tokens.end(), summary.tokens.begin() + static_cast<std::ptrdiff_t>(s.start),
                      summary.tokens.begin() + static_cast<std::ptrdiff_t>(s.end + 1));
    out.sentences.push_back({start, out.tokens.size() - 1});
    texts.push_back(summary.sentence_text(j));
  }
  out.text = join(texts, " ");
  return out;
}

std::optional<MappedExample> remove_unsupported_sentences(const AnnotatedExample& ex,
                                                          const SpanSummaryMapping& mapping) {
  std::vector<std::size_t> keep;
  std::vector<std::optional<std::size_t>> new_index(ex.summary.sentences.size());
  for (std::size_t j = 0; j < ex.summary.sentences.size(); ++j) {
    if (mapping.supported(j)) {
      new_index[j] = keep.size();
      keep.push_back(j);
    }
  }
  if (keep.empty()) return std::nullopt;

  MappedExample out{ex, {}};
  if (keep.size() == ex.summary.sentences.size()) {
    out.mapping = mapping;
    return out;
  }
  out.example.summary = select_summary_sentences(ex.summary, keep);
  for (auto& l : out.example.oracle_spans) {
    if (l.summary_sentence) l.summary_sentence = new_index[*l.summary_sentence];
  }
  out.mapping.sentence_to_labels.resize(keep.size());
  for (const auto& [label, sentence] : mapping.label_to_sentence) {
    const auto j = *new_index[sentence];
    out.mapping.label_to_sentence[label] = j;
    out.mapping.sentence_to_labels[j].push_back(label);
  }
  return out;
}

std::vector<AnnotatedExample> generate_prefix_examples(const AnnotatedExample& ex,
                                                       const SpanSummaryMapping& mapping) {
  const auto m = ex.summary.sentences.size();
  const auto source_id = ex.augmentation ? ex.augmentation->source_id : ex.document.id;
  std::vector<AnnotatedExample> out;
  out.reserve(m);
  for (std::size_t k = 1; k <= m; ++k) {
    AnnotatedExample p = ex;
    if (k < m) {
      std::vector<std::size_t> keep(k);
      for (std::size_t j = 0; j < k; ++j) keep[j] = j;
      p.summary = select_summary_sentences(ex.summary, keep);
      for (std::size_t i = 0; i < p.oracle_spans.size(); ++i) {
        auto& l = p.oracle_spans[i];
        if (l.summary_sentence && *l.summary_sentence >= k) l.summary_sentence.reset();
        if (auto it = mapping.label_to_sentence.find(i);
            it != mapping.label_to_sentence.end() && it->second >= k) {
          l.salient = false;
        }
      }
      p.document.id = source_id + "#k" + std::to_string(k);
    }
    p.augmentation = AugmentationInfo{source_id, k, m};
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<AnnotatedExample> augment_corpus(std::span<const AnnotatedExample> corpus,
                                             AugmentStats* stats) {
  AugmentStats local;
  std::vector<AnnotatedExample> out;
  for (const auto& ex : corpus) {
    ++local.input;
    auto cleaned = remove_unsupported_sentences(ex, build_example_mapping(ex));
    if (!cleaned) {
      ++local.dropped;
      local.removed_sentences += ex.summary.sentences.size();
      continue;
    }
    local.removed_sentences +=
        ex.summary.sentences.size() - cleaned->example.summary.sentences.size();
    for (auto& p : generate_prefix_examples(cleaned->example, cleaned->mapping)) {
      out.push_back(std::move(p));
    }
  }
  local.output = out.size();
  spdlog::info("augmentation: {} examples in, {} dropped (no supported sentence), "
               "{} summary sentences removed, {} examples out",
               local.input, local.dropped, local.removed_sentences, local.output);
  if (stats) *stats = local;
  return out;
}

}  // namespace spansteer
