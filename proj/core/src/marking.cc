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

#include "spansteer/marking.h"

#include <algorithm>
#include <numeric>

#include "spansteer/error.h"

namespace spansteer {

bool is_marker(std::string_view token) { return token == kSpanStart || token == kSpanEnd; }

OverlapResolution resolve_overlap_indices(std::span<const ScoredSpan> spans) {
  std::vector<std::size_t> order(spans.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& x = spans[a];
    const auto& y = spans[b];
    if (x.score != y.score) return x.score > y.score;
    if (x.span.length() != y.span.length()) return x.span.length() > y.span.length();
    if (x.span != y.span) return x.span < y.span;
    return a < b;
  });
  OverlapResolution r;
  for (auto i : order) {
    const bool clash = std::any_of(r.kept.begin(), r.kept.end(), [&](std::size_t k) {
      return spans[k].span.overlaps(spans[i].span);
    });
    (clash ? r.dropped : r.kept).push_back(i);
  }
  std::sort(r.kept.begin(), r.kept.end(),
            [&](std::size_t a, std::size_t b) { return spans[a].span < spans[b].span; });
  std::sort(r.dropped.begin(), r.dropped.end());
  return r;
}

std::vector<TokenSpan> resolve_overlaps(std::span<const ScoredSpan> spans) {
  const auto r = resolve_overlap_indices(spans);
  std::vector<TokenSpan> out;
  out.reserve(r.kept.size());
  for (auto i : r.kept) out.push_back(spans[i].span);
  return out;
}

MarkedSequence mark_spans(std::span<const std::string> doc_tokens,
                          std::span<const TokenSpan> spans) {
  std::vector<TokenSpan> sorted(spans.begin(), spans.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& s = sorted[i];
    if (s.start > s.end || s.end >= doc_tokens.size()) {
      throw ValidationError("mark_spans: span [" + std::to_string(s.start) + "," +
                            std::to_string(s.end) + "] out of bounds for " +
                            std::to_string(doc_tokens.size()) + " tokens");
    }
    if (i > 0 && sorted[i - 1].overlaps(s)) {
      throw ValidationError("mark_spans: overlapping spans [" + std::to_string(sorted[i - 1].start) +
                            "," + std::to_string(sorted[i - 1].end) + "] and [" +
                            std::to_string(s.start) + "," + std::to_string(s.end) +
                            "]; resolve overlaps first");
    }
  }
  MarkedSequence out;
  out.tokens.reserve(doc_tokens.size() + 2 * sorted.size());
  std::size_t next = 0;
  for (std::size_t i = 0; i < doc_tokens.size(); ++i) {
    if (next < sorted.size() && sorted[next].start == i) {
      out.provenance[out.tokens.size()] = sorted[next];
      out.tokens.emplace_back(kSpanStart);
    }
    out.tokens.push_back(doc_tokens[i]);
    if (next < sorted.size() && sorted[next].end == i) {
      out.provenance[out.tokens.size()] = sorted[next];
      out.tokens.emplace_back(kSpanEnd);
      ++next;
    }
  }
  return out;
}

std::vector<std::string> strip_markers(std::span<const std::string> tokens) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) {
    if (!is_marker(t)) out.push_back(t);
  }
  return out;
}

std::vector<TokenSpan> marked_regions(std::span<const std::string> tokens) {
  std::vector<TokenSpan> out;
  std::optional<std::size_t> open;
  std::size_t pos = 0;
  for (const auto& t : tokens) {
    if (t == kSpanStart) {
      if (open) throw ValidationError("nested span start marker");
      open = pos;
    } else if (t == kSpanEnd) {
      if (!open || *open == pos) throw ValidationError("unbalanced or empty span end marker");
      out.push_back({*open, pos - 1});
      open.reset();
    } else {
      ++pos;
    }
  }
  if (open) throw ValidationError("unterminated span start marker");
  return out;
}

}  // namespace spansteer
