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

#ifndef SPANSTEER_MARKING_H_
#define SPANSTEER_MARKING_H_

// Span markers inserted into the document token stream:
//   x3 [SS] x4 x5 [SE] x6

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spansteer/corpus.h"

namespace spansteer {

inline constexpr std::string_view kSpanStart = "[SS]";
inline constexpr std::string_view kSpanEnd = "[SE]";

bool is_marker(std::string_view token);

struct ScoredSpan {
  TokenSpan span;
  double score = 0.0;
};

// Keeps spans greedily by descending score (ties: longer span, then earlier
// start), discarding any span sharing a token with one already kept.
// Returns the kept spans sorted by start.
std::vector<TokenSpan> resolve_overlaps(std::span<const ScoredSpan> spans);

// Same policy, reporting input indices: kept (sorted by span start) and
// dropped (ascending index).
struct OverlapResolution {
  std::vector<std::size_t> kept;
  std::vector<std::size_t> dropped;
};
OverlapResolution resolve_overlap_indices(std::span<const ScoredSpan> spans);

struct MarkedSequence {
  std::vector<std::string> tokens;
  // Position of each marker token -> the document span it delimits.
  std::map<std::size_t, TokenSpan> provenance;

  friend bool operator==(const MarkedSequence&, const MarkedSequence&) = default;
};

// Wraps each span in [SS] ... [SE]. Spans must be in bounds and pairwise
// disjoint (ValidationError otherwise); input order does not matter.
MarkedSequence mark_spans(std::span<const std::string> doc_tokens,
                          std::span<const TokenSpan> spans);

std::vector<std::string> strip_markers(std::span<const std::string> tokens);

// Marked regions recovered from a token stream, in stripped coordinates.
// Throws ValidationError on unbalanced or nested markers.
std::vector<TokenSpan> marked_regions(std::span<const std::string> tokens);

}  // namespace spansteer

#endif  // SPANSTEER_MARKING_H_
