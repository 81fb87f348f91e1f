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

#include <gtest/gtest.h>

#include <random>

#include "fixtures.h"
#include "spansteer/error.h"

namespace spansteer {
namespace {

using V = std::vector<std::string>;

TEST(Marking, WrapsSpanInMarkers) {
  const V tokens{"x1", "x2", "x3", "x4", "x5", "x6"};
  const auto m = mark_spans(tokens, std::vector<TokenSpan>{{3, 4}});
  EXPECT_EQ(m.tokens, (V{"x1", "x2", "x3", "[SS]", "x4", "x5", "[SE]", "x6"}));
  EXPECT_EQ(m.provenance.at(3), (TokenSpan{3, 4}));
  EXPECT_EQ(m.provenance.at(6), (TokenSpan{3, 4}));
}

TEST(Marking, TwoSpans) {
  const V tokens{"t0", "t1", "t2", "t3"};
  EXPECT_EQ(mark_spans(tokens, std::vector<TokenSpan>{{2, 3}, {0, 0}}).tokens,
            (V{"[SS]", "t0", "[SE]", "t1", "[SS]", "t2", "t3", "[SE]"}));
  EXPECT_EQ(mark_spans(tokens, {}).tokens, tokens);
}

TEST(Marking, InvalidSpansRejected) {
  const V tokens{"a", "b", "c"};
  EXPECT_THROW(mark_spans(tokens, std::vector<TokenSpan>{{0, 1}, {1, 2}}), ValidationError);
  EXPECT_THROW(mark_spans(tokens, std::vector<TokenSpan>{{2, 3}}), ValidationError);
}

TEST(Marking, RegionsAndMalformedStreams) {
  EXPECT_EQ(marked_regions(V{"a", "[SS]", "b", "c", "[SE]", "d"}),
            (std::vector<TokenSpan>{{1, 2}}));
  EXPECT_THROW(marked_regions(V{"[SS]", "a", "[SS]", "b", "[SE]", "[SE]"}), ValidationError);
  EXPECT_THROW(marked_regions(V{"a", "[SE]"}), ValidationError);
  EXPECT_THROW(marked_regions(V{"[SS]", "a"}), ValidationError);
}

TEST(Overlaps, Policy) {
  const std::vector<ScoredSpan> disjoint{{{0, 1}, 0.1}, {{3, 4}, 0.2}};
  EXPECT_EQ(resolve_overlaps(disjoint), (std::vector<TokenSpan>{{0, 1}, {3, 4}}));
  const std::vector<ScoredSpan> nested{{{2, 6}, 0.9}, {{3, 4}, 0.5}};
  EXPECT_EQ(resolve_overlaps(nested), (std::vector<TokenSpan>{{2, 6}}));
  // a=[0,2] b=[2,4] c=[4,6]; a > c > b.
  const std::vector<ScoredSpan> chain{{{0, 2}, 3}, {{2, 4}, 1}, {{4, 6}, 2}};
  EXPECT_EQ(resolve_overlaps(chain), (std::vector<TokenSpan>{{0, 2}, {4, 6}}));
  const auto r = resolve_overlap_indices(chain);
  EXPECT_EQ(r.kept, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(r.dropped, (std::vector<std::size_t>{1}));
  const std::vector<ScoredSpan> tie{{{3, 4}, 0}, {{2, 6}, 0}, {{0, 0}, 0}, {{0, 1}, 0}};
  EXPECT_EQ(resolve_overlaps(tie), (std::vector<TokenSpan>{{0, 1}, {2, 6}}));
}

TEST(MarkingProperty, RoundTripAndOrderIndependence) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0, 1);
  for (int t = 0; t < 300; ++t) {
    const auto tokens = testing::random_tokens(rng, 1 + rng() % 30, 20);
    auto spans = testing::random_disjoint_spans(rng, tokens.size());
    std::shuffle(spans.begin(), spans.end(), rng);
    const auto m = mark_spans(tokens, spans);
    ASSERT_EQ(strip_markers(m.tokens), tokens);
    ASSERT_EQ(m.tokens.size(), tokens.size() + 2 * spans.size());
    ASSERT_EQ(m.provenance.size(), 2 * spans.size());
    auto sorted = spans;
    std::sort(sorted.begin(), sorted.end());
    ASSERT_EQ(marked_regions(m.tokens), sorted);

    std::vector<ScoredSpan> scored;
    for (std::size_t i = 0; i < 6; ++i) {
      const std::size_t a = rng() % tokens.size();
      const std::size_t b = std::min(tokens.size() - 1, a + rng() % 4);
      scored.push_back({{a, b}, u(rng)});
    }
    const auto kept = resolve_overlaps(scored);
    std::shuffle(scored.begin(), scored.end(), rng);
    ASSERT_EQ(resolve_overlaps(scored), kept);
    for (std::size_t i = 1; i < kept.size(); ++i) ASSERT_LT(kept[i - 1].end, kept[i].start);
    ASSERT_NO_THROW(marked_regions(mark_spans(tokens, kept).tokens));
  }
}

}  // namespace
}  // namespace spansteer
