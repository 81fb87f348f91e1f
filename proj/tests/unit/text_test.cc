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

#include "spansteer/text.h"

#include <gtest/gtest.h>

#include <algorithm>

namespace spansteer {
namespace {

TEST(Text, NormalizeStripsSurroundingPunctuationAndLowercases) {
  EXPECT_EQ(normalize_token("\"Leone,\""), "leone");
  EXPECT_EQ(normalize_token("U.S."), "u.s");
  EXPECT_EQ(normalize_token("..."), "");
}

TEST(Text, StopwordListIsTheFixedThirtyWords) {
  const auto words = stopwords();
  EXPECT_EQ(words.size(), 30u);
  EXPECT_TRUE(std::is_sorted(words.begin(), words.end()));
  for (auto w : {"the", "a", "of", "with", "were"}) EXPECT_TRUE(is_stopword(w)) << w;
  for (auto w : {"sierra", "one", "said"}) EXPECT_FALSE(is_stopword(w)) << w;
}

TEST(Text, AlignTokensAllowsOnlyWhitespaceGaps) {
  const std::vector<std::string> tokens{"Hello", ",", "world", "."};
  const auto offsets = align_tokens("Hello, world.", tokens);
  ASSERT_TRUE(offsets);
  EXPECT_EQ((*offsets)[2], (std::pair<std::size_t, std::size_t>{7, 12}));
  EXPECT_FALSE(align_tokens("Hello there, world.", tokens));
}

TEST(Text, DetokenizeAttachesClosingPunctuation) {
  const std::vector<std::string> tokens{"He", "left", ",", "then", "returned", "."};
  EXPECT_EQ(detokenize(tokens), "He left, then returned.");
}

TEST(Text, Sha256MatchesKnownDigest) {
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(sha256_hex(""),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST(Text, SplitWhitespaceWithOffsets) {
  const auto toks = split_whitespace_with_offsets("  a bb\tc ");
  ASSERT_EQ(toks.size(), 3u);
  EXPECT_EQ(toks[1].text, "bb");
  EXPECT_EQ(toks[1].begin, 4u);
  EXPECT_EQ(toks[1].end, 6u);
}

}  // namespace
}  // namespace spansteer
