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

#include <gtest/gtest.h>

#include <random>

#include "fixtures.h"
#include "spansteer/error.h"

namespace spansteer {
namespace {

// Document of single-token sentences; label i covers token i and maps to
// sentences[i] (nullopt = non-salient).
AnnotatedExample constructed(const std::vector<std::optional<std::size_t>>& sentence_of_label,
                             std::size_t summary_sentences) {
  std::vector<std::vector<std::string>> doc, summary;
  for (std::size_t i = 0; i < sentence_of_label.size(); ++i) doc.push_back({"d" + std::to_string(i)});
  for (std::size_t j = 0; j < summary_sentences; ++j) summary.push_back({"s" + std::to_string(j), "."});
  AnnotatedExample ex;
  ex.document = testing::document_from_sentences(doc);
  ex.document.id = "c";
  ex.summary = testing::summary_from_sentences(summary);
  for (std::size_t i = 0; i < sentence_of_label.size(); ++i) {
    ex.document.phrases.push_back({{i, i}, PhraseType::kNounPhrase});
    SpanLabel l{{i, i}, sentence_of_label[i].has_value(), "q" + std::to_string(i) + "?",
                "d" + std::to_string(i), sentence_of_label[i]};
    ex.oracle_spans.push_back(l);
  }
  return ex;
}

std::size_t salient_count(const AnnotatedExample& ex) { return ex.salient_spans().size(); }

TEST(Mapping, HandAssembly) {
  const auto ex = constructed({0, 0, 1, std::nullopt}, 3);
  const auto m = build_mapping(ex.oracle_spans, ex.summary);
  EXPECT_EQ(m.sentence_to_labels, (std::vector<std::vector<std::size_t>>{{0, 1}, {2}, {}}));
  EXPECT_TRUE(m.consistent());
  EXPECT_FALSE(m.supported(2));
}

TEST(Mapping, NoSalientLabelsAndStaleIndices) {
  auto ex = constructed({std::nullopt, std::nullopt}, 2);
  ex.oracle_spans[0].summary_sentence = 1;  // stale on a non-salient label
  const auto m = build_mapping(ex.oracle_spans, ex.summary);
  EXPECT_TRUE(m.label_to_sentence.empty());
  EXPECT_EQ(m.sentence_to_labels.size(), 2u);
}

TEST(Mapping, SalientWithoutSentenceIsAnError) {
  auto ex = constructed({0}, 1);
  ex.oracle_spans[0].summary_sentence.reset();
  EXPECT_THROW(build_mapping(ex.oracle_spans, ex.summary), ValidationError);
}

TEST(Mapping, SentenceTypeIsNotAugmentable) {
  auto ex = constructed({0}, 1);
  ex.span_type = SpanType::kSentence;
  EXPECT_THROW(build_example_mapping(ex), ConfigError);
}

TEST(Mapping, LexicalUsesFirstSummaryOccurrence) {
  auto ex = testing::raw_example("lex",
                                 "Maria Lopez met John Carter in Oslo. They spoke in Lima.",
                                 "John Carter flew out. Maria Lopez and John Carter met.");
  ex.span_type = SpanType::kEntity;
  ex.oracle_spans = {{{0, 1}, true}, {{3, 4}, true}, {{6, 6}, false}};
  const auto m = build_lexical_mapping(ex);
  EXPECT_EQ(m.label_to_sentence, (std::map<std::size_t, std::size_t>{{0, 1}, {1, 0}}));
  EXPECT_TRUE(m.consistent());
}

TEST(Removal, ThreeSentenceFixtureDropsTheUnsupportedSentence) {
  const auto ex = testing::three_sentence_summary_example();
  const auto mapping = build_mapping(ex.oracle_spans, ex.summary);
  const auto cleaned = remove_unsupported_sentences(ex, mapping);
  ASSERT_TRUE(cleaned);
  EXPECT_EQ(cleaned->example.summary.text,
            "Maria Lopez announced the new budget. Apex Energy agreed to fund the bridge.");
  EXPECT_EQ(cleaned->example.summary.sentences.size(), 2u);
  EXPECT_TRUE(cleaned->mapping.consistent());
  EXPECT_TRUE(validate_example(cleaned->example).empty());
}

TEST(Removal, AllSupportedUnchangedNoneSupportedDropped) {
  const auto full = constructed({0, 1}, 2);
  const auto kept = remove_unsupported_sentences(full, build_mapping(full.oracle_spans, full.summary));
  ASSERT_TRUE(kept);
  EXPECT_EQ(serialize_record(kept->example, CorpusSchema::kAnnotated),
            serialize_record(full, CorpusSchema::kAnnotated));
  const auto none = constructed({std::nullopt}, 2);
  EXPECT_FALSE(remove_unsupported_sentences(none, build_mapping(none.oracle_spans, none.summary)));
}

TEST(Prefix, CountsPerExample) {
  const auto ex = constructed({0, 0, 1, 2, std::nullopt}, 3);
  const auto out = generate_prefix_examples(ex, build_mapping(ex.oracle_spans, ex.summary));
  ASSERT_EQ(out.size(), 3u);
  EXPECT_EQ(salient_count(out[0]), 2u);
  EXPECT_EQ(salient_count(out[1]), 3u);
  EXPECT_EQ(salient_count(out[2]), 4u);
  EXPECT_EQ(out[0].document.id, "c#k1");
  EXPECT_EQ(out[2].document.id, "c");
  EXPECT_EQ(out[1].augmentation, (AugmentationInfo{"c", 2, 3}));
  for (const auto& p : out) {
    EXPECT_EQ(p.oracle_spans.size(), ex.oracle_spans.size());
    EXPECT_FALSE(p.oracle_spans[4].salient);
    EXPECT_TRUE(validate_example(p).empty());
  }
}

TEST(Prefix, SingleSentenceYieldsTheInput) {
  const auto ex = constructed({0, 0}, 1);
  const auto out = generate_prefix_examples(ex, build_mapping(ex.oracle_spans, ex.summary));
  ASSERT_EQ(out.size(), 1u);
  auto expected = ex;
  expected.augmentation = AugmentationInfo{"c", 1, 1};
  EXPECT_EQ(serialize_record(out[0], CorpusSchema::kAnnotated),
            serialize_record(expected, CorpusSchema::kAnnotated));
}

TEST(AugmentProperty, LawsOnRandomExamples) {
  std::mt19937_64 rng(17);
  for (int t = 0; t < 200; ++t) {
    const auto ex = testing::random_qa_example(rng, "r" + std::to_string(t));
    ASSERT_TRUE(validate_example(ex).empty());
    const auto mapping = build_mapping(ex.oracle_spans, ex.summary);
    std::size_t supported = 0;
    for (std::size_t j = 0; j < ex.summary.sentences.size(); ++j) supported += mapping.supported(j);

    const std::vector<AnnotatedExample> one{ex};
    const auto out = augment_corpus(one);
    ASSERT_EQ(out.size(), supported);
    if (supported == 0) continue;

    const auto cleaned = remove_unsupported_sentences(ex, mapping);
    const auto again = remove_unsupported_sentences(cleaned->example, cleaned->mapping);
    ASSERT_EQ(serialize_record(again->example, CorpusSchema::kAnnotated),
              serialize_record(cleaned->example, CorpusSchema::kAnnotated));

    for (std::size_t k = 0; k < out.size(); ++k) {
      const auto& p = out[k];
      ASSERT_TRUE(validate_example(p).empty());
      const auto m = build_mapping(p.oracle_spans, p.summary);
      for (std::size_t j = 0; j < p.summary.sentences.size(); ++j) ASSERT_TRUE(m.supported(j));
      ASSERT_EQ(p.summary.sentences.size(), k + 1);
      if (k + 1 < out.size()) {
        const auto& next = out[k + 1];
        const auto a = p.salient_spans();
        const auto b = next.salient_spans();
        ASSERT_TRUE(std::includes(b.begin(), b.end(), a.begin(), a.end()));
        ASSERT_TRUE(std::equal(p.summary.tokens.begin(), p.summary.tokens.end(),
                               next.summary.tokens.begin()));
      }
    }
  }
}

TEST(Augment, StatsAndSentenceTypeRejection) {
  const std::vector<AnnotatedExample> corpus{constructed({0, 1}, 2), constructed({std::nullopt}, 1),
                                             constructed({0}, 3)};
  AugmentStats stats;
  const auto out = augment_corpus(corpus, &stats);
  EXPECT_EQ(stats.input, 3u);
  EXPECT_EQ(stats.dropped, 1u);
  EXPECT_EQ(stats.removed_sentences, 3u);
  EXPECT_EQ(stats.output, 3u);
  EXPECT_EQ(out.size(), 3u);
  auto sentence = corpus[0];
  sentence.span_type = SpanType::kSentence;
  const std::vector<AnnotatedExample> bad{sentence};
  EXPECT_THROW(augment_corpus(bad), ConfigError);
}

}  // namespace
}  // namespace spansteer
