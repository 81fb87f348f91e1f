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

#include "spansteer/config.h"

#include <gtest/gtest.h>

#include <fstream>

#include "fixtures.h"
#include "spansteer/error.h"
#include "spansteer/parallel.h"

namespace spansteer {
namespace {

using nlohmann::json;

TEST(Config, DefaultsAndTableK) {
  const RunConfig c;
  EXPECT_EQ(c.seed, 13u);
  EXPECT_EQ(c.classifier.learning_rate, 3e-5);
  EXPECT_EQ(c.generator.learning_rate, 3e-5);
  EXPECT_EQ(c.classifier.epochs, 3u);
  EXPECT_EQ(c.generator.epochs, 5u);
  EXPECT_EQ(c.effective_k(), 20u);
  EXPECT_EQ(default_k("cnndm", SpanType::kSentence), 3u);
  EXPECT_EQ(default_k("cnndm", SpanType::kEntity), 10u);
  EXPECT_EQ(default_k("cnndm", SpanType::kNounPhrase), 25u);
  EXPECT_EQ(default_k("cnndm", SpanType::kQuestionAnswer), 20u);
  EXPECT_EQ(default_k("xsum", SpanType::kNounPhrase), 5u);
  EXPECT_EQ(default_k("nytimes", SpanType::kQuestionAnswer), 27u);
  EXPECT_THROW(default_k("wikihow", SpanType::kSentence), ConfigError);
}

TEST(Config, JsonRoundTrip) {
  RunConfig c;
  c.k = 7;
  c.span_type = SpanType::kEntity;
  c.dataset = "xsum";
  c.adapters.seq2seq = "echo:1";
  c.decode.beam = 2;
  c.apply_seed(99);
  c.workers = 4;
  const auto back = RunConfig::from_json(json::parse(c.to_json().dump()));
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_EQ(back.encoder.seed, 99u);
  EXPECT_EQ(back.generator.seed, 99u);
  EXPECT_EQ(back.effective_k(), 7u);
  const RunConfig defaults;
  EXPECT_EQ(RunConfig::from_json(json::parse(defaults.to_json().dump())).to_json(),
            defaults.to_json());
}

TEST(Config, RejectsBadValues) {
  EXPECT_THROW(RunConfig::from_json(json{{"k", 0}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json(json{{"k", "three"}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json(json{{"span_type", "paragraph"}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json(json{{"dataset", "wikihow"}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json(json{{"decode", {{"beam", 0}}}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json(json{{"sweep", {{"k_min", 5}, {"k_max", 2}}}}), ConfigError);
  EXPECT_THROW(RunConfig::from_json(json{{"workers", 0}}), ConfigError);
}

TEST(Config, UnknownKeysNamePath) {
  try {
    RunConfig::from_json(json{{"classifier", {{"epoch", 3}}}});
    FAIL();
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("classifier"), std::string::npos) << msg;
    EXPECT_NE(msg.find("epoch"), std::string::npos) << msg;
  }
  EXPECT_THROW(RunConfig::from_json(json{{"sead", 1}}), ConfigError);
}

TEST(Config, LoadFromFile) {
  const auto dir = testing::temp_dir("config");
  {
    std::ofstream(dir + "/c.json") << R"({"span_type":"np","k":4,"output_dir":"out"})";
    std::ofstream(dir + "/bad.json") << "{oops";
  }
  const auto c = RunConfig::load(dir + "/c.json");
  EXPECT_EQ(c.span_type, SpanType::kNounPhrase);
  EXPECT_EQ(c.effective_k(), 4u);
  EXPECT_EQ(c.output_dir, "out");
  EXPECT_THROW(RunConfig::load(dir + "/bad.json"), ConfigError);
  EXPECT_THROW(RunConfig::load(dir + "/missing.json"), ConfigError);
}

TEST(Parallel, WorkerLimits) {
  EXPECT_EQ(effective_workers(8, {0, 3}), 3u);
  EXPECT_EQ(effective_workers(0, {}), 1u);
  EXPECT_EQ(effective_workers(4, {0, 0}), 4u);
}

TEST(Parallel, ResultsByIndexAndLowestErrorWins) {
  std::vector<int> out(100);
  parallel_for(out.size(), 4, [&](std::size_t i) { out[i] = static_cast<int>(i * i); });
  for (std::size_t i = 0; i < out.size(); ++i) ASSERT_EQ(out[i], static_cast<int>(i * i));
  try {
    parallel_for(50, 4, [](std::size_t i) {
      if (i == 7 || i == 30) throw std::runtime_error(std::to_string(i));
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "7");
  }
}

}  // namespace
}  // namespace spansteer
