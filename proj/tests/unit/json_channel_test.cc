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

#include "spansteer/json_channel.h"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <thread>

#include "fixtures.h"
#include "spansteer/annotation.h"
#include "spansteer/oracles.h"
#include "spansteer/error.h"
#include "spansteer/pipeline.h"
#include "spansteer/qa.h"
#include "spansteer/service.h"

namespace spansteer {
namespace {

using nlohmann::json;

const std::string kStub = std::string("process:") + SPANSTEER_CLI_PATH + " adapter-stub";

TEST(ProcessChannel, RoundTripsAgainstStubServer) {
  auto channel = make_channel(kStub);
  const auto reply = channel->call({{"op", "generate"},
                                    {"sentence", "A health worker was infected in Sierra Leone."},
                                    {"answer", "Sierra Leone"}});
  EXPECT_EQ(reply.at("question"), "Q[Sierra Leone|health]?");
  EXPECT_THROW(channel->call({{"op", "dance"}}), AdapterError);
  // Still usable after an error reply.
  EXPECT_TRUE(channel->call({{"op", "annotate"}, {"text", "John ran."}}).contains("tokens"));
}

TEST(ProcessChannel, DeadChildIsAdapterError) {
  ProcessChannel channel({"/bin/false"});
  EXPECT_THROW(channel.call({{"op", "generate"}}), AdapterError);
}

TEST(RemoteAdapters, MatchLocalStubs) {
  const auto qg = make_question_generator(kStub);
  const auto qa = make_question_answerer(kStub);
  const auto provider = make_syntactic_provider(kStub);
  const auto ex = testing::raw_example("r", "A health care worker was infected with Ebola in Sierra Leone. "
                                            "Sierra Leone is one of the hardest hit countries.",
                                       "The health care worker was infected in Sierra Leone.");
  const auto remote_doc = annotate(ex.document.text, *provider, {.id = "r"});
  EXPECT_EQ(remote_doc.phrases, ex.document.phrases);
  const auto local = qa_salience(ex.document, ex.summary, *template_stub_generator(),
                                 *lexical_stub_answerer());
  const auto remote = qa_salience(ex.document, ex.summary, *qg, *qa);
  EXPECT_EQ(local, remote);
}

TEST(RemoteAdapters, SpanScoresThresholded) {
  // A reply carrying scores instead of a verdict goes through the null-score rule.
  class Scores : public JsonChannel {
   public:
    json call(const json&) override {
      return {{"answer", "Lima"}, {"best_span_score", 2.0}, {"null_score", 1.5}};
    }
    std::string describe() const override { return "scores"; }
  };
  RemoteQuestionAnswerer strict(std::make_shared<Scores>(), 0.0);
  EXPECT_TRUE(strict.answer("q", "c").is_answerable);
  RemoteQuestionAnswerer lenient(std::make_shared<Scores>(), -1.0);
  EXPECT_FALSE(lenient.answer("q", "c").is_answerable);
}

TEST(HttpChannel, RoundTripsAgainstAdapterHttpServer) {
  const auto qg = template_stub_generator();
  const auto qa = lexical_stub_answerer();
  const auto provider = fixture_provider();
  AdapterHttpServer server(*qg, *qa, *provider);
  const int port = server.bind("127.0.0.1", 0);
  std::thread t([&] { server.listen(); });
  const auto url = "http://127.0.0.1:" + std::to_string(port) + "/adapter";
  auto channel = make_channel(url);
  json reply;
  for (int i = 0; i < 50; ++i) {
    try {
      reply = channel->call({{"op", "answer"},
                             {"question", "Q[Sierra Leone|health]?"},
                             {"context", "The health care worker was infected in Sierra Leone."}});
      break;
    } catch (const AdapterError&) {
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
  }
  EXPECT_TRUE(reply.at("answerable").get<bool>());
  const auto remote_qa = make_question_answerer(url);
  EXPECT_FALSE(remote_qa->answer("Q[Sierra Leone|one]?",
                                 "The health care worker was infected in Sierra Leone.")
                   .is_answerable);
  server.stop();
  t.join();
  EXPECT_THROW(channel->call({{"op", "answer"}}), AdapterError);
}

TEST(Channels, BadSpecs) {
  EXPECT_THROW(make_channel("carrier-pigeon"), Error);
  EXPECT_THROW(make_question_generator("process:"), AdapterError);
}

TEST(Cache, RemoteAnswersAreCachedOnDisk) {
  const auto dir = testing::temp_dir("adapter-cache");
  ::setenv("SPANSTEER_CACHE", dir.c_str(), 1);
  {
    const auto qa = make_question_answerer(kStub);
    const auto first = qa->answer("Q[Lima|visited]?", "Maria Lopez visited Lima.");
    const auto second = qa->answer("Q[Lima|visited]?", "Maria Lopez visited Lima.");
    EXPECT_TRUE(first.is_answerable);
    EXPECT_EQ(first.answer_text, second.answer_text);
  }
  ::unsetenv("SPANSTEER_CACHE");
  std::size_t files = 0;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    ++files;
    EXPECT_EQ(e.path().filename().string().rfind("qa-", 0), 0u);
  }
  EXPECT_EQ(files, 1u);
}

}  // namespace
}  // namespace spansteer
