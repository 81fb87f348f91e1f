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

#include "spansteer/pipeline.h"

#include <gtest/gtest.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.h"
#include "spansteer/annotation.h"
#include "spansteer/error.h"
#include "spansteer/qa.h"

namespace spansteer {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

void write_raw(const fs::path& p, const std::vector<AnnotatedExample>& corpus) {
  std::ofstream out(p);
  for (const auto& ex : corpus) {
    out << json{{"id", ex.document.id}, {"text", ex.document.text}, {"summary", ex.summary.text}}
               .dump()
        << '\n';
  }
}

// Raw train / validation / test splits plus a config writing under `name`.
RunConfig stub_run(const std::string& name, std::size_t docs = 8) {
  const auto dir = fs::path(testing::temp_dir(name));
  write_raw(dir / "train.jsonl", testing::synthetic_corpus(docs, 1));
  write_raw(dir / "validation.jsonl", testing::synthetic_corpus(docs / 2, 2));
  write_raw(dir / "test.jsonl", testing::synthetic_corpus(docs / 2, 3));
  RunConfig c;
  c.data = {(dir / "train.jsonl").string(), (dir / "validation.jsonl").string(),
            (dir / "test.jsonl").string()};
  c.output_dir = (dir / "run").string();
  c.k = 3;
  c.adapters.seq2seq = "echo";
  c.classifier.epochs = 2;
  c.classifier.learning_rate = 0.01;
  c.generator.epochs = 1;
  return c;
}

const std::vector<std::string> kSplits{"train", "validation", "test"};

TEST(Annotate, ByteDeterministicAcrossRuns) {
  auto c = stub_run("annotate-det");
  const auto first = cmd_annotate(c, kSplits);
  EXPECT_EQ(first.records, 16u);
  EXPECT_GT(first.salient, 0u);
  const RunLayout layout(c.output_dir);
  const auto a = slurp(layout.annotated("train"));
  const auto m = slurp(layout.manifest("annotate"));
  c.workers = 4;
  cmd_annotate(c, kSplits);
  EXPECT_EQ(slurp(layout.annotated("train")), a);
  const auto m2 = json::parse(slurp(layout.manifest("annotate")));
  EXPECT_EQ(m2["outputs"], json::parse(m)["outputs"]);
}

TEST(Annotate, SentenceBudget) {
  auto c = stub_run("annotate-sentence");
  c.span_type = SpanType::kSentence;
  c.k = 3;
  cmd_annotate(c, {"train"});
  for (const auto& ex : load_corpus(RunLayout(c.output_dir).annotated("train").string(),
                                    CorpusSchema::kAnnotated)) {
    EXPECT_LE(ex.salient_spans().size(), 3u);
    EXPECT_EQ(ex.span_type, SpanType::kSentence);
  }
}

TEST(Annotate, MissingSummaryIsValidationError) {
  auto c = stub_run("annotate-missing");
  std::ofstream(c.data.train) << R"({"id":"x","text":"Maria Lopez visited Lima."})" << '\n';
  EXPECT_THROW(cmd_annotate(c, {"train"}), ValidationError);
}

TEST(Annotate, UnknownAdapterNamesComponent) {
  auto c = stub_run("annotate-adapter");
  c.adapters.qa = "magic";
  try {
    cmd_annotate(c, {"train"});
    FAIL();
  } catch (const AdapterError& e) {
    EXPECT_NE(std::string(e.what()).find("question answerer"), std::string::npos);
  }
}

TEST(RawCorpus, AcceptsStructuredAndTextOnlyRecords) {
  const auto dir = fs::path(testing::temp_dir("raw"));
  const auto ex = testing::sierra_leone_example();
  {
    std::ofstream out(dir / "raw.jsonl");
    out << serialize_record(ex, CorpusSchema::kRaw) << '\n';
    out << json{{"id", "t"}, {"text", ex.document.text}, {"summary", {{"text", ex.summary.text}}}}
               .dump()
        << "\n\n";
  }
  const auto corpus = load_raw_corpus((dir / "raw.jsonl").string(), *fixture_provider());
  ASSERT_EQ(corpus.size(), 2u);
  EXPECT_EQ(corpus[0].document.tokens, corpus[1].document.tokens);
  EXPECT_EQ(corpus[0].document.phrases, corpus[1].document.phrases);
  EXPECT_EQ(corpus[1].summary.sentences, ex.summary.sentences);
}

TEST(Candidates, PerSpanType) {
  const auto d = testing::sierra_leone_example().document;
  EXPECT_EQ(document_candidates(d, SpanType::kSentence), d.sentences);
  EXPECT_EQ(document_candidates(d, SpanType::kEntity).size(), 3u);
  EXPECT_EQ(document_candidates(d, SpanType::kQuestionAnswer),
            d.phrases_of(PhraseType::kNounPhrase));
}

TEST(Sweep, SelectBestK) {
  EXPECT_EQ(select_best_k({{1, 0.3}}), 1u);
  EXPECT_EQ(select_best_k({{1, 0.5}, {2, 0.4}, {3, 0.1}}), 1u);
  EXPECT_EQ(select_best_k({{1, 0.2}, {2, 0.4}, {3, 0.4}}), 2u);
  EXPECT_THROW(select_best_k({}), ConfigError);
}

TEST(Pipeline, MissingCheckpointNamesStage) {
  const auto c = stub_run("pipeline-missing");
  try {
    cmd_pipeline(c);
    FAIL();
  } catch (const CheckpointError& e) {
    EXPECT_EQ(e.stage(), "classifier");
  }
}

TEST(Pipeline, StubEndToEndIsFastAndReproducible) {
  const auto start = std::chrono::steady_clock::now();
  auto c = stub_run("pipeline-e2e");
  auto run_all = [&] {
    cmd_annotate(c, kSplits);
    const auto aug = cmd_augment(c);
    EXPECT_GE(aug.output, aug.input - aug.dropped);
    cmd_train_classifier(c);
    cmd_train_generator(c);
    return cmd_pipeline(c);
  };
  const auto report = run_all();
  EXPECT_EQ(report.examples.size(), 4u);
  EXPECT_TRUE(report.corpus.contains("rouge1"));
  EXPECT_TRUE(report.corpus.contains("qaeval_f1"));
  EXPECT_TRUE(report.corpus.contains("question_recall"));
  const RunLayout layout(c.output_dir);
  EXPECT_TRUE(fs::exists(layout.report_csv("test")));
  std::map<std::string, std::string> manifests;
  for (const auto& e : fs::directory_iterator(layout.root() / "manifests")) {
    manifests[e.path().filename().string()] = slurp(e.path());
  }
  EXPECT_EQ(manifests.size(), 7u);
  const auto sweep = cmd_sweep_k(c, 1, 3);
  EXPECT_EQ(sweep.rouge1.size(), 3u);
  EXPECT_THROW(cmd_sweep_k(c, 3, 2), ConfigError);
  EXPECT_EQ(cmd_sweep_k(c, 1, 1).best_k, 1u);

  run_all();
  for (const auto& [name, content] : manifests) {
    EXPECT_EQ(slurp(layout.root() / "manifests" / name), content) << name;
  }
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(60));
}

TEST(Pipeline, GenerationJsonlCarriesDecodeConfig) {
  auto c = stub_run("pipeline-generations", 4);
  c.decode.beam = 2;
  cmd_annotate(c, kSplits);
  cmd_train_classifier(c);
  c.augment = false;
  cmd_train_generator(c);
  const auto outputs = cmd_summarize(c, "test", 2);
  for (const auto& o : outputs) {
    EXPECT_LE(o.spans.size(), 2u);
    EXPECT_EQ(o.decode.beam, 2u);
  }
  std::ifstream in(RunLayout(c.output_dir).generations("test"));
  std::string line;
  std::getline(in, line);
  EXPECT_NE(line.find(R"("decode_config":{"beam":2)"), std::string::npos) << line;
}

TEST(AdapterStream, LineProtocol) {
  const auto qg = template_stub_generator();
  const auto qa = lexical_stub_answerer();
  const auto provider = fixture_provider();
  std::istringstream in(
      R"({"op":"generate","sentence":"A health worker was infected in Sierra Leone.","answer":"Sierra Leone"})"
      "\n\nnot json\n");
  std::ostringstream out;
  serve_adapter_stream(in, out, *qg, *qa, *provider);
  std::istringstream replies(out.str());
  std::string first, second;
  std::getline(replies, first);
  std::getline(replies, second);
  EXPECT_EQ(json::parse(first).at("question"), "Q[Sierra Leone|health]?");
  EXPECT_TRUE(json::parse(second).contains("error"));
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(SPANSTEER_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  const auto c = stub_run("cli");
  const auto dir = fs::path(c.output_dir).parent_path();
  {
    std::ofstream(dir / "config.json") << c.to_json().dump();
    auto bad_adapter = c.to_json();
    bad_adapter["adapters"]["qg"] = "telepathy";
    std::ofstream(dir / "bad-adapter.json") << bad_adapter.dump();
    std::ofstream(dir / "typo.json") << R"({"span_typ":"np"})";
  }
  const auto cfg = " --config " + (dir / "config.json").string();
  EXPECT_EQ(run_cli("annotate" + cfg + " --k 0"), kExitInvalid);
  EXPECT_EQ(run_cli("annotate --config " + (dir / "typo.json").string()), kExitInvalid);
  EXPECT_EQ(run_cli("annotate --config " + (dir / "bad-adapter.json").string()), kExitAdapter);
  EXPECT_EQ(run_cli("pipeline" + cfg), kExitMissingCheckpoint);
  EXPECT_EQ(run_cli("annotate" + cfg + " -q"), kExitOk);
  EXPECT_TRUE(fs::exists(RunLayout(c.output_dir).annotated("test")));
  EXPECT_EQ(run_cli("augment" + cfg + " --span-type sentence"), kExitInvalid);
}

}  // namespace
}  // namespace spansteer
