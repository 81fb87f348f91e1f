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

#ifndef SPANSTEER_PIPELINE_H_
#define SPANSTEER_PIPELINE_H_

// Command implementations. Commands talk to each other only through files
// under RunConfig::output_dir; each one writes a manifest with a config echo
// and the content hashes of everything it read and wrote.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "spansteer/annotation.h"
#include "spansteer/augmentation.h"
#include "spansteer/config.h"
#include "spansteer/corpus.h"
#include "spansteer/evaluation.h"
#include "spansteer/qa.h"

namespace spansteer {

// Process exit codes used by the CLI.
enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,
  kExitInvalid = 2,  // config or validation error
  kExitAdapter = 3,
  kExitMissingCheckpoint = 4,
};

// Maps the active exception to an exit code and logs it. Call from a catch block.
int exit_code_for_current_exception();

struct Adapters {
  std::unique_ptr<SyntacticProvider> provider;
  std::unique_ptr<QuestionGenerator> qg;
  std::unique_ptr<QuestionAnswerer> qa;
};

// Resolves adapter selectors; failures raise AdapterError naming the component.
// Remote question adapters are wrapped in a file cache when SPANSTEER_CACHE is set.
std::unique_ptr<SyntacticProvider> make_syntactic_provider(const std::string& selector);
std::unique_ptr<QuestionGenerator> make_question_generator(const std::string& selector,
                                                           std::size_t max_concurrency = 1);
std::unique_ptr<QuestionAnswerer> make_question_answerer(const std::string& selector,
                                                         double no_answer_threshold = 0.0,
                                                         std::size_t max_concurrency = 1);
Adapters make_adapters(const AdapterSelection& selection);
std::unique_ptr<TrainableEncoder> make_encoder(const RunConfig& config);

// Candidate spans of a document for a span type.
std::vector<TokenSpan> document_candidates(const Document& doc, SpanType type);

// Reads a raw corpus. Lines without "tokens" are tokenized and annotated
// (document and summary) with `provider`.
std::vector<AnnotatedExample> load_raw_corpus(const std::string& path,
                                              const SyntacticProvider& provider);

class RunLayout {
 public:
  explicit RunLayout(std::filesystem::path root) : root_(std::move(root)) {}

  std::filesystem::path annotated(const std::string& split) const;
  std::filesystem::path augmented_train() const;
  std::filesystem::path classifier() const { return root_ / "classifier"; }
  std::filesystem::path generator() const { return root_ / "generator"; }
  std::filesystem::path generations(const std::string& split) const;
  std::filesystem::path report(const std::string& split) const;
  std::filesystem::path report_csv(const std::string& split) const;
  std::filesystem::path sweep() const { return root_ / "sweep.json"; }
  std::filesystem::path manifest(const std::string& command) const;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
};

// Writes <output_dir>/manifests/<command>.json. Directories are hashed file
// by file in sorted order. No timestamps, so reruns reproduce it byte for byte.
nlohmann::ordered_json write_manifest(const RunConfig& config, const std::string& command,
                                      const std::vector<std::filesystem::path>& inputs,
                                      const std::vector<std::filesystem::path>& outputs,
                                      const nlohmann::ordered_json& stats = {});

std::string hash_path(const std::filesystem::path& p);

struct AnnotateStats {
  std::size_t records = 0;
  std::size_t spans = 0;
  std::size_t salient = 0;
  double salient_rate() const { return spans ? static_cast<double>(salient) / spans : 0.0; }
};

AnnotateStats cmd_annotate(const RunConfig& config, const std::vector<std::string>& splits);
AugmentStats cmd_augment(const RunConfig& config);
void cmd_train_classifier(const RunConfig& config);
void cmd_train_generator(const RunConfig& config);
// k overrides config.effective_k() when set.
std::vector<SummaryOutput> cmd_summarize(const RunConfig& config, const std::string& split,
                                         std::optional<std::size_t> k = std::nullopt);
EvalReport cmd_evaluate(const RunConfig& config, const std::string& split);

struct SweepResult {
  std::map<std::size_t, double> rouge1;  // k -> mean ROUGE-1 F1
  std::size_t best_k = 0;
};
// argmax ROUGE-1 over k (ties -> smaller k).
std::size_t select_best_k(const std::map<std::size_t, double>& scores);
SweepResult cmd_sweep_k(const RunConfig& config, std::size_t k_min, std::size_t k_max,
                        const std::string& split = "validation");

// Classifier top-k -> overlap resolution -> marking -> generation -> evaluation.
EvalReport cmd_pipeline(const RunConfig& config, const std::string& split = "test");

// Line-delimited JSON adapter server over streams (one request per line).
void serve_adapter_stream(std::istream& in, std::ostream& out, const QuestionGenerator& qg,
                          const QuestionAnswerer& qa, const SyntacticProvider& provider);

}  // namespace spansteer

#endif  // SPANSTEER_PIPELINE_H_
