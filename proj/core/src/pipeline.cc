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

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>

#include "spansteer/classifier.h"
#include "spansteer/error.h"
#include "spansteer/generation.h"
#include "spansteer/marking.h"
#include "spansteer/oracles.h"
#include "spansteer/parallel.h"
#include "spansteer/rouge.h"
#include "spansteer/text.h"

namespace spansteer {
namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

bool is_remote(const std::string& selector) {
  return selector.rfind("process:", 0) == 0 || selector.rfind("http://", 0) == 0;
}

std::shared_ptr<JsonChannel> open_channel(const std::string& component,
                                          const std::string& selector) {
  try {
    return make_channel(selector);
  } catch (const std::exception& e) {
    throw AdapterError(component, e.what());
  }
}

// Append-only key/value file under $SPANSTEER_CACHE.
class FileCache {
 public:
  FileCache(const fs::path& dir, const std::string& name) : path_(dir / (name + ".jsonl")) {
    fs::create_directories(dir);
    std::ifstream in(path_);
    std::string line;
    while (std::getline(in, line)) {
      try {
        auto j = json::parse(line);
        entries_[j.at("k").get<std::string>()] = j.at("v");
      } catch (const json::exception&) {
        // A torn final line from an interrupted run; ignore it.
      }
    }
  }

  std::optional<json> get(const std::string& key) const {
    std::lock_guard lock(mu_);
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    return std::optional<json>(std::in_place, it->second);
  }

  void put(const std::string& key, const json& value) {
    std::lock_guard lock(mu_);
    if (!entries_.emplace(key, value).second) return;
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    out << json{{"k", key}, {"v", value}}.dump() << '\n';
  }

 private:
  fs::path path_;
  mutable std::mutex mu_;
  std::map<std::string, json> entries_;
};

std::string cache_key(std::initializer_list<std::string_view> parts) {
  std::string s;
  for (auto p : parts) {
    s.append(p);
    s.push_back('\x1f');
  }
  return sha256_hex(s);
}

class CachedQuestionGenerator : public QuestionGenerator {
 public:
  CachedQuestionGenerator(std::unique_ptr<QuestionGenerator> inner, const fs::path& dir)
      : inner_(std::move(inner)),
        cache_(dir, "qg-" + sha256_hex(inner_->version()).substr(0, 16)) {}

  std::string generate(std::string_view sentence, std::string_view answer,
                       CharRange range) const override {
    const auto key = cache_key({sentence, answer, std::to_string(range.first),
                                std::to_string(range.second)});
    if (auto hit = cache_.get(key)) return hit->get<std::string>();
    auto q = inner_->generate(sentence, answer, range);
    cache_.put(key, q);
    return q;
  }
  std::string version() const override { return inner_->version(); }
  std::size_t max_concurrency() const override { return inner_->max_concurrency(); }

 private:
  std::unique_ptr<QuestionGenerator> inner_;
  mutable FileCache cache_;
};

class CachedQuestionAnswerer : public QuestionAnswerer {
 public:
  CachedQuestionAnswerer(std::unique_ptr<QuestionAnswerer> inner, const fs::path& dir)
      : inner_(std::move(inner)),
        cache_(dir, "qa-" + sha256_hex(inner_->version()).substr(0, 16)) {}

  QAPrediction answer(std::string_view question, std::string_view context) const override {
    const auto key = cache_key({question, context});
    if (auto hit = cache_.get(key)) {
      QAPrediction p;
      p.is_answerable = hit->at("answerable").get<bool>();
      p.answer_text = hit->at("answer").get<std::string>();
      p.confidence = hit->at("confidence").get<double>();
      if (hit->contains("answer_start")) p.answer_start = hit->at("answer_start").get<std::size_t>();
      return p;
    }
    auto p = inner_->answer(question, context);
    json v = {{"answerable", p.is_answerable}, {"answer", p.answer_text},
              {"confidence", p.confidence}};
    if (p.answer_start) v["answer_start"] = *p.answer_start;
    cache_.put(key, v);
    return p;
  }
  std::string version() const override { return inner_->version(); }
  std::size_t max_concurrency() const override { return inner_->max_concurrency(); }

 private:
  std::unique_ptr<QuestionAnswerer> inner_;
  mutable FileCache cache_;
};

std::optional<fs::path> cache_dir() {
  const char* dir = std::getenv("SPANSTEER_CACHE");
  if (!dir || !*dir) return std::nullopt;
  return fs::path(dir);
}

std::vector<AnnotatedExample> load_annotated(const fs::path& p, const char* produced_by) {
  if (!fs::exists(p)) {
    throw ValidationError("missing input " + p.string() + " (run '" + produced_by + "' first)");
  }
  return load_corpus(p.string(), CorpusSchema::kAnnotated);
}

std::vector<AnnotatedExample> load_annotated_if_present(const fs::path& p) {
  if (!fs::exists(p)) return {};
  return load_corpus(p.string(), CorpusSchema::kAnnotated);
}

void write_text(const fs::path& p, const std::string& s) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << s;
}

std::string manifest_hash(const fs::path& checkpoint_dir) {
  const auto m = checkpoint_dir / "manifest.json";
  return fs::exists(m) ? sha256_file(m.string()) : std::string("missing");
}

struct LoadedModels {
  LoadedClassifier classifier;
  LoadedGenerator generator;
};

LoadedModels load_models(const RunLayout& layout) {
  if (!fs::exists(layout.classifier() / "manifest.json")) {
    throw CheckpointError("classifier", layout.classifier().string());
  }
  if (!fs::exists(layout.generator() / "manifest.json")) {
    throw CheckpointError("generator", layout.generator().string());
  }
  return {load_classifier(layout.classifier().string()),
          load_generator(layout.generator().string())};
}

std::vector<SummaryOutput> generate_split(const RunConfig& config,
                                          std::span<const AnnotatedExample> corpus,
                                          const LoadedModels& models, std::size_t k) {
  if (k < 1) throw ConfigError("k must be >= 1");
  std::vector<SummaryOutput> out(corpus.size());
  const auto workers =
      effective_workers(config.workers, {models.generator.model->max_concurrency()});
  std::vector<std::size_t> dropped(corpus.size());
  parallel_for(corpus.size(), workers, [&](std::size_t i) {
    const auto& doc = corpus[i].document;
    const auto candidates = document_candidates(doc, config.span_type);
    const auto top = predict_top_k(doc, candidates, k, *models.classifier.encoder,
                                   models.classifier.head);
    std::vector<ScoredSpan> scored;
    for (const auto& s : top) scored.push_back({s.span, s.score});
    const auto kept = resolve_overlaps(scored);
    dropped[i] = scored.size() - kept.size();
    out[i] = summarize(doc, kept, *models.generator.model, config.decode);
  });
  std::size_t total = 0;
  for (auto d : dropped) total += d;
  if (total) spdlog::info("overlap resolution dropped {} predicted spans", total);
  return out;
}

const std::vector<std::string> kSplits = {"train", "validation", "test"};

const std::string& split_path(const RunConfig& config, const std::string& split) {
  if (split == "train") return config.data.train;
  if (split == "validation") return config.data.validation;
  if (split == "test") return config.data.test;
  throw ConfigError("unknown split '" + split + "'");
}

}  // namespace

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const CheckpointError& e) {
    spdlog::error("{}", e.what());
    return kExitMissingCheckpoint;
  } catch (const AdapterError& e) {
    spdlog::error("adapter failure in {}", e.what());
    return kExitAdapter;
  } catch (const ConfigError& e) {
    spdlog::error("invalid configuration: {}", e.what());
    return kExitInvalid;
  } catch (const ValidationError& e) {
    spdlog::error("invalid input: {}", e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitFailure;
  } catch (...) {
    spdlog::error("unknown failure");
    return kExitFailure;
  }
}

std::unique_ptr<SyntacticProvider> make_syntactic_provider(const std::string& selector) {
  if (selector == "fixture" || selector == "stub") return fixture_provider();
  if (is_remote(selector)) {
    return std::make_unique<RemoteSyntacticProvider>(open_channel("syntactic provider", selector));
  }
  throw AdapterError("syntactic provider", "unknown selector '" + selector + "'");
}

std::unique_ptr<QuestionGenerator> make_question_generator(const std::string& selector,
                                                           std::size_t max_concurrency) {
  if (selector == "stub") return template_stub_generator();
  if (!is_remote(selector)) {
    throw AdapterError("question generator", "unknown selector '" + selector + "'");
  }
  std::unique_ptr<QuestionGenerator> qg = std::make_unique<RemoteQuestionGenerator>(
      open_channel("question generator", selector), max_concurrency);
  if (auto dir = cache_dir()) qg = std::make_unique<CachedQuestionGenerator>(std::move(qg), *dir);
  return qg;
}

std::unique_ptr<QuestionAnswerer> make_question_answerer(const std::string& selector,
                                                         double no_answer_threshold,
                                                         std::size_t max_concurrency) {
  if (selector == "stub") return lexical_stub_answerer();
  if (!is_remote(selector)) {
    throw AdapterError("question answerer", "unknown selector '" + selector + "'");
  }
  std::unique_ptr<QuestionAnswerer> qa = std::make_unique<RemoteQuestionAnswerer>(
      open_channel("question answerer", selector), no_answer_threshold, max_concurrency);
  if (auto dir = cache_dir()) qa = std::make_unique<CachedQuestionAnswerer>(std::move(qa), *dir);
  return qa;
}

Adapters make_adapters(const AdapterSelection& s) {
  Adapters a;
  a.provider = make_syntactic_provider(s.syntactic);
  a.qg = make_question_generator(s.qg, s.max_concurrency);
  a.qa = make_question_answerer(s.qa, s.qa_no_answer_threshold, s.max_concurrency);
  return a;
}

std::unique_ptr<TrainableEncoder> make_encoder(const RunConfig& config) {
  if (config.adapters.encoder != "tiny") {
    throw AdapterError("encoder", "unknown selector '" + config.adapters.encoder + "'");
  }
  return std::make_unique<TinyEncoder>(config.encoder);
}

std::vector<TokenSpan> document_candidates(const Document& doc, SpanType type) {
  std::vector<TokenSpan> out;
  switch (type) {
    case SpanType::kSentence:
      out = doc.sentences;
      break;
    case SpanType::kEntity:
      out = doc.phrases_of(PhraseType::kEntity);
      break;
    case SpanType::kNounPhrase:
    case SpanType::kQuestionAnswer:
      out = doc.phrases_of(PhraseType::kNounPhrase);
      break;
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<AnnotatedExample> load_raw_corpus(const std::string& path,
                                              const SyntacticProvider& provider) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open corpus " + path);
  std::vector<AnnotatedExample> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ValidationError("line " + std::to_string(n) + ": malformed JSON: " + e.what());
    }
    if (!j.is_object() || j.contains("tokens")) {
      out.push_back(parse_record(line, CorpusSchema::kRaw, n));
      continue;
    }
    const auto prefix = "line " + std::to_string(n) + ": ";
    auto field = [&](const json& obj, const char* key, const std::string& name) {
      auto it = obj.find(key);
      if (it == obj.end()) throw ValidationError(prefix + "field '" + name + "': missing");
      if (!it->is_string()) throw ValidationError(prefix + "field '" + name + "': expected a string");
      return it->get<std::string>();
    };
    AnnotatedExample ex;
    const auto id = field(j, "id", "id");
    const auto text = field(j, "text", "text");
    auto sit = j.find("summary");
    if (sit == j.end()) throw ValidationError(prefix + "field 'summary': missing");
    const auto summary_text = sit->is_string() ? sit->get<std::string>()
                                               : field(*sit, "text", "summary.text");
    ex.document = annotate(text, provider, {.id = id});
    try {
      const auto a = provider.analyze(summary_text);
      ex.summary = GoldSummary{summary_text, a.tokens, a.sentences};
    } catch (const Error&) {
      throw;
    } catch (const std::exception& e) {
      throw AdapterError("syntactic provider " + provider.name(), e.what());
    }
    const auto violations = validate_example(ex);
    if (!violations.empty()) {
      throw ValidationError(prefix + "record '" + id + "' is invalid: " + violations.front());
    }
    out.push_back(std::move(ex));
  }
  return out;
}

fs::path RunLayout::annotated(const std::string& split) const {
  return root_ / "annotated" / (split + ".jsonl");
}
fs::path RunLayout::augmented_train() const { return root_ / "augmented" / "train.jsonl"; }
fs::path RunLayout::generations(const std::string& split) const {
  return root_ / "generations" / (split + ".jsonl");
}
fs::path RunLayout::report(const std::string& split) const {
  return root_ / "reports" / (split + ".json");
}
fs::path RunLayout::report_csv(const std::string& split) const {
  return root_ / "reports" / (split + ".csv");
}
fs::path RunLayout::manifest(const std::string& command) const {
  return root_ / "manifests" / (command + ".json");
}

std::string hash_path(const fs::path& p) {
  if (fs::is_regular_file(p)) return sha256_file(p.string());
  if (!fs::is_directory(p)) return "missing";
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(p)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string listing;
  for (const auto& f : files) {
    listing += fs::relative(f, p).generic_string() + '\0' + sha256_file(f.string()) + '\n';
  }
  return sha256_hex(listing);
}

ordered_json write_manifest(const RunConfig& config, const std::string& command,
                            const std::vector<fs::path>& inputs,
                            const std::vector<fs::path>& outputs, const ordered_json& stats) {
  ordered_json m;
  m["command"] = command;
  m["config"] = config.to_json();
  m["inputs"] = ordered_json::object();
  for (const auto& p : inputs) m["inputs"][p.generic_string()] = hash_path(p);
  m["outputs"] = ordered_json::object();
  for (const auto& p : outputs) m["outputs"][p.generic_string()] = hash_path(p);
  m["stats"] = stats.is_null() ? ordered_json::object() : stats;
  write_text(RunLayout(config.output_dir).manifest(command), m.dump(2) + "\n");
  return m;
}

AnnotateStats cmd_annotate(const RunConfig& config, const std::vector<std::string>& splits) {
  config.validate();
  const RunLayout layout(config.output_dir);
  const auto adapters = make_adapters(config.adapters);
  LabelingOptions options;
  options.span_type = config.span_type;
  options.sentence_k = config.span_type == SpanType::kSentence
                           ? config.effective_k()
                           : default_k(config.dataset, SpanType::kSentence);
  options.qg = adapters.qg.get();
  options.qa = adapters.qa.get();
  const auto workers = effective_workers(
      config.workers, {adapters.qg->max_concurrency(), adapters.qa->max_concurrency(),
                       std::size_t{adapters.provider->capabilities().exclusive ? 1u : 0u}});

  AnnotateStats stats;
  std::vector<fs::path> inputs, outputs;
  for (const auto& split : splits) {
    const auto& path = split_path(config, split);
    if (path.empty()) {
      spdlog::info("annotate: no {} corpus configured, skipping", split);
      continue;
    }
    auto raw = load_raw_corpus(path, *adapters.provider);
    std::vector<AnnotatedExample> labeled(raw.size());
    parallel_for(raw.size(), workers, [&](std::size_t i) {
      labeled[i] = label_example(std::move(raw[i]), options);
    });
    std::size_t spans = 0, salient = 0;
    for (const auto& ex : labeled) {
      spans += ex.oracle_spans.size();
      for (const auto& l : ex.oracle_spans) salient += l.salient ? 1 : 0;
    }
    spdlog::info("annotate {}: {} records, {} candidate spans, salient rate {:.4f}", split,
                 labeled.size(), spans, spans ? static_cast<double>(salient) / spans : 0.0);
    stats.records += labeled.size();
    stats.spans += spans;
    stats.salient += salient;
    const auto out = layout.annotated(split);
    fs::create_directories(out.parent_path());
    write_corpus(out.string(), labeled, CorpusSchema::kAnnotated);
    inputs.emplace_back(path);
    outputs.push_back(out);
  }
  if (outputs.empty()) throw ConfigError("annotate: no input corpora configured under data");
  write_manifest(config, "annotate", inputs, outputs,
                 {{"records", stats.records},
                  {"spans", stats.spans},
                  {"salient", stats.salient},
                  {"salient_rate", stats.salient_rate()},
                  {"adapters",
                   {{"syntactic", adapters.provider->name()},
                    {"qg", adapters.qg->version()},
                    {"qa", adapters.qa->version()}}}});
  return stats;
}

AugmentStats cmd_augment(const RunConfig& config) {
  config.validate();
  if (config.span_type == SpanType::kSentence) {
    throw ConfigError("augmentation is defined for qa, np and entity spans, not sentences");
  }
  const RunLayout layout(config.output_dir);
  const auto in = layout.annotated("train");
  const auto corpus = load_annotated(in, "annotate");
  AugmentStats stats;
  const auto augmented = augment_corpus(corpus, &stats);
  const auto out = layout.augmented_train();
  fs::create_directories(out.parent_path());
  write_corpus(out.string(), augmented, CorpusSchema::kAnnotated);
  write_manifest(config, "augment", {in}, {out},
                 {{"input", stats.input},
                  {"dropped", stats.dropped},
                  {"removed_sentences", stats.removed_sentences},
                  {"output", stats.output}});
  return stats;
}

void cmd_train_classifier(const RunConfig& config) {
  config.validate();
  const RunLayout layout(config.output_dir);
  const auto train_path = layout.annotated("train");
  const auto val_path = layout.annotated("validation");
  const auto train = load_annotated(train_path, "annotate");
  const auto validation = load_annotated(val_path, "annotate");
  const auto encoder = make_encoder(config);
  auto trained = train_classifier(train, validation, *encoder, config.classifier);
  ClassifierManifest manifest;
  manifest.span_type = config.span_type;
  manifest.k = config.effective_k();
  manifest.best_epoch = trained.best_epoch;
  manifest.history = trained.history;
  save_classifier(layout.classifier().string(), trained.head, *trained.encoder, manifest);
  write_manifest(config, "train-classifier", {train_path, val_path}, {layout.classifier()},
                 {{"best_epoch", trained.best_epoch}, {"dropped_spans", trained.dropped_spans}});
}

void cmd_train_generator(const RunConfig& config) {
  config.validate();
  const RunLayout layout(config.output_dir);
  const bool augmented = config.augment && config.span_type != SpanType::kSentence;
  const auto train_path = augmented ? layout.augmented_train() : layout.annotated("train");
  const auto val_path = layout.annotated("validation");
  const auto train = load_annotated(train_path, augmented ? "augment" : "annotate");
  const auto validation = load_annotated_if_present(val_path);
  auto initial = [&] {
    try {
      return make_seq2seq(config.adapters.seq2seq);
    } catch (const std::exception& e) {
      throw AdapterError("seq2seq", e.what());
    }
  }();
  initial->register_special_tokens({std::string(kSpanStart), std::string(kSpanEnd)});
  const auto train_pairs = build_generation_training_set(train);
  const auto val_pairs = build_generation_training_set(validation);
  const auto checkpoint =
      train_generator(train_pairs, val_pairs, *initial, config.generator, config.decode);
  save_generator(layout.generator().string(), checkpoint);
  std::vector<fs::path> inputs{train_path};
  if (fs::exists(val_path)) inputs.push_back(val_path);
  write_manifest(config, "train-generator", inputs, {layout.generator()},
                 {{"best_epoch", checkpoint.best_epoch}, {"train_pairs", train_pairs.size()}});
}

std::vector<SummaryOutput> cmd_summarize(const RunConfig& config, const std::string& split,
                                         std::optional<std::size_t> k) {
  config.validate();
  const RunLayout layout(config.output_dir);
  const auto models = load_models(layout);
  const auto in = layout.annotated(split);
  const auto corpus = load_annotated(in, "annotate");
  const auto outputs = generate_split(config, corpus, models, k.value_or(config.effective_k()));
  const auto out = layout.generations(split);
  fs::create_directories(out.parent_path());
  write_generations(out.string(), outputs);
  write_manifest(config, "summarize", {in, layout.classifier(), layout.generator()}, {out},
                 {{"split", split}, {"k", k.value_or(config.effective_k())},
                  {"documents", outputs.size()}});
  return outputs;
}

EvalReport cmd_evaluate(const RunConfig& config, const std::string& split) {
  config.validate();
  const RunLayout layout(config.output_dir);
  const auto gen_path = layout.generations(split);
  const auto ref_path = layout.annotated(split);
  if (!fs::exists(gen_path)) {
    throw ValidationError("missing input " + gen_path.string() + " (run 'summarize' first)");
  }
  const auto generated = load_generations(gen_path.string());
  const auto references = load_annotated(ref_path, "annotate");
  const auto adapters = make_adapters(config.adapters);
  EvalOptions options;
  options.span_type = config.span_type;
  options.k = config.effective_k();
  options.checkpoints = {{"classifier", manifest_hash(layout.classifier())},
                         {"generator", manifest_hash(layout.generator())}};
  options.qg = adapters.qg.get();
  options.qa = adapters.qa.get();
  options.provider = adapters.provider.get();
  options.workers = config.workers;
  auto report = evaluate_run(generated, references, options);
  write_text(layout.report(split), report.to_json().dump(2) + "\n");
  write_text(layout.report_csv(split), report.to_csv());
  ordered_json corpus = report.corpus;
  write_manifest(config, "evaluate", {gen_path, ref_path},
                 {layout.report(split), layout.report_csv(split)}, {{"corpus", corpus}});
  return report;
}

std::size_t select_best_k(const std::map<std::size_t, double>& scores) {
  if (scores.empty()) throw ConfigError("sweep-k: empty k range");
  std::size_t best = scores.begin()->first;
  double best_score = scores.begin()->second;
  for (const auto& [k, s] : scores) {
    if (s > best_score) {
      best = k;
      best_score = s;
    }
  }
  return best;
}

SweepResult cmd_sweep_k(const RunConfig& config, std::size_t k_min, std::size_t k_max,
                        const std::string& split) {
  config.validate();
  if (k_min < 1 || k_max < k_min) {
    throw ConfigError("sweep-k: empty k range [" + std::to_string(k_min) + ", " +
                      std::to_string(k_max) + "]");
  }
  const RunLayout layout(config.output_dir);
  const auto models = load_models(layout);
  const auto in = layout.annotated(split);
  const auto corpus = load_annotated(in, "annotate");
  SweepResult result;
  for (auto k = k_min; k <= k_max; ++k) {
    const auto outputs = generate_split(config, corpus, models, k);
    double total = 0.0;
    for (std::size_t i = 0; i < outputs.size(); ++i) {
      total += rouge_n(outputs[i].summary_tokens, corpus[i].summary.tokens, 1).f1;
    }
    result.rouge1[k] = outputs.empty() ? 0.0 : total / static_cast<double>(outputs.size());
    spdlog::info("sweep-k {}: k={} ROUGE-1 F1 {:.4f}", split, k, result.rouge1[k]);
  }
  result.best_k = select_best_k(result.rouge1);
  ordered_json j;
  j["span_type"] = std::string(to_string(config.span_type));
  j["split"] = split;
  j["rouge1"] = ordered_json::object();
  for (const auto& [k, s] : result.rouge1) j["rouge1"][std::to_string(k)] = s;
  j["best_k"] = result.best_k;
  write_text(layout.sweep(), j.dump(2) + "\n");
  write_manifest(config, "sweep-k", {in, layout.classifier(), layout.generator()},
                 {layout.sweep()}, {{"best_k", result.best_k}});
  return result;
}

EvalReport cmd_pipeline(const RunConfig& config, const std::string& split) {
  config.validate();
  const RunLayout layout(config.output_dir);
  if (!fs::exists(layout.classifier() / "manifest.json")) {
    throw CheckpointError("classifier", layout.classifier().string());
  }
  if (!fs::exists(layout.generator() / "manifest.json")) {
    throw CheckpointError("generator", layout.generator().string());
  }
  cmd_summarize(config, split);
  auto report = cmd_evaluate(config, split);
  write_manifest(config, "pipeline",
                 {layout.annotated(split), layout.classifier(), layout.generator()},
                 {layout.generations(split), layout.report(split), layout.report_csv(split)});
  return report;
}

void serve_adapter_stream(std::istream& in, std::ostream& out, const QuestionGenerator& qg,
                          const QuestionAnswerer& qa, const SyntacticProvider& provider) {
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json reply;
    try {
      reply = handle_adapter_request(json::parse(line), qg, qa, provider);
    } catch (const json::parse_error& e) {
      reply = {{"error", std::string("malformed request: ") + e.what()}};
    }
    out << reply.dump() << '\n' << std::flush;
  }
}

}  // namespace spansteer
