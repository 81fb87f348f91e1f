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

// spansteer: command-line entry point for the controllable-summarization pipeline.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "spansteer/augmentation.h"
#include "spansteer/classifier.h"
#include "spansteer/config.h"
#include "spansteer/error.h"
#include "spansteer/evaluation.h"
#include "spansteer/generation.h"
#include "spansteer/pipeline.h"
#include "spansteer/service.h"

namespace {

using namespace spansteer;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  std::optional<std::string> span_type;
  std::optional<long long> k;
  std::optional<std::string> output_dir;
  bool verbose = false;
  bool quiet = false;

  void add_to(CLI::App* app) {
    app->add_option("--config", config_path, "Run configuration JSON");
    app->add_option("--seed", seed, "Seed for every stochastic component (default 13)");
    app->add_option("--workers", workers, "Per-document parallelism");
    app->add_option("--span-type", span_type, "sentence | entity | np | qa");
    app->add_option("--k", k, "Number of spans passed to the generator");
    app->add_option("--output-dir", output_dir, "Directory for run artifacts");
    app->add_flag("-v,--verbose", verbose, "Debug logging");
    app->add_flag("-q,--quiet", quiet, "Warnings and errors only");
  }

  RunConfig resolve() const {
    RunConfig c = config_path.empty() ? RunConfig{} : RunConfig::load(config_path);
    if (seed) c.apply_seed(*seed);
    if (workers) c.workers = *workers;
    if (span_type) {
      try {
        c.span_type = parse_span_type(*span_type);
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
    }
    if (k) {
      if (*k < 1) throw ConfigError("k must be >= 1 (got " + std::to_string(*k) + ")");
      c.k = static_cast<std::size_t>(*k);
    }
    if (output_dir) c.output_dir = *output_dir;
    c.validate();
    return c;
  }
};

void print_json(const nlohmann::ordered_json& j) { std::cout << j.dump(2) << std::endl; }

}  // namespace

int main(int argc, char** argv) {
  spdlog::set_default_logger(spdlog::stderr_color_mt("spansteer"));
  spdlog::set_pattern("[%l] %v");

  CLI::App app{"spansteer: span-steered controllable summarization"};
  app.require_subcommand(1);
  CommonFlags flags;

  auto* annotate = app.add_subcommand("annotate", "Label oracle salient spans for raw corpora");
  std::vector<std::string> splits{"train", "validation", "test"};
  annotate->add_option("--split", splits, "Splits to annotate");

  auto* augment = app.add_subcommand("augment", "Build prefix examples from annotated train");
  auto* train_cls = app.add_subcommand("train-classifier", "Train the span classifier");
  auto* train_gen = app.add_subcommand("train-generator", "Train the marked-span generator");

  std::string split = "test";
  auto* summarize = app.add_subcommand("summarize", "Generate summaries for a split");
  summarize->add_option("--split", split, "Split to summarize");

  auto* evaluate = app.add_subcommand("evaluate", "Score generated summaries");
  evaluate->add_option("--split", split, "Split to evaluate");

  std::string sweep_split = "validation";
  std::optional<std::size_t> k_min, k_max;
  auto* sweep = app.add_subcommand("sweep-k", "Select k by validation ROUGE-1");
  sweep->add_option("--split", sweep_split, "Split to sweep on");
  sweep->add_option("--k-min", k_min, "Smallest k");
  sweep->add_option("--k-max", k_max, "Largest k");

  auto* pipeline = app.add_subcommand("pipeline", "Classify, mark, generate and evaluate");
  pipeline->add_option("--split", split, "Split to run");

  std::size_t occurrence = 1;
  auto* probe = app.add_subcommand("probe", "Mark only the kth occurrence of the top span");
  probe->add_option("--split", split, "Split to probe");
  probe->add_option("--occurrence", occurrence, "Occurrence index (1-based)")
      ->check(CLI::PositiveNumber);

  std::optional<int> port;
  std::optional<std::string> host;
  auto* serve = app.add_subcommand("serve", "Run the interactive control service");
  serve->add_option("--port", port, "Listen port");
  serve->add_option("--host", host, "Listen address");

  std::string report_a, report_b, metric = "rouge2";
  std::size_t iterations = 10000;
  auto* compare = app.add_subcommand("compare", "Paired permutation test between two reports");
  compare->add_option("report_a", report_a)->required();
  compare->add_option("report_b", report_b)->required();
  compare->add_option("--metric", metric, "Metric column");
  compare->add_option("--iterations", iterations, "Permutations");

  // Serves the stub adapters over the wire protocol; used by tests and demos.
  auto* stub = app.add_subcommand("adapter-stub", "");
  stub->group("");
  std::optional<int> stub_port;
  stub->add_option("--port", stub_port, "Serve over HTTP instead of stdin/stdout");

  for (auto* sub : app.get_subcommands({})) flags.add_to(sub);

  CLI11_PARSE(app, argc, argv);

  if (flags.verbose) spdlog::set_level(spdlog::level::debug);
  if (flags.quiet) spdlog::set_level(spdlog::level::warn);

  try {
    if (stub->parsed()) {
      auto provider = fixture_provider();
      auto qg = template_stub_generator();
      auto qa = lexical_stub_answerer();
      if (stub_port) {
        AdapterHttpServer server(*qg, *qa, *provider);
        const auto bound = server.bind("127.0.0.1", *stub_port);
        std::cout << "listening on 127.0.0.1:" << bound << std::endl;
        server.listen();
      } else {
        serve_adapter_stream(std::cin, std::cout, *qg, *qa, *provider);
      }
      return kExitOk;
    }
    if (compare->parsed()) {
      auto load = [](const std::string& p) {
        std::ifstream in(p);
        if (!in) throw ValidationError("cannot open report " + p);
        return EvalReport::from_json(nlohmann::ordered_json::parse(in));
      };
      const auto t = compare_reports(load(report_a), load(report_b), metric, iterations);
      print_json({{"metric", metric},
                  {"n", t.n},
                  {"mean_difference", t.mean_difference},
                  {"p_value", t.p_value}});
      return kExitOk;
    }

    const auto config = flags.resolve();
    if (annotate->parsed()) {
      const auto stats = cmd_annotate(config, splits);
      std::cout << "annotated " << stats.records << " records; salient-span rate "
                << stats.salient << "/" << stats.spans << " = " << stats.salient_rate()
                << std::endl;
    } else if (augment->parsed()) {
      const auto s = cmd_augment(config);
      std::cout << "augmented " << s.input << " examples into " << s.output << " (" << s.dropped
                << " dropped, " << s.removed_sentences << " summary sentences removed)"
                << std::endl;
    } else if (train_cls->parsed()) {
      cmd_train_classifier(config);
    } else if (train_gen->parsed()) {
      cmd_train_generator(config);
    } else if (summarize->parsed()) {
      const auto outputs = cmd_summarize(config, split);
      std::cout << "wrote " << outputs.size() << " summaries to "
                << RunLayout(config.output_dir).generations(split).string() << std::endl;
    } else if (evaluate->parsed()) {
      print_json(cmd_evaluate(config, split).to_json()["corpus"]);
    } else if (sweep->parsed()) {
      const auto lo = k_min.value_or(config.sweep.k_min);
      const auto hi = k_max.value_or(config.sweep.k_max ? config.sweep.k_max
                                                         : config.effective_k());
      const auto r = cmd_sweep_k(config, lo, hi, sweep_split);
      std::cout << "best k = " << r.best_k << std::endl;
    } else if (pipeline->parsed()) {
      print_json(cmd_pipeline(config, split).to_json()["corpus"]);
    } else if (probe->parsed()) {
      const RunLayout layout(config.output_dir);
      const auto classifier = load_classifier(layout.classifier().string());
      const auto generator = load_generator(layout.generator().string());
      const auto corpus =
          load_corpus(layout.annotated(split).string(), CorpusSchema::kAnnotated);
      const auto adapters = make_adapters(config.adapters);
      const auto s = run_kth_occurrence_probe(corpus, *classifier.encoder, classifier.head,
                                              *generator.model, *adapters.qg, *adapters.qa,
                                              occurrence, config.decode);
      print_json({{"occurrence", s.k},
                  {"feasible", s.feasible},
                  {"skipped", s.skipped},
                  {"question_recall", s.question_recall},
                  {"mean_summary_length", s.mean_summary_length}});
    } else if (serve->parsed()) {
      auto service_config = config.service;
      if (port) service_config.port = *port;
      if (host) service_config.host = *host;
      ControlService service(load_service_models(config), service_config);
      const auto bound = service.bind(service_config.host, service_config.port);
      std::cout << "listening on " << service_config.host << ":" << bound << std::endl;
      service.listen();
    }
  } catch (...) {
    return exit_code_for_current_exception();
  }
  return kExitOk;
}
