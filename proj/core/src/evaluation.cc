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

#include "spansteer/evaluation.h"

#include <spdlog/fmt/fmt.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <sstream>

#include "spansteer/error.h"
#include "spansteer/marking.h"
#include "spansteer/oracles.h"
#include "spansteer/parallel.h"
#include "spansteer/rouge.h"
#include "spansteer/text.h"

namespace spansteer {
namespace {

std::map<std::string, std::size_t> token_counts(std::string_view s) {
  std::map<std::string, std::size_t> out;
  for (const auto& t : split_whitespace(s)) {
    auto n = normalize_token(t);
    if (!n.empty()) ++out[n];
  }
  return out;
}

std::string surface_key(const Document& doc, const TokenSpan& span) {
  std::vector<std::string> parts;
  for (auto i = span.start; i <= span.end; ++i) {
    auto n = normalize_token(doc.tokens[i]);
    if (!n.empty()) parts.push_back(std::move(n));
  }
  return join(parts, " ");
}

QuestionOutcome ask(const QuestionAnswerer& qa, std::string question, std::string expected,
                    std::string_view context) {
  QuestionOutcome o;
  o.question = std::move(question);
  o.expected = std::move(expected);
  const auto pred = qa.answer(o.question, context);
  o.answerable = pred.is_answerable;
  if (pred.is_answerable) {
    o.answer = pred.answer_text;
    o.answered = answer_is_correct(o.answer, o.expected);
    o.f1 = answer_token_f1(o.answer, o.expected);
  }
  return o;
}

}  // namespace

double answer_token_f1(std::string_view predicted, std::string_view expected) {
  const auto p = token_counts(predicted);
  const auto e = token_counts(expected);
  if (p.empty() && e.empty()) return 1.0;
  if (p.empty() || e.empty()) return 0.0;
  std::size_t np = 0, ne = 0, common = 0;
  for (const auto& [t, c] : p) {
    np += c;
    if (auto it = e.find(t); it != e.end()) common += std::min(c, it->second);
  }
  for (const auto& [t, c] : e) ne += c;
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(np);
  const double recall = static_cast<double>(common) / static_cast<double>(ne);
  return 2.0 * precision * recall / (precision + recall);
}

std::optional<double> qaeval_score(const GoldSummary& gold,
                                   std::span<const std::string> generated,
                                   const QuestionGenerator& qg, const QuestionAnswerer& qa,
                                   const SyntacticProvider& provider,
                                   std::vector<QuestionOutcome>* details) {
  const auto text = gold.text.empty() ? detokenize(gold.tokens) : gold.text;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return std::nullopt;
  const auto doc = annotate(text, provider, {.id = "gold-summary"});
  const auto nps = doc.phrases_of(PhraseType::kNounPhrase);
  if (nps.empty()) return std::nullopt;
  const auto context = detokenize(generated);
  double total = 0.0;
  for (const auto& span : nps) {
    auto o = ask(qa, generate_question(doc, span, qg).question, doc.surface(span), context);
    total += o.f1;
    if (details) details->push_back(std::move(o));
  }
  return total / static_cast<double>(nps.size());
}

double question_recall(const Document& doc, std::span<const SpanLabel> labels,
                       std::string_view generated, const QuestionAnswerer& qa,
                       std::vector<QuestionOutcome>* details) {
  if (labels.empty()) throw ValidationError("question_recall: no labels");
  std::size_t answered = 0;
  for (const auto& l : labels) {
    if (!l.question) {
      throw ValidationError("question_recall: span [" + std::to_string(l.span.start) + ", " +
                            std::to_string(l.span.end) + "] has no question");
    }
    auto o = ask(qa, *l.question, doc.surface(l.span), generated);
    if (o.answered) ++answered;
    if (details) details->push_back(std::move(o));
  }
  return static_cast<double>(answered) / static_cast<double>(labels.size());
}

std::vector<SpanLabel> questions_for_spans(const Document& doc, std::span<const TokenSpan> spans,
                                           const QuestionGenerator& qg) {
  std::vector<SpanLabel> out;
  out.reserve(spans.size());
  for (const auto& s : spans) {
    SpanLabel l;
    l.span = s;
    l.salient = true;
    l.question = generate_question(doc, s, qg).question;
    out.push_back(std::move(l));
  }
  return out;
}

double k_length_ratio(std::size_t k, std::size_t summary_tokens) {
  if (summary_tokens == 0) throw ValidationError("k_length_ratio: empty summary");
  return static_cast<double>(k) / static_cast<double>(summary_tokens);
}

std::optional<ProbeResult> kth_occurrence_probe(const Document& doc,
                                                std::span<const SpanScore> ranked,
                                                std::span<const TokenSpan> candidates,
                                                const Seq2SeqAdapter& generator,
                                                const QuestionGenerator& qg,
                                                const QuestionAnswerer& qa, std::size_t k,
                                                const DecodeConfig& decode) {
  if (k == 0) throw ConfigError("kth_occurrence_probe: k must be >= 1");
  if (ranked.empty()) return std::nullopt;
  const auto key = surface_key(doc, ranked.front().span);
  std::vector<TokenSpan> occurrences;
  for (const auto& c : candidates) {
    if (surface_key(doc, c) == key) occurrences.push_back(c);
  }
  std::sort(occurrences.begin(), occurrences.end());
  if (occurrences.size() < k) return std::nullopt;

  ProbeResult r;
  r.marked = occurrences[k - 1];
  const std::vector<TokenSpan> one{r.marked};
  const auto summary = generator.generate(mark_spans(doc.tokens, one), decode);
  r.summary_length = summary.size();
  r.question = generate_question(doc, r.marked, qg).question;
  r.answered = ask(qa, r.question, doc.surface(r.marked), detokenize(summary)).answered;
  return r;
}

ProbeSummary run_kth_occurrence_probe(std::span<const AnnotatedExample> corpus,
                                      const TokenEncoder& encoder, const ClassifierHead& head,
                                      const Seq2SeqAdapter& generator,
                                      const QuestionGenerator& qg, const QuestionAnswerer& qa,
                                      std::size_t k, const DecodeConfig& decode) {
  ProbeSummary s;
  s.k = k;
  std::size_t answered = 0;
  std::size_t length = 0;
  for (const auto& ex : corpus) {
    const auto candidates = candidate_spans(ex);
    const auto ranked = predict_top_k(ex.document, candidates, 1, encoder, head);
    const auto r = kth_occurrence_probe(ex.document, ranked, candidates, generator, qg, qa, k,
                                        decode);
    if (!r) {
      ++s.skipped;
      continue;
    }
    ++s.feasible;
    answered += r->answered ? 1 : 0;
    length += r->summary_length;
  }
  if (s.feasible) {
    s.question_recall = static_cast<double>(answered) / static_cast<double>(s.feasible);
    s.mean_summary_length = static_cast<double>(length) / static_cast<double>(s.feasible);
  }
  spdlog::info("kth-occurrence probe k={}: {} feasible, {} skipped, recall {:.4f}", k,
               s.feasible, s.skipped, s.question_recall);
  return s;
}

nlohmann::ordered_json EvalReport::to_json() const {
  nlohmann::ordered_json j;
  j["config"] = config;
  j["corpus"] = nlohmann::ordered_json::object();
  for (const auto& m : metrics) {
    if (auto it = corpus.find(m); it != corpus.end()) j["corpus"][m] = it->second;
  }
  j["defined"] = nlohmann::ordered_json::object();
  for (const auto& m : metrics) j["defined"][m] = defined.contains(m) ? defined.at(m) : 0;
  j["examples"] = nlohmann::ordered_json::array();
  for (const auto& e : examples) {
    nlohmann::ordered_json row;
    row["id"] = e.id;
    for (const auto& m : metrics) {
      if (auto it = e.values.find(m); it != e.values.end()) row[m] = it->second;
    }
    j["examples"].push_back(std::move(row));
  }
  return j;
}

std::string EvalReport::to_csv() const {
  std::ostringstream out;
  out << "id";
  for (const auto& m : metrics) out << ',' << m;
  out << '\n';
  for (const auto& e : examples) {
    out << '"';
    for (char c : e.id) out << (c == '"' ? std::string("\"\"") : std::string(1, c));
    out << '"';
    for (const auto& m : metrics) {
      out << ',';
      if (auto it = e.values.find(m); it != e.values.end()) out << fmt::format("{}", it->second);
    }
    out << '\n';
  }
  return out.str();
}

EvalReport EvalReport::from_json(const nlohmann::ordered_json& j) {
  EvalReport r;
  try {
    r.config = j.at("config");
    for (const auto& [m, v] : j.at("defined").items()) {
      r.metrics.push_back(m);
      if (const auto n = v.get<std::size_t>(); n > 0) r.defined[m] = n;
    }
    for (const auto& [m, v] : j.at("corpus").items()) r.corpus[m] = v.get<double>();
    for (const auto& row : j.at("examples")) {
      ExampleMetrics e;
      e.id = row.at("id").get<std::string>();
      for (const auto& [m, v] : row.items()) {
        if (m != "id") e.values[m] = v.get<double>();
      }
      r.examples.push_back(std::move(e));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed evaluation report: ") + e.what());
  }
  return r;
}

EvalReport evaluate_run(std::span<const SummaryOutput> generated,
                        std::span<const AnnotatedExample> references,
                        const EvalOptions& options) {
  std::map<std::string, const AnnotatedExample*> refs;
  for (const auto& r : references) {
    if (!refs.emplace(r.document.id, &r).second) {
      throw ValidationError("duplicate reference id '" + r.document.id + "'");
    }
  }
  std::map<std::string, const SummaryOutput*> gens;
  for (const auto& g : generated) {
    if (!gens.emplace(g.id, &g).second) {
      throw ValidationError("duplicate generated id '" + g.id + "'");
    }
  }
  std::vector<std::string> orphans;
  for (const auto& [id, _] : gens) {
    if (!refs.contains(id)) orphans.push_back("generated:" + id);
  }
  for (const auto& [id, _] : refs) {
    if (!gens.contains(id)) orphans.push_back("reference:" + id);
  }
  if (!orphans.empty()) {
    throw ValidationError("id mismatch between generations and references: " +
                          join(orphans, ", "));
  }

  const bool questions = options.qg && options.qa;
  const bool qaeval = questions && options.provider;
  const bool recall = questions && options.span_type != SpanType::kSentence;

  EvalReport report;
  for (auto m : kMetricNames) report.metrics.emplace_back(m);
  for (const auto& x : options.external) report.metrics.push_back(x->name());
  report.config["span_type"] = std::string(to_string(options.span_type));
  report.config["k"] = options.k;
  report.config["checkpoints"] = options.checkpoints;
  report.config["qaeval"] = qaeval;
  report.config["question_recall"] = recall;
  if (questions) {
    report.config["adapters"] = {{"qg", options.qg->version()}, {"qa", options.qa->version()}};
  }

  std::vector<const SummaryOutput*> order;
  for (const auto& [_, g] : gens) order.push_back(g);
  report.examples.resize(order.size());
  const auto workers = effective_workers(
      options.workers, {questions ? options.qg->max_concurrency() : 0,
                        questions ? options.qa->max_concurrency() : 0,
                        std::size_t{options.provider && options.provider->capabilities().exclusive ? 1u : 0u}});
  parallel_for(order.size(), workers, [&](std::size_t i) {
    const auto& g = *order[i];
    const auto& ref = *refs.at(g.id);
    auto& e = report.examples[i];
    e.id = g.id;
    e.values["rouge1"] = rouge_n(g.summary_tokens, ref.summary.tokens, 1).f1;
    e.values["rouge2"] = rouge_n(g.summary_tokens, ref.summary.tokens, 2).f1;
    e.values["rougeL"] = rouge_l(g.summary_tokens, ref.summary.tokens).f1;
    e.values["summary_length_tokens"] = static_cast<double>(g.summary_tokens.size());
    if (qaeval) {
      if (auto s = qaeval_score(ref.summary, g.summary_tokens, *options.qg, *options.qa,
                                *options.provider)) {
        e.values["qaeval_f1"] = *s;
      }
    }
    if (recall && !g.spans.empty()) {
      const auto labels = questions_for_spans(ref.document, g.spans, *options.qg);
      e.values["question_recall"] =
          question_recall(ref.document, labels, g.summary, *options.qa);
    }
    if (!g.spans.empty() && !g.summary_tokens.empty()) {
      e.values["k_length_ratio"] = k_length_ratio(g.spans.size(), g.summary_tokens.size());
    }
    for (const auto& x : options.external) {
      e.values[x->name()] = x->score(g.summary, ref.summary.text);
    }
  });

  for (const auto& m : report.metrics) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& e : report.examples) {
      if (auto it = e.values.find(m); it != e.values.end()) {
        sum += it->second;
        ++n;
      }
    }
    if (n) {
      report.corpus[m] = sum / static_cast<double>(n);
      report.defined[m] = n;
    }
  }
  return report;
}

PermutationTest paired_permutation_test(std::span<const double> a, std::span<const double> b,
                                        std::size_t iterations, std::uint64_t seed) {
  if (a.size() != b.size()) throw ValidationError("paired test needs equal-length samples");
  PermutationTest t;
  t.n = a.size();
  if (t.n == 0) return t;
  std::vector<double> d(t.n);
  for (std::size_t i = 0; i < t.n; ++i) d[i] = a[i] - b[i];
  double sum = 0.0;
  for (double x : d) sum += x;
  t.mean_difference = sum / static_cast<double>(t.n);
  const double observed = std::abs(sum);
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution flip(0.5);
  std::size_t extreme = 0;
  for (std::size_t it = 0; it < iterations; ++it) {
    double s = 0.0;
    for (double x : d) s += flip(rng) ? -x : x;
    if (std::abs(s) >= observed - 1e-12) ++extreme;
  }
  t.p_value = static_cast<double>(extreme + 1) / static_cast<double>(iterations + 1);
  return t;
}

PermutationTest compare_reports(const EvalReport& a, const EvalReport& b,
                                const std::string& metric, std::size_t iterations,
                                std::uint64_t seed) {
  std::map<std::string, double> bv;
  for (const auto& e : b.examples) {
    if (auto it = e.values.find(metric); it != e.values.end()) bv[e.id] = it->second;
  }
  std::vector<double> xs, ys;
  for (const auto& e : a.examples) {
    auto it = e.values.find(metric);
    auto jt = bv.find(e.id);
    if (it != e.values.end() && jt != bv.end()) {
      xs.push_back(it->second);
      ys.push_back(jt->second);
    }
  }
  return paired_permutation_test(xs, ys, iterations, seed);
}

}  // namespace spansteer
