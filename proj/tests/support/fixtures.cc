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

#include "fixtures.h"

#include <unistd.h>

#include <algorithm>
#include <array>
#include <filesystem>
#include <map>
#include <stdexcept>

#include "spansteer/annotation.h"
#include "spansteer/oracles.h"
#include "spansteer/qa.h"
#include "spansteer/text.h"

namespace spansteer::testing {
namespace {

constexpr std::array kPeople = {"Maria Lopez",   "John Carter", "Aisha Bello",  "Kenji Sato",
                                "Elena Petrova", "Omar Haddad", "Lucy Grant",   "Pedro Alves",
                                "Nadia Karim",   "Samuel Okafor", "Ingrid Berg", "Tomas Novak"};
constexpr std::array kCities = {"Lagos", "Lima",  "Oslo",  "Nairobi", "Manila",
                                "Quito", "Dakar", "Hanoi", "Riga",    "Accra"};
constexpr std::array kObjects = {"budget",   "bridge",  "vaccine", "treaty", "stadium",
                                 "pipeline", "railway", "reform",  "report", "merger"};
constexpr std::array kAdjectives = {"new", "costly", "ambitious", "final", "regional", "major",
                                    "joint"};
constexpr std::array kDays = {"Monday", "Tuesday", "Wednesday", "Thursday", "Friday"};
constexpr std::array kOrgs = {"Apex Energy", "Union Bank",   "Harbor Group",
                              "Nova Health", "Delta Mining", "Atlas Media"};
constexpr std::array kNumbers = {"12", "40", "75", "300"};

struct Template {
  const char* document;
  const char* summary;
};

// {P} person, {C} city, {O} object, {A} adjective, {D} day, {G} organization, {N} number.
constexpr std::array kTemplates = {
    Template{"{P} announced the {A} {O} in {C} on {D}.", "{P} announced the {A} {O}."},
    Template{"{P} visited {C} last week, the ministry said.", "{P} visited {C} last week."},
    Template{"{G} agreed to fund the {O} in {C} for {N} million dollars.",
             "{G} agreed to fund the {O}."},
    Template{"{P} told reporters that the {O} was {A} and costly.", "{P} said the {O} was {A}."},
    Template{"Residents of {C} protested against the {O} on {D}.",
             "Residents of {C} protested against the {O}."},
    Template{"A spokesman for {G} declined to comment on the {O}.",
             "{G} declined to comment on the {O}."},
};

std::string fill(std::string pattern, const std::map<std::string, std::string>& slots) {
  for (const auto& [key, value] : slots) {
    for (auto pos = pattern.find(key); pos != std::string::npos; pos = pattern.find(key)) {
      pattern.replace(pos, key.size(), value);
    }
  }
  return pattern;
}

template <typename Pool>
std::string pick(std::mt19937_64& rng, const Pool& pool) {
  return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng)];
}

}  // namespace

AnnotatedExample raw_example(const std::string& id, const std::string& text,
                             const std::string& summary) {
  const auto provider = fixture_provider();
  AnnotatedExample ex;
  ex.document = annotate(text, *provider, {.id = id});
  const auto a = provider->analyze(summary);
  ex.summary = GoldSummary{summary, a.tokens, a.sentences};
  return ex;
}

AnnotatedExample qa_labeled(AnnotatedExample ex) {
  const auto qg = template_stub_generator();
  const auto qa = lexical_stub_answerer();
  LabelingOptions options;
  options.span_type = SpanType::kQuestionAnswer;
  options.qg = qg.get();
  options.qa = qa.get();
  return label_example(std::move(ex), options);
}

std::vector<AnnotatedExample> synthetic_corpus(std::size_t n, std::uint64_t seed,
                                               const SyntheticOptions& options) {
  std::mt19937_64 rng(seed);
  std::vector<AnnotatedExample> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto sentences = std::uniform_int_distribution<std::size_t>(
        options.min_sentences, options.max_sentences)(rng);
    std::vector<std::string> doc, summary;
    for (std::size_t s = 0; s < sentences; ++s) {
      const auto& t = kTemplates[std::uniform_int_distribution<std::size_t>(
          0, kTemplates.size() - 1)(rng)];
      const std::map<std::string, std::string> slots = {
          {"{P}", pick(rng, kPeople)},    {"{C}", pick(rng, kCities)},
          {"{O}", pick(rng, kObjects)},   {"{A}", pick(rng, kAdjectives)},
          {"{D}", pick(rng, kDays)},      {"{G}", pick(rng, kOrgs)},
          {"{N}", pick(rng, kNumbers)}};
      doc.push_back(fill(t.document, slots));
      summary.push_back(fill(t.summary, slots));
    }
    const auto m = std::uniform_int_distribution<std::size_t>(
        options.min_summary, std::min(options.max_summary, sentences))(rng);
    std::vector<std::size_t> chosen(sentences);
    for (std::size_t s = 0; s < sentences; ++s) chosen[s] = s;
    if (!options.lead_summary) std::shuffle(chosen.begin(), chosen.end(), rng);
    chosen.resize(m);
    std::sort(chosen.begin(), chosen.end());
    std::vector<std::string> summary_sentences;
    for (auto s : chosen) summary_sentences.push_back(summary[s]);
    if (std::bernoulli_distribution(options.unsupported_rate)(rng)) {
      summary_sentences.insert(summary_sentences.begin() + static_cast<std::ptrdiff_t>(
                                                               rng() % (m + 1)),
                               "Analysts expect further delays.");
    }
    out.push_back(qa_labeled(raw_example("doc-" + std::to_string(i), join(doc, " "),
                                         join(summary_sentences, " "))));
  }
  return out;
}

AnnotatedExample sierra_leone_example() {
  return qa_labeled(raw_example(
      "sierra-leone",
      "A health care worker was infected with Ebola in Sierra Leone. "
      "Sierra Leone is one of the hardest hit countries.",
      "The health care worker was infected in Sierra Leone."));
}

AnnotatedExample three_sentence_summary_example() {
  return qa_labeled(raw_example(
      "three-sentences",
      "Maria Lopez announced the new budget in Lagos on Monday. "
      "Apex Energy agreed to fund the bridge in Oslo for 40 million dollars. "
      "Residents of Lima protested against the railway on Friday.",
      "Maria Lopez announced the new budget. Apex Energy agreed to fund the bridge. "
      "Analysts expect further delays."));
}

std::vector<std::string> random_tokens(std::mt19937_64& rng, std::size_t n,
                                       std::size_t vocabulary) {
  std::uniform_int_distribution<std::size_t> word(0, vocabulary - 1);
  std::vector<std::string> out(n);
  for (auto& t : out) t = "w" + std::to_string(word(rng));
  return out;
}

std::vector<TokenSpan> random_disjoint_spans(std::mt19937_64& rng, std::size_t n) {
  std::vector<TokenSpan> out;
  std::size_t i = 0;
  while (i < n) {
    i += rng() % 4;  // gap
    if (i >= n) break;
    const auto len = 1 + rng() % 4;
    const auto end = std::min(n - 1, i + len - 1);
    if (rng() % 2) out.push_back({i, end});
    i = end + 1;
  }
  return out;
}

Document document_from_sentences(const std::vector<std::vector<std::string>>& sentences) {
  Document d;
  d.id = "doc";
  for (const auto& s : sentences) {
    const auto start = d.tokens.size();
    d.tokens.insert(d.tokens.end(), s.begin(), s.end());
    d.sentences.push_back({start, d.tokens.size() - 1});
  }
  d.text = join(d.tokens, " ");
  return d;
}

GoldSummary summary_from_sentences(const std::vector<std::vector<std::string>>& sentences) {
  GoldSummary g;
  for (const auto& s : sentences) {
    const auto start = g.tokens.size();
    g.tokens.insert(g.tokens.end(), s.begin(), s.end());
    g.sentences.push_back({start, g.tokens.size() - 1});
  }
  g.text = join(g.tokens, " ");
  return g;
}

AnnotatedExample random_qa_example(std::mt19937_64& rng, const std::string& id) {
  auto between = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  std::vector<std::vector<std::string>> doc_sentences(between(1, 5));
  for (auto& s : doc_sentences) s = random_tokens(rng, between(3, 8), 50);
  std::vector<std::vector<std::string>> summary_sentences(between(1, 4));
  for (auto& s : summary_sentences) s = random_tokens(rng, between(2, 6), 50);

  AnnotatedExample ex;
  ex.document = document_from_sentences(doc_sentences);
  ex.document.id = id;
  ex.summary = summary_from_sentences(summary_sentences);
  ex.span_type = SpanType::kQuestionAnswer;
  for (const auto& s : ex.document.sentences) {
    for (auto span : random_disjoint_spans(rng, s.end - s.start + 1)) {
      span.start += s.start;
      span.end += s.start;
      ex.document.phrases.push_back({span, PhraseType::kNounPhrase});
    }
  }
  const auto m = ex.summary.sentences.size();
  for (const auto& p : ex.document.phrases) {
    SpanLabel l;
    l.span = p.span;
    l.salient = std::bernoulli_distribution(0.5)(rng);
    l.question = "question about " + ex.document.surface(p.span) + "?";
    l.predicted_answer = l.salient ? ex.document.surface(p.span) : "";
    if (l.salient || std::bernoulli_distribution(0.2)(rng)) l.summary_sentence = between(0, m - 1);
    ex.oracle_spans.push_back(std::move(l));
  }
  return ex;
}

std::string temp_dir(const std::string& name) {
  namespace fs = std::filesystem;
  const auto dir =
      fs::temp_directory_path() / ("spansteer-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir.string();
}

}  // namespace spansteer::testing
