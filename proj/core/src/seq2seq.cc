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

#include "spansteer/seq2seq.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "spansteer/error.h"

namespace spansteer {
namespace {

constexpr std::string_view kBos = "<s>";
constexpr std::string_view kEos = "</s>";

std::string key2(std::string_view a, std::string_view b) {
  std::string k;
  k.reserve(a.size() + b.size() + 1);
  k.append(a);
  k.push_back('\x1f');
  k.append(b);
  return k;
}

bool sentence_final(std::string_view t) {
  return !t.empty() && t.find_first_not_of(".!?") == std::string_view::npos;
}

enum Feature : std::size_t {
  kInMarked = 0,
  kInUnmarkedOnly,
  kBigramMarked,
  kBigramUnmarked,
  kTrigram,
  kRepeat,
  kEosCovered,
  kEosUncovered,
  kEosEmpty,
  kEosAfterFinal,
  kEosBias,
  kMarkedSentenceStart,
  kUnmarkedSentenceStart,
  kLeadWhenUnmarked,
  kRepeatTrigram,
};

}  // namespace

nlohmann::ordered_json DecodeConfig::to_json() const {
  nlohmann::ordered_json j;
  j["beam"] = beam;
  j["max_length"] = max_length;
  j["length_penalty"] = length_penalty;
  return j;
}

DecodeConfig DecodeConfig::from_json(const nlohmann::json& j) {
  DecodeConfig c;
  c.beam = j.value("beam", c.beam);
  c.max_length = j.value("max_length", c.max_length);
  c.length_penalty = j.value("length_penalty", c.length_penalty);
  if (c.beam == 0) throw ConfigError("decode: beam must be >= 1");
  if (c.max_length == 0) throw ConfigError("decode: max_length must be >= 1");
  return c;
}

std::vector<TokenSpan> split_sentences(std::span<const std::string> tokens) {
  std::vector<TokenSpan> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (sentence_final(tokens[i]) || i + 1 == tokens.size()) {
      out.push_back({start, i});
      start = i + 1;
    }
  }
  return out;
}

// Lookup tables over one source sequence.
struct TinySeq2Seq::SourceIndex {
  std::vector<std::string> tokens;
  std::unordered_set<std::string> marked;
  std::unordered_set<std::string> unmarked;
  std::unordered_map<std::string, int> bigrams;  // bit 0: marked w, bit 1: unmarked w
  std::unordered_set<std::string> trigrams;
  std::unordered_set<std::string> marked_starts;
  std::unordered_set<std::string> unmarked_starts;
  std::unordered_set<std::string> lead;
  bool any_marked = false;

  SourceIndex(const MarkedSequence& seq, const std::set<std::string>& special) {
    std::vector<bool> in_mark;
    bool open = false;
    for (const auto& t : seq.tokens) {
      if (t == kSpanStart) {
        open = true;
      } else if (t == kSpanEnd) {
        open = false;
      } else if (!special.contains(t)) {
        tokens.push_back(t);
        in_mark.push_back(open);
      }
    }
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      (in_mark[i] ? marked : unmarked).insert(tokens[i]);
      any_marked = any_marked || in_mark[i];
      const auto& prev = i == 0 ? std::string(kBos) : tokens[i - 1];
      bigrams[key2(prev, tokens[i])] |= in_mark[i] ? 1 : 2;
      const auto& pprev = i < 2 ? std::string(kBos) : tokens[i - 2];
      trigrams.insert(key2(key2(pprev, prev), tokens[i]));
    }
    for (const auto& s : split_sentences(tokens)) {
      bool has_mark = false;
      for (std::size_t i = s.start; i <= s.end; ++i) has_mark = has_mark || in_mark[i];
      (has_mark ? marked_starts : unmarked_starts).insert(tokens[s.start]);
      if (s.start == 0) {
        for (std::size_t i = s.start; i <= s.end; ++i) lead.insert(tokens[i]);
      }
    }
  }
};

struct TinySeq2Seq::Step {
  std::vector<std::string> candidates;
  std::vector<std::array<double, kNumFeatures>> features;
  std::vector<std::optional<std::size_t>> unigram;
  std::vector<std::optional<std::size_t>> bigram;
  std::vector<double> log_probs;
};

TinySeq2Seq::TinySeq2Seq() : params_(kNumFeatures, 0.0) {
  adam_m_.assign(params_.size(), 0.0);
  adam_v_.assign(params_.size(), 0.0);
}

void TinySeq2Seq::register_special_tokens(const std::vector<std::string>& tokens) {
  special_.insert(tokens.begin(), tokens.end());
}

std::size_t TinySeq2Seq::param_for_unigram(const std::string& w, bool create) {
  if (auto it = unigram_.find(w); it != unigram_.end()) return it->second;
  if (!create) return std::numeric_limits<std::size_t>::max();
  vocab_.push_back(w);
  params_.push_back(0.0);
  adam_m_.push_back(0.0);
  adam_v_.push_back(0.0);
  return unigram_[w] = params_.size() - 1;
}

std::size_t TinySeq2Seq::param_for_bigram(const std::string& prev, const std::string& w,
                                          bool create) {
  const auto k = key2(prev, w);
  if (auto it = bigram_.find(k); it != bigram_.end()) return it->second;
  if (!create) return std::numeric_limits<std::size_t>::max();
  params_.push_back(0.0);
  adam_m_.push_back(0.0);
  adam_v_.push_back(0.0);
  return bigram_[k] = params_.size() - 1;
}

std::optional<std::size_t> TinySeq2Seq::find_unigram(const std::string& w) const {
  if (auto it = unigram_.find(w); it != unigram_.end()) return it->second;
  return std::nullopt;
}

std::optional<std::size_t> TinySeq2Seq::find_bigram(const std::string& prev,
                                                    const std::string& w) const {
  if (auto it = bigram_.find(key2(prev, w)); it != bigram_.end()) return it->second;
  return std::nullopt;
}

TinySeq2Seq::Step TinySeq2Seq::score_step(const SourceIndex& src,
                                          std::span<const std::string> history) const {
  Step step;
  std::unordered_set<std::string> seen;
  auto add = [&](const std::string& w) {
    if (special_.contains(w) || w == kBos || w == kEos) return;
    if (seen.insert(w).second) step.candidates.push_back(w);
  };
  for (const auto& w : vocab_) add(w);
  for (const auto& w : src.tokens) add(w);
  step.candidates.emplace_back(kEos);

  const std::string prev = history.empty() ? std::string(kBos) : history.back();
  const std::string pprev = history.size() < 2 ? std::string(kBos) : history[history.size() - 2];
  const std::unordered_set<std::string> generated(history.begin(), history.end());
  std::unordered_set<std::string> generated_trigrams;
  for (std::size_t i = 2; i < history.size(); ++i) {
    generated_trigrams.insert(key2(key2(history[i - 2], history[i - 1]), history[i]));
  }
  bool covered = true;
  for (const auto& m : src.marked) {
    if (!generated.contains(m)) {
      covered = false;
      break;
    }
  }
  const bool at_sentence_start = history.empty() || sentence_final(prev);
  const auto trigram_prefix = key2(pprev, prev);

  const auto n = step.candidates.size();
  step.features.resize(n);
  step.unigram.resize(n);
  step.bigram.resize(n);
  std::vector<double> scores(n, 0.0);
  for (std::size_t c = 0; c < n; ++c) {
    const auto& w = step.candidates[c];
    auto& f = step.features[c];
    f.fill(0.0);
    if (w == kEos) {
      f[kEosBias] = 1.0;
      f[covered ? kEosCovered : kEosUncovered] = 1.0;
      if (history.empty()) f[kEosEmpty] = 1.0;
      if (sentence_final(prev)) f[kEosAfterFinal] = 1.0;
    } else {
      if (src.marked.contains(w)) {
        f[kInMarked] = 1.0;
      } else if (src.unmarked.contains(w)) {
        f[kInUnmarkedOnly] = 1.0;
      }
      if (auto it = src.bigrams.find(key2(prev, w)); it != src.bigrams.end()) {
        if (it->second & 1) f[kBigramMarked] = 1.0;
        if (it->second & 2) f[kBigramUnmarked] = 1.0;
      }
      if (src.trigrams.contains(key2(trigram_prefix, w))) f[kTrigram] = 1.0;
      if (generated.contains(w)) f[kRepeat] = 1.0;
      if (history.size() >= 2 && generated_trigrams.contains(key2(trigram_prefix, w))) {
        f[kRepeatTrigram] = 1.0;
      }
      if (at_sentence_start && !generated.contains(w)) {
        if (src.marked_starts.contains(w)) f[kMarkedSentenceStart] = 1.0;
        if (src.unmarked_starts.contains(w)) f[kUnmarkedSentenceStart] = 1.0;
      }
      if (!src.any_marked && src.lead.contains(w)) f[kLeadWhenUnmarked] = 1.0;
    }
    double s = 0.0;
    for (std::size_t k = 0; k < kNumFeatures; ++k) s += params_[k] * f[k];
    step.unigram[c] = find_unigram(w);
    step.bigram[c] = find_bigram(prev, w);
    if (step.unigram[c]) s += params_[*step.unigram[c]];
    if (step.bigram[c]) s += params_[*step.bigram[c]];
    scores[c] = s;
  }
  const double mx = *std::max_element(scores.begin(), scores.end());
  double z = 0.0;
  for (double s : scores) z += std::exp(s - mx);
  const double log_z = mx + std::log(z);
  step.log_probs.resize(n);
  for (std::size_t c = 0; c < n; ++c) step.log_probs[c] = scores[c] - log_z;
  return step;
}

void TinySeq2Seq::lazy_adam(const std::unordered_map<std::size_t, double>& grad,
                            const Seq2SeqTrainConfig& config) {
  ++adam_t_;
  constexpr double b1 = 0.9;
  constexpr double b2 = 0.999;
  constexpr double eps = 1e-8;
  const double c1 = 1.0 - std::pow(b1, static_cast<double>(adam_t_));
  const double c2 = 1.0 - std::pow(b2, static_cast<double>(adam_t_));
  for (const auto& [i, g] : grad) {
    adam_m_[i] = b1 * adam_m_[i] + (1.0 - b1) * g;
    adam_v_[i] = b2 * adam_v_[i] + (1.0 - b2) * g * g;
    params_[i] *= 1.0 - config.learning_rate * config.weight_decay;
    params_[i] -= config.learning_rate * (adam_m_[i] / c1) / (std::sqrt(adam_v_[i] / c2) + eps);
  }
}

double TinySeq2Seq::train_epoch(std::span<const GenerationPair> pairs,
                                const Seq2SeqTrainConfig& config, std::mt19937_64& rng) {
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  double loss = 0.0;
  std::size_t count = 0;
  for (auto idx : order) {
    const auto& pair = pairs[idx];
    std::string prev(kBos);
    for (const auto& t : pair.target) {
      param_for_unigram(t, true);
      param_for_bigram(prev, t, true);
      prev = t;
    }
    param_for_bigram(prev, std::string(kEos), true);

    const SourceIndex src(pair.source, special_);
    std::unordered_map<std::size_t, double> grad;
    for (std::size_t pos = 0; pos <= pair.target.size(); ++pos) {
      const auto history = std::span<const std::string>(pair.target).first(pos);
      const std::string gold = pos < pair.target.size() ? pair.target[pos] : std::string(kEos);
      const auto step = score_step(src, history);
      for (std::size_t c = 0; c < step.candidates.size(); ++c) {
        const bool is_gold = step.candidates[c] == gold;
        const double p = std::exp(step.log_probs[c]);
        if (is_gold) loss -= step.log_probs[c];
        const double g = p - (is_gold ? 1.0 : 0.0);
        if (g == 0.0) continue;
        for (std::size_t k = 0; k < kNumFeatures; ++k) {
          if (step.features[c][k] != 0.0) grad[k] += g * step.features[c][k];
        }
        if (step.unigram[c]) grad[*step.unigram[c]] += g;
        if (step.bigram[c]) grad[*step.bigram[c]] += g;
      }
      ++count;
    }
    lazy_adam(grad, config);
  }
  return count ? loss / static_cast<double>(count) : 0.0;
}

double TinySeq2Seq::sequence_log_prob(const MarkedSequence& source,
                                      std::span<const std::string> target) const {
  const SourceIndex src(source, special_);
  double total = 0.0;
  for (std::size_t pos = 0; pos <= target.size(); ++pos) {
    const std::string gold = pos < target.size() ? target[pos] : std::string(kEos);
    const auto step = score_step(src, target.first(pos));
    const auto it = std::find(step.candidates.begin(), step.candidates.end(), gold);
    if (it == step.candidates.end()) return -std::numeric_limits<double>::infinity();
    total += step.log_probs[static_cast<std::size_t>(it - step.candidates.begin())];
  }
  return total;
}

std::vector<std::string> TinySeq2Seq::generate(const MarkedSequence& source,
                                               const DecodeConfig& config) const {
  const SourceIndex src(source, special_);
  struct Hyp {
    std::vector<std::string> tokens;
    double log_prob = 0.0;
  };
  auto normalized = [&](const Hyp& h, std::size_t length) {
    const double lp =
        std::pow((5.0 + static_cast<double>(length)) / 6.0, config.length_penalty);
    return h.log_prob / lp;
  };
  std::vector<Hyp> alive{Hyp{}};
  std::vector<std::pair<double, Hyp>> finished;
  const std::size_t beam = std::max<std::size_t>(1, config.beam);
  for (std::size_t t = 0; t < config.max_length && !alive.empty(); ++t) {
    std::vector<Hyp> expanded;
    for (const auto& h : alive) {
      const auto step = score_step(src, h.tokens);
      std::vector<std::size_t> idx(step.candidates.size());
      std::iota(idx.begin(), idx.end(), 0);
      const auto take = std::min(beam, idx.size());
      std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(take), idx.end(),
                        [&](std::size_t a, std::size_t b) {
                          if (step.log_probs[a] != step.log_probs[b]) {
                            return step.log_probs[a] > step.log_probs[b];
                          }
                          return a < b;
                        });
      for (std::size_t i = 0; i < take; ++i) {
        Hyp next = h;
        next.log_prob += step.log_probs[idx[i]];
        if (step.candidates[idx[i]] == kEos) {
          finished.emplace_back(normalized(next, next.tokens.size() + 1), std::move(next));
        } else {
          next.tokens.push_back(step.candidates[idx[i]]);
          expanded.push_back(std::move(next));
        }
      }
    }
    std::stable_sort(expanded.begin(), expanded.end(),
                     [](const Hyp& a, const Hyp& b) { return a.log_prob > b.log_prob; });
    if (expanded.size() > beam) expanded.resize(beam);
    alive = std::move(expanded);
    if (finished.size() >= beam) {
      // Stop once no live hypothesis can beat the best finished one.
      const double best = std::max_element(finished.begin(), finished.end(),
                                           [](const auto& a, const auto& b) {
                                             return a.first < b.first;
                                           })->first;
      const bool hopeless = std::all_of(alive.begin(), alive.end(), [&](const Hyp& h) {
        return normalized(h, config.max_length) <= best;
      });
      if (hopeless) break;
    }
  }
  // Hypotheses cut off at max_length end there: they pay for the end token.
  for (auto& h : alive) {
    const auto step = score_step(src, h.tokens);
    h.log_prob += step.log_probs.back();  // the end token is the last candidate
    const auto len = h.tokens.size() + 1;
    finished.emplace_back(normalized(h, len), std::move(h));
  }
  if (finished.empty()) return {};
  std::stable_sort(finished.begin(), finished.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  return finished.front().second.tokens;
}

nlohmann::json TinySeq2Seq::state() const {
  nlohmann::json features = std::vector<double>(params_.begin(), params_.begin() + kNumFeatures);
  nlohmann::json unigrams = nlohmann::json::array();
  for (const auto& w : vocab_) unigrams.push_back({w, params_[unigram_.at(w)]});
  std::vector<std::pair<std::string, std::size_t>> bigrams(bigram_.begin(), bigram_.end());
  std::sort(bigrams.begin(), bigrams.end(),
            [](const auto& a, const auto& b) { return a.second < b.second; });
  nlohmann::json bj = nlohmann::json::array();
  for (const auto& [k, i] : bigrams) {
    const auto sep = k.find('\x1f');
    bj.push_back({k.substr(0, sep), k.substr(sep + 1), params_[i]});
  }
  return {{"kind", "tiny"},
          {"special_tokens", std::vector<std::string>(special_.begin(), special_.end())},
          {"features", features},
          {"unigrams", unigrams},
          {"bigrams", bj}};
}

std::unique_ptr<Seq2SeqAdapter> TinySeq2Seq::clone() const {
  return std::make_unique<TinySeq2Seq>(*this);
}

TinySeq2Seq TinySeq2Seq::from_state(const nlohmann::json& j) {
  TinySeq2Seq m;
  try {
    m.register_special_tokens(j.at("special_tokens").get<std::vector<std::string>>());
    const auto f = j.at("features").get<std::vector<double>>();
    if (f.size() != kNumFeatures) throw ValidationError("tiny seq2seq: wrong feature count");
    std::copy(f.begin(), f.end(), m.params_.begin());
    for (const auto& u : j.at("unigrams")) {
      m.params_[m.param_for_unigram(u.at(0).get<std::string>(), true)] = u.at(1).get<double>();
    }
    for (const auto& b : j.at("bigrams")) {
      m.params_[m.param_for_bigram(b.at(0).get<std::string>(), b.at(1).get<std::string>(), true)] =
          b.at(2).get<double>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed tiny seq2seq state: ") + e.what());
  }
  return m;
}

void EchoGenerator::register_special_tokens(const std::vector<std::string>& tokens) {
  special_.insert(tokens.begin(), tokens.end());
}

std::vector<std::string> EchoGenerator::generate(const MarkedSequence& source,
                                                 const DecodeConfig& config) const {
  const auto plain = strip_markers(source.tokens);
  const auto regions = marked_regions(source.tokens);
  const auto sentences = split_sentences(plain);
  std::vector<bool> keep(sentences.size(), false);
  bool any = false;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    for (const auto& r : regions) {
      if (r.overlaps(sentences[s])) {
        keep[s] = true;
        any = true;
      }
    }
  }
  if (!any && !sentences.empty()) keep[0] = true;
  std::size_t extra = extra_;
  for (std::size_t s = 0; s < sentences.size() && extra > 0; ++s) {
    if (!keep[s]) {
      keep[s] = true;
      --extra;
    }
  }
  std::vector<std::string> out;
  for (std::size_t s = 0; s < sentences.size(); ++s) {
    if (!keep[s]) continue;
    for (std::size_t i = sentences[s].start; i <= sentences[s].end; ++i) out.push_back(plain[i]);
  }
  if (out.size() > config.max_length) out.resize(config.max_length);
  return out;
}

nlohmann::json EchoGenerator::state() const {
  return {{"kind", "echo"},
          {"extra_unmarked_sentences", extra_},
          {"special_tokens", std::vector<std::string>(special_.begin(), special_.end())}};
}

std::unique_ptr<Seq2SeqAdapter> EchoGenerator::clone() const {
  return std::make_unique<EchoGenerator>(*this);
}

std::unique_ptr<Seq2SeqAdapter> make_seq2seq(const std::string& kind) {
  if (kind == "tiny") return std::make_unique<TinySeq2Seq>();
  if (kind == "echo") return std::make_unique<EchoGenerator>();
  if (kind.rfind("echo:", 0) == 0) {
    return std::make_unique<EchoGenerator>(std::stoul(kind.substr(5)));
  }
  throw AdapterError("seq2seq", "unknown adapter '" + kind + "' (expected tiny or echo[:N])");
}

std::unique_ptr<Seq2SeqAdapter> seq2seq_from_state(const nlohmann::json& state) {
  const auto kind = state.value("kind", "");
  if (kind == "tiny") return std::make_unique<TinySeq2Seq>(TinySeq2Seq::from_state(state));
  if (kind == "echo") {
    auto e = std::make_unique<EchoGenerator>(state.value("extra_unmarked_sentences", 0UL));
    e->register_special_tokens(state.value("special_tokens", std::vector<std::string>{}));
    return e;
  }
  throw ValidationError("unknown seq2seq state kind '" + kind + "'");
}

}  // namespace spansteer
