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

#include "spansteer/classifier.h"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <random>
#include <set>

#include "spansteer/error.h"
#include "spansteer/optim.h"
#include "spansteer/text.h"

namespace spansteer {
namespace {

double bce(double logit, bool label) {
  return std::max(logit, 0.0) - (label ? logit : 0.0) + std::log1p(std::exp(-std::abs(logit)));
}

// Mean computed over distinct values weighted by count / n, so that
// replicating every element m times gives the identical double.
double multiplicity_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  double total = 0.0;
  for (std::size_t i = 0; i < values.size();) {
    std::size_t j = i;
    while (j < values.size() && values[j] == values[i]) ++j;
    total += values[i] * (static_cast<double>(j - i) / n);
    i = j;
  }
  return total;
}

void check_inputs(std::size_t n_logits, std::size_t n_labels) {
  if (n_logits == 0) throw ValidationError("balanced_bce_loss: empty input");
  if (n_logits != n_labels) {
    throw ValidationError("balanced_bce_loss: " + std::to_string(n_logits) + " scores but " +
                          std::to_string(n_labels) + " labels");
  }
}

std::vector<TokenSpan> oracle_of(const AnnotatedExample& ex) { return ex.salient_spans(); }

void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw CheckpointError("classifier", p.string());
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed " + p.string() + ": " + e.what());
  }
}

}  // namespace

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

ClassifierHead ClassifierHead::random(std::size_t encoder_dim, std::uint64_t seed, double scale) {
  ClassifierHead h;
  h.weight.resize(static_cast<Eigen::Index>(2 * encoder_dim));
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, scale);
  for (Eigen::Index i = 0; i < h.weight.size(); ++i) h.weight[i] = normal(rng);
  h.bias = 0.0;
  return h;
}

double ClassifierHead::score(const Eigen::VectorXd& representation) const {
  return weight.dot(representation) + bias;
}

nlohmann::json ClassifierHead::state() const {
  return {{"weight", std::vector<double>(weight.data(), weight.data() + weight.size())},
          {"bias", bias}};
}

ClassifierHead ClassifierHead::from_state(const nlohmann::json& j) {
  try {
    const auto w = j.at("weight").get<std::vector<double>>();
    ClassifierHead h;
    h.weight = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
    h.bias = j.at("bias").get<double>();
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed classifier head: ") + e.what());
  }
}

Eigen::VectorXd span_representation(const Eigen::MatrixXd& encodings, const TokenSpan& span) {
  if (span.start > span.end || static_cast<Eigen::Index>(span.end) >= encodings.rows()) {
    throw ValidationError("span_representation: span outside encoded range");
  }
  const auto d = encodings.cols();
  Eigen::VectorXd rep(2 * d);
  rep.head(d) = encodings.row(static_cast<Eigen::Index>(span.start)).transpose();
  rep.tail(d) = encodings.row(static_cast<Eigen::Index>(span.end)).transpose();
  return rep;
}

double balanced_bce_loss(std::span<const double> logits, const std::vector<bool>& labels) {
  check_inputs(logits.size(), labels.size());
  std::vector<double> pos;
  std::vector<double> neg;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    (labels[i] ? pos : neg).push_back(bce(logits[i], labels[i]));
  }
  if (pos.empty()) return multiplicity_mean(std::move(neg));
  if (neg.empty()) return multiplicity_mean(std::move(pos));
  return 0.5 * multiplicity_mean(std::move(pos)) + 0.5 * multiplicity_mean(std::move(neg));
}

double balanced_bce_loss(std::span<const SpanScore> scores, const std::vector<bool>& labels) {
  std::vector<double> logits;
  logits.reserve(scores.size());
  for (const auto& s : scores) logits.push_back(s.score);
  return balanced_bce_loss(logits, labels);
}

std::vector<double> balanced_bce_gradient(std::span<const double> logits,
                                          const std::vector<bool>& labels) {
  check_inputs(logits.size(), labels.size());
  const auto n_pos = static_cast<double>(std::count(labels.begin(), labels.end(), true));
  const auto n_neg = static_cast<double>(labels.size()) - n_pos;
  double w_pos = 0.5 / n_pos;
  double w_neg = 0.5 / n_neg;
  if (n_pos == 0.0 || n_neg == 0.0) w_pos = w_neg = 1.0 / static_cast<double>(labels.size());
  std::vector<double> g(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double y = labels[i] ? 1.0 : 0.0;
    g[i] = (labels[i] ? w_pos : w_neg) * (sigmoid(logits[i]) - y);
  }
  return g;
}

std::vector<TokenSpan> visible_candidates(std::span<const TokenSpan> candidates,
                                          std::size_t encoded_tokens) {
  std::vector<TokenSpan> out;
  for (const auto& c : candidates) {
    if (c.start <= c.end && c.end < encoded_tokens) out.push_back(c);
  }
  return out;
}

std::vector<SpanScore> predict_top_k(const Document& doc, std::span<const TokenSpan> candidates,
                                     std::size_t k, const TokenEncoder& encoder,
                                     const ClassifierHead& head) {
  if (candidates.empty() || k == 0) return {};
  const auto enc = encoder.encode(doc.tokens);
  const auto visible = visible_candidates(candidates, static_cast<std::size_t>(enc.rows()));
  if (visible.size() < candidates.size()) {
    spdlog::debug("document '{}': {} candidate spans beyond the encoder window dropped", doc.id,
                  candidates.size() - visible.size());
  }
  std::vector<SpanScore> scored;
  scored.reserve(visible.size());
  for (const auto& span : visible) {
    const double s = head.score(span_representation(enc, span));
    scored.push_back({span, s, sigmoid(s)});
  }
  std::sort(scored.begin(), scored.end(), [](const SpanScore& a, const SpanScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.span < b.span;
  });
  if (scored.size() > k) scored.resize(k);
  return scored;
}

PrecisionRecall precision_recall_at_k(std::span<const SpanScore> ranked,
                                      std::span<const TokenSpan> oracle, std::size_t k) {
  if (k == 0) throw ConfigError("precision_recall_at_k: k must be >= 1");
  const std::set<TokenSpan> gold(oracle.begin(), oracle.end());
  PrecisionRecall pr;
  for (std::size_t i = 0; i < std::min(k, ranked.size()); ++i) {
    if (gold.contains(ranked[i].span)) ++pr.hits;
  }
  pr.precision = static_cast<double>(pr.hits) / static_cast<double>(k);
  pr.recall = gold.empty() ? 1.0 : static_cast<double>(pr.hits) / static_cast<double>(gold.size());
  return pr;
}

std::vector<TokenSpan> candidate_spans(const AnnotatedExample& ex) {
  std::vector<TokenSpan> out;
  out.reserve(ex.oracle_spans.size());
  for (const auto& l : ex.oracle_spans) out.push_back(l.span);
  return out;
}

double mean_precision_at_1(std::span<const AnnotatedExample> examples, const TokenEncoder& encoder,
                           const ClassifierHead& head) {
  double total = 0.0;
  std::size_t counted = 0;
  for (const auto& ex : examples) {
    const auto cands = candidate_spans(ex);
    const auto top = predict_top_k(ex.document, cands, 1, encoder, head);
    if (top.empty()) continue;
    const auto oracle = oracle_of(ex);
    total += precision_recall_at_k(top, oracle, 1).precision;
    ++counted;
  }
  return counted ? total / static_cast<double>(counted) : 0.0;
}

TrainedClassifier train_classifier(std::span<const AnnotatedExample> train,
                                   std::span<const AnnotatedExample> validation,
                                   const TrainableEncoder& initial_encoder,
                                   const ClassifierTrainConfig& config) {
  if (train.empty()) throw ValidationError("train_classifier: training corpus is empty");
  if (validation.empty()) throw ValidationError("train_classifier: validation corpus is empty");
  for (const auto& ex : train) {
    if (ex.oracle_spans.empty()) {
      throw ValidationError("train_classifier: example '" + ex.document.id +
                            "' has no candidate spans");
    }
  }
  if (config.batch_size == 0) throw ConfigError("train_classifier: batch_size must be >= 1");

  TrainedClassifier result;
  auto encoder = initial_encoder.clone();
  auto head = ClassifierHead::random(encoder->dim(), config.seed);
  result.head = head;
  result.encoder = encoder->clone();
  if (config.epochs == 0) return result;

  const auto d = static_cast<Eigen::Index>(encoder->dim());
  AdamWConfig opt_config;
  opt_config.learning_rate = config.learning_rate;
  opt_config.weight_decay = config.weight_decay;
  AdamW head_opt(2 * d + 1, opt_config);
  AdamW enc_opt(config.freeze_encoder ? 0 : encoder->parameters().size(), opt_config);

  // Head parameters flattened as [weight; bias].
  Eigen::VectorXd head_params(2 * d + 1);
  head_params << head.weight, head.bias;

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(config.seed);

  double best_p1 = -1.0;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t loss_count = 0;
    for (std::size_t b = 0; b < order.size(); b += config.batch_size) {
      Eigen::VectorXd head_grad = Eigen::VectorXd::Zero(2 * d + 1);
      Eigen::VectorXd enc_grad;
      if (!config.freeze_encoder) enc_grad = Eigen::VectorXd::Zero(encoder->parameters().size());
      std::size_t docs_in_batch = 0;
      for (std::size_t o = b; o < std::min(order.size(), b + config.batch_size); ++o) {
        const auto& ex = train[order[o]];
        const auto enc = encoder->encode(ex.document.tokens);
        std::vector<TokenSpan> spans;
        std::vector<bool> labels;
        for (const auto& l : ex.oracle_spans) {
          if (l.span.end < static_cast<std::size_t>(enc.rows())) {
            spans.push_back(l.span);
            labels.push_back(l.salient);
          } else {
            ++result.dropped_spans;
          }
        }
        if (spans.empty()) continue;
        std::vector<double> logits;
        std::vector<Eigen::VectorXd> reps;
        for (const auto& s : spans) {
          reps.push_back(span_representation(enc, s));
          logits.push_back(head.score(reps.back()));
        }
        loss_sum += balanced_bce_loss(logits, labels);
        ++loss_count;
        ++docs_in_batch;
        const auto g = balanced_bce_gradient(logits, labels);
        Eigen::MatrixXd grad_enc = Eigen::MatrixXd::Zero(enc.rows(), enc.cols());
        for (std::size_t i = 0; i < spans.size(); ++i) {
          head_grad.head(2 * d) += g[i] * reps[i];
          head_grad[2 * d] += g[i];
          if (!config.freeze_encoder) {
            grad_enc.row(static_cast<Eigen::Index>(spans[i].start)) +=
                g[i] * head.weight.head(d).transpose();
            grad_enc.row(static_cast<Eigen::Index>(spans[i].end)) +=
                g[i] * head.weight.tail(d).transpose();
          }
        }
        if (!config.freeze_encoder) encoder->backward(ex.document.tokens, grad_enc, enc_grad);
      }
      if (docs_in_batch == 0) continue;
      const double scale = 1.0 / static_cast<double>(docs_in_batch);
      head_opt.step(head_params, head_grad * scale);
      head.weight = head_params.head(2 * d);
      head.bias = head_params[2 * d];
      if (!config.freeze_encoder) enc_opt.step(encoder->parameters(), enc_grad * scale);
    }
    ClassifierEpoch stats;
    stats.epoch = epoch;
    stats.train_loss = loss_count ? loss_sum / static_cast<double>(loss_count) : 0.0;
    stats.validation_precision_at_1 = mean_precision_at_1(validation, *encoder, head);
    spdlog::info("classifier epoch {}: train loss {:.6f}, validation precision@1 {:.4f}", epoch,
                 stats.train_loss, stats.validation_precision_at_1);
    result.history.push_back(stats);
    if (stats.validation_precision_at_1 > best_p1) {
      best_p1 = stats.validation_precision_at_1;
      result.best_epoch = epoch;
      result.head = head;
      result.encoder = encoder->clone();
    }
  }
  if (result.dropped_spans) {
    spdlog::info("classifier training dropped {} span visits beyond the encoder window",
                 result.dropped_spans);
  }
  return result;
}

void save_classifier(const std::string& dir, const ClassifierHead& head,
                     const TrainableEncoder& encoder, const ClassifierManifest& manifest) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  write_json(fs::path(dir) / "head.json", head.state());
  write_json(fs::path(dir) / "encoder.json", encoder.state());
  nlohmann::json history = nlohmann::json::array();
  for (const auto& h : manifest.history) {
    history.push_back({{"epoch", h.epoch},
                       {"train_loss", h.train_loss},
                       {"validation_precision_at_1", h.validation_precision_at_1}});
  }
  write_json(fs::path(dir) / "manifest.json",
             {{"component", "span_classifier"},
              {"span_type", to_string(manifest.span_type)},
              {"k", manifest.k},
              {"selection_metric", manifest.selection_metric},
              {"best_epoch", manifest.best_epoch},
              {"encoder", encoder.version()},
              {"history", history}});
}

LoadedClassifier load_classifier(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw CheckpointError("classifier", dir);
  LoadedClassifier out;
  out.head = ClassifierHead::from_state(read_json(fs::path(dir) / "head.json"));
  const auto enc = read_json(fs::path(dir) / "encoder.json");
  if (enc.value("kind", "") != "tiny") {
    throw ValidationError("unsupported encoder kind in " + dir);
  }
  out.encoder = std::make_unique<TinyEncoder>(TinyEncoder::from_state(enc));
  const auto m = read_json(fs::path(dir) / "manifest.json");
  try {
    out.manifest.span_type = parse_span_type(m.at("span_type").get<std::string>());
    out.manifest.k = m.at("k").get<std::size_t>();
    out.manifest.selection_metric = m.at("selection_metric").get<std::string>();
    out.manifest.best_epoch = m.at("best_epoch").get<std::size_t>();
    for (const auto& h : m.value("history", nlohmann::json::array())) {
      out.manifest.history.push_back({h.at("epoch").get<std::size_t>(),
                                      h.at("train_loss").get<double>(),
                                      h.at("validation_precision_at_1").get<double>()});
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("malformed classifier manifest in " + dir + ": " + e.what());
  }
  if (out.head.weight.size() != static_cast<Eigen::Index>(2 * out.encoder->dim())) {
    throw ValidationError("classifier head does not match encoder dimension in " + dir);
  }
  out.manifest_hash = sha256_file((fs::path(dir) / "manifest.json").string());
  return out;
}

}  // namespace spansteer
