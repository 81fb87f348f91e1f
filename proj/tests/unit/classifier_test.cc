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

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "fixtures.h"
#include "reference.h"
#include "spansteer/encoder.h"
#include "spansteer/error.h"

namespace spansteer {
namespace {

TEST(Loss, OnePositiveThreeNegativesAtHalf) {
  EXPECT_NEAR(balanced_bce_loss(std::vector<double>{0, 0, 0, 0}, {true, false, false, false}),
              std::log(2.0), 1e-12);
}

TEST(Loss, PerfectPredictionLimit) {
  double prev = 1e9;
  for (double z : {2.0, 5.0, 10.0, 20.0}) {
    const double l = balanced_bce_loss(std::vector<double>{z, -z}, {true, false});
    EXPECT_LT(l, prev);
    prev = l;
  }
  EXPECT_LT(prev, 1e-8);
}

TEST(Loss, EqualClassCountsGivePlainMean) {
  const std::vector<double> z{0.3, -1.2, 2.0, 0.7};
  const std::vector<bool> y{true, false, true, false};
  double plain = 0;
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double p = sigmoid(z[i]);
    plain += y[i] ? -std::log(p) : -std::log(1 - p);
  }
  EXPECT_NEAR(balanced_bce_loss(z, y), plain / 4, 1e-12);
}

TEST(Loss, SingleClassIsPlainMean) {
  const std::vector<double> z{0.5, -0.5};
  EXPECT_NEAR(balanced_bce_loss(z, {false, false}),
              testing::reference::balanced_bce(z, {false, false}), 1e-12);
}

TEST(Loss, Errors) {
  EXPECT_THROW(balanced_bce_loss(std::vector<double>{}, {}), ValidationError);
  EXPECT_THROW(balanced_bce_loss(std::vector<double>{1.0}, {true, false}), ValidationError);
}

TEST(LossProperty, MatchesReferenceAndDuplicationInvariant) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0, 2);
  for (int t = 0; t < 100; ++t) {
    const std::size_t n = 2 + rng() % 10;
    std::vector<double> z(n);
    std::vector<bool> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = g(rng);
      y[i] = rng() % 2;
    }
    y[0] = true;
    y[1] = false;
    const double base = balanced_bce_loss(z, y);
    ASSERT_NEAR(base, testing::reference::balanced_bce(z, y), 1e-10);
    for (std::size_t m : {2u, 5u}) {
      auto zz = z;
      auto yy = y;
      for (std::size_t i = 0; i < n; ++i) {
        if (y[i]) continue;
        for (std::size_t r = 1; r < m; ++r) {
          zz.push_back(z[i]);
          yy.push_back(false);
        }
      }
      ASSERT_EQ(balanced_bce_loss(zz, yy), base);
    }
  }
}

TEST(LossProperty, GradientMatchesCentralDifferences) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0, 1.5);
  for (int t = 0; t < 30; ++t) {
    const std::size_t n = 2 + rng() % 6;
    std::vector<double> z(n);
    std::vector<bool> y(n);
    for (std::size_t i = 0; i < n; ++i) {
      z[i] = g(rng);
      y[i] = i == 0 || (i > 1 && rng() % 2);
    }
    const auto grad = balanced_bce_gradient(z, y);
    for (std::size_t i = 0; i < n; ++i) {
      const double h = 1e-5;
      auto zp = z, zm = z;
      zp[i] += h;
      zm[i] -= h;
      const double fd = (balanced_bce_loss(zp, y) - balanced_bce_loss(zm, y)) / (2 * h);
      ASSERT_NEAR(grad[i], fd, 1e-4 * std::max(1e-3, std::abs(fd)));
    }
  }
}

TEST(SpanRepresentation, ConcatenatesEndpoints) {
  Eigen::MatrixXd enc(6, 4);
  for (int i = 0; i < 6; ++i) enc.row(i).setConstant(i);
  const auto r = span_representation(enc, {2, 5});
  ASSERT_EQ(r.size(), 8);
  EXPECT_EQ(r.head(4), enc.row(2).transpose());
  EXPECT_EQ(r.tail(4), enc.row(5).transpose());
  const auto single = span_representation(enc, {3, 3});
  EXPECT_EQ(single.head(4), single.tail(4));
  EXPECT_THROW(span_representation(enc, {4, 6}), ValidationError);
}

TEST(PrecisionRecall, HandCounts) {
  const std::vector<TokenSpan> oracle{{0, 0}, {5, 6}};
  std::vector<SpanScore> ranked{{{5, 6}, 4, 0}, {{0, 0}, 3, 0}, {{1, 2}, 2, 0}, {{8, 9}, 1, 0}};
  auto pr = precision_recall_at_k(ranked, oracle, 2);
  EXPECT_EQ(pr.precision, 1.0);
  EXPECT_EQ(pr.recall, 1.0);
  ranked[1].span = {3, 3};
  pr = precision_recall_at_k(ranked, oracle, 4);
  EXPECT_EQ(pr.precision, 0.25);
  EXPECT_EQ(pr.recall, 0.5);
  EXPECT_EQ(pr.hits, 1u);
  EXPECT_EQ(precision_recall_at_k(ranked, {}, 3).recall, 1.0);
  EXPECT_THROW(precision_recall_at_k(ranked, oracle, 0), ConfigError);
}

TEST(PredictTopK, EqualsExhaustiveSortAndIsPrefixConsistent) {
  const auto ex = testing::sierra_leone_example();
  TinyEncoder encoder;
  const auto head = ClassifierHead::random(encoder.dim(), 4, 1.0);
  const auto candidates = candidate_spans(ex);
  const auto enc = encoder.encode(ex.document.tokens);
  std::vector<SpanScore> brute;
  for (const auto& c : candidates) {
    const double s = head.score(span_representation(enc, c));
    brute.push_back({c, s, sigmoid(s)});
  }
  std::sort(brute.begin(), brute.end(), [](const SpanScore& a, const SpanScore& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.span < b.span;
  });
  const auto all = predict_top_k(ex.document, candidates, 100, encoder, head);
  ASSERT_EQ(all.size(), brute.size());
  for (std::size_t i = 0; i < all.size(); ++i) {
    EXPECT_EQ(all[i].span, brute[i].span);
    EXPECT_DOUBLE_EQ(all[i].score, brute[i].score);
    EXPECT_DOUBLE_EQ(all[i].probability, sigmoid(brute[i].score));
  }
  for (std::size_t j = 1; j <= all.size(); ++j) {
    const auto top = predict_top_k(ex.document, candidates, j, encoder, head);
    ASSERT_EQ(top.size(), j);
    for (std::size_t i = 0; i < j; ++i) EXPECT_EQ(top[i].span, all[i].span);
  }
  EXPECT_TRUE(predict_top_k(ex.document, {}, 3, encoder, head).empty());
}

TEST(PredictTopK, TruncatedCandidatesAreDropped) {
  const std::vector<TokenSpan> c{{0, 1}, {3, 5}, {6, 6}};
  EXPECT_EQ(visible_candidates(c, 6), (std::vector<TokenSpan>{{0, 1}, {3, 5}}));
}

TEST(Training, EpochsZeroReturnsInitialHead) {
  const auto corpus = testing::synthetic_corpus(4, 1);
  TinyEncoder encoder;
  ClassifierTrainConfig cfg;
  cfg.epochs = 0;
  const auto a = train_classifier(corpus, corpus, encoder, cfg);
  const auto b = train_classifier(corpus, corpus, encoder, cfg);
  EXPECT_EQ(a.best_epoch, 0u);
  EXPECT_EQ(a.head.weight, b.head.weight);
  EXPECT_EQ(a.head.state(), ClassifierHead::random(encoder.dim(), cfg.seed).state());
}

TEST(Training, EmptyCorporaAreErrors) {
  const auto corpus = testing::synthetic_corpus(2, 1);
  TinyEncoder encoder;
  EXPECT_THROW(train_classifier({}, corpus, encoder, {}), ValidationError);
  EXPECT_THROW(train_classifier(corpus, {}, encoder, {}), ValidationError);
}

TEST(Training, FrozenEncoderLossDecreases) {
  const auto corpus = testing::synthetic_corpus(16, 3);
  TinyEncoder encoder;
  ClassifierTrainConfig cfg;
  cfg.epochs = 2;
  cfg.freeze_encoder = true;
  cfg.learning_rate = 0.05;
  cfg.weight_decay = 0.0;
  const auto trained = train_classifier(corpus, corpus, encoder, cfg);
  ASSERT_EQ(trained.history.size(), 2u);
  const double initial = [&] {
    const auto head = ClassifierHead::random(encoder.dim(), cfg.seed);
    double total = 0;
    for (const auto& ex : corpus) {
      const auto enc = encoder.encode(ex.document.tokens);
      std::vector<double> z;
      std::vector<bool> y;
      for (const auto& l : ex.oracle_spans) {
        z.push_back(head.score(span_representation(enc, l.span)));
        y.push_back(l.salient);
      }
      total += balanced_bce_loss(z, y);
    }
    return total / static_cast<double>(corpus.size());
  }();
  EXPECT_LT(trained.history[0].train_loss, initial);
  EXPECT_LT(trained.history[1].train_loss, trained.history[0].train_loss);
  // Encoder untouched when frozen.
  EXPECT_EQ(trained.encoder->state(), encoder.state());
}

TEST(Checkpoint, SaveLoadRoundTrip) {
  const auto dir = testing::temp_dir("classifier-ckpt") + "/c";
  TinyEncoder encoder;
  const auto head = ClassifierHead::random(encoder.dim(), 8, 0.5);
  ClassifierManifest m;
  m.k = 7;
  m.best_epoch = 2;
  m.history = {{1, 0.5, 0.25}, {2, 0.4, 0.5}};
  save_classifier(dir, head, encoder, m);
  const auto loaded = load_classifier(dir);
  EXPECT_EQ(loaded.head.weight, head.weight);
  EXPECT_EQ(loaded.head.bias, head.bias);
  EXPECT_EQ(loaded.encoder->state(), encoder.state());
  EXPECT_EQ(loaded.manifest.k, 7u);
  EXPECT_EQ(loaded.manifest.best_epoch, 2u);
  EXPECT_EQ(loaded.manifest.history.size(), 2u);
  EXPECT_FALSE(loaded.manifest_hash.empty());
}

TEST(Checkpoint, MissingDirectoryIsCheckpointError) {
  try {
    load_classifier("/nonexistent/classifier");
    FAIL();
  } catch (const CheckpointError& e) {
    EXPECT_EQ(e.stage(), "classifier");
  }
}

TEST(Encoder, BackwardMatchesFiniteDifferences) {
  TinyEncoder encoder({.dim = 3, .buckets = 16, .positions = 4, .seed = 2});
  const std::vector<std::string> tokens{"a", "b", "a", "c", "d"};
  Eigen::MatrixXd weights = Eigen::MatrixXd::Random(5, 3);
  auto objective = [&](const TinyEncoder& e) { return (e.encode(tokens).array() * weights.array()).sum(); };
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(encoder.parameters().size());
  encoder.backward(tokens, weights, grad);
  for (Eigen::Index i = 0; i < grad.size(); i += 7) {
    auto plus = encoder;
    auto minus = encoder;
    plus.parameters()[i] += 1e-6;
    minus.parameters()[i] -= 1e-6;
    EXPECT_NEAR(grad[i], (objective(plus) - objective(minus)) / 2e-6, 1e-6);
  }
}

TEST(Encoder, TruncatesAndRoundTrips) {
  TinyEncoder encoder({.dim = 4, .max_input_tokens = 3});
  const std::vector<std::string> tokens{"a", "b", "c", "d", "e"};
  EXPECT_EQ(encoder.encode(tokens).rows(), 3);
  const auto copy = TinyEncoder::from_state(encoder.state());
  EXPECT_EQ(copy.encode(tokens), encoder.encode(tokens));
}

}  // namespace
}  // namespace spansteer
