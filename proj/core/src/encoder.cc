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

#include "spansteer/encoder.h"

#include <random>

#include "spansteer/error.h"
#include "spansteer/text.h"

namespace spansteer {

std::uint64_t stable_token_hash(const std::string& token) {
  // FNV-1a, 64 bit.
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : token) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

TinyEncoder::TinyEncoder(TinyEncoderConfig config) : config_(config) {
  if (config_.dim == 0 || config_.buckets == 0 || config_.positions == 0 ||
      config_.max_input_tokens == 0) {
    throw ConfigError("tiny encoder: dim, buckets, positions and max_input_tokens must be > 0");
  }
  const auto d = static_cast<Eigen::Index>(config_.dim);
  const auto rows = static_cast<Eigen::Index>(3 * config_.buckets + config_.positions);
  params_.resize(rows * d);
  std::mt19937_64 rng(config_.seed);
  std::normal_distribution<double> normal(0.0, config_.init_scale);
  for (Eigen::Index i = 0; i < params_.size(); ++i) params_[i] = normal(rng);
}

TinyEncoder::Rows TinyEncoder::rows_for(std::span<const std::string> tokens,
                                        std::size_t i) const {
  const auto d = static_cast<Eigen::Index>(config_.dim);
  const auto b = config_.buckets;
  auto bucket = [&](const std::string& t) {
    return static_cast<Eigen::Index>(stable_token_hash(to_lower(t)) % b);
  };
  static const std::string kBos = "<s>";
  static const std::string kEos = "</s>";
  const auto& left = i == 0 ? kBos : tokens[i - 1];
  const auto& right = i + 1 >= tokens.size() ? kEos : tokens[i + 1];
  const auto pos = static_cast<Eigen::Index>(std::min(i, config_.positions - 1));
  const auto bb = static_cast<Eigen::Index>(b);
  return {bucket(tokens[i]) * d, (bb + bucket(left)) * d, (2 * bb + bucket(right)) * d,
          (3 * bb + pos) * d};
}

Eigen::MatrixXd TinyEncoder::encode(std::span<const std::string> tokens) const {
  const auto n = std::min(tokens.size(), config_.max_input_tokens);
  const auto visible = tokens.first(n);
  const auto d = static_cast<Eigen::Index>(config_.dim);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(n), d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = rows_for(visible, i);
    out.row(static_cast<Eigen::Index>(i)) =
        (params_.segment(r.self, d) + params_.segment(r.left, d) + params_.segment(r.right, d) +
         params_.segment(r.position, d))
            .transpose();
  }
  return out;
}

void TinyEncoder::backward(std::span<const std::string> tokens, const Eigen::MatrixXd& grad_output,
                           Eigen::Ref<Eigen::VectorXd> grad) const {
  const auto n = static_cast<std::size_t>(grad_output.rows());
  const auto visible = tokens.first(std::min(tokens.size(), config_.max_input_tokens));
  const auto d = static_cast<Eigen::Index>(config_.dim);
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::VectorXd g = grad_output.row(static_cast<Eigen::Index>(i)).transpose();
    if (g.isZero(0.0)) continue;
    const auto r = rows_for(visible, i);
    grad.segment(r.self, d) += g;
    grad.segment(r.left, d) += g;
    grad.segment(r.right, d) += g;
    grad.segment(r.position, d) += g;
  }
}

std::string TinyEncoder::version() const {
  return "tiny-encoder/d" + std::to_string(config_.dim) + "-b" + std::to_string(config_.buckets);
}

nlohmann::json TinyEncoder::state() const {
  return {{"kind", "tiny"},
          {"dim", config_.dim},
          {"buckets", config_.buckets},
          {"positions", config_.positions},
          {"max_input_tokens", config_.max_input_tokens},
          {"seed", config_.seed},
          {"init_scale", config_.init_scale},
          {"params", std::vector<double>(params_.data(), params_.data() + params_.size())}};
}

std::unique_ptr<TrainableEncoder> TinyEncoder::clone() const {
  return std::make_unique<TinyEncoder>(*this);
}

TinyEncoder TinyEncoder::from_state(const nlohmann::json& state) {
  try {
    TinyEncoderConfig c;
    c.dim = state.at("dim").get<std::size_t>();
    c.buckets = state.at("buckets").get<std::size_t>();
    c.positions = state.at("positions").get<std::size_t>();
    c.max_input_tokens = state.at("max_input_tokens").get<std::size_t>();
    c.seed = state.at("seed").get<std::uint64_t>();
    c.init_scale = state.at("init_scale").get<double>();
    TinyEncoder enc(c);
    const auto params = state.at("params").get<std::vector<double>>();
    if (static_cast<Eigen::Index>(params.size()) != enc.params_.size()) {
      throw ValidationError("tiny encoder state has " + std::to_string(params.size()) +
                            " parameters, expected " + std::to_string(enc.params_.size()));
    }
    enc.params_ = Eigen::Map<const Eigen::VectorXd>(params.data(), enc.params_.size());
    return enc;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed tiny encoder state: ") + e.what());
  }
}

}  // namespace spansteer
