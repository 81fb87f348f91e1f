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

#ifndef SPANSTEER_ENCODER_H_
#define SPANSTEER_ENCODER_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include <Eigen/Core>
#include <nlohmann/json.hpp>

namespace spansteer {

// Maps corpus tokens to one d-dimensional vector each. Inputs longer than
// max_input_tokens() are truncated; the result has
// min(|tokens|, max_input_tokens()) rows.
class TokenEncoder {
 public:
  virtual ~TokenEncoder() = default;
  virtual std::size_t dim() const = 0;
  virtual std::size_t max_input_tokens() const = 0;
  virtual Eigen::MatrixXd encode(std::span<const std::string> tokens) const = 0;
  virtual std::string version() const = 0;
};

// Encoder whose parameters can be fine-tuned together with a head.
class TrainableEncoder : public TokenEncoder {
 public:
  virtual Eigen::Ref<Eigen::VectorXd> parameters() = 0;
  // Adds d(loss)/d(params) into `grad` given d(loss)/d(encode(tokens)).
  virtual void backward(std::span<const std::string> tokens, const Eigen::MatrixXd& grad_output,
                        Eigen::Ref<Eigen::VectorXd> grad) const = 0;
  virtual nlohmann::json state() const = 0;
  virtual std::unique_ptr<TrainableEncoder> clone() const = 0;
};

struct TinyEncoderConfig {
  std::size_t dim = 16;
  std::size_t buckets = 2048;
  std::size_t positions = 64;
  std::size_t max_input_tokens = 1024;
  std::uint64_t seed = 13;
  double init_scale = 0.1;
};

// Small hashed bag-of-context encoder: the vector of token i is
//   E[h(x_i)] + L[h(x_{i-1})] + R[h(x_{i+1})] + P[min(i, positions-1)]
// with h a stable hash of the lowercased token into `buckets` rows.
class TinyEncoder : public TrainableEncoder {
 public:
  explicit TinyEncoder(TinyEncoderConfig config = {});

  std::size_t dim() const override { return config_.dim; }
  std::size_t max_input_tokens() const override { return config_.max_input_tokens; }
  Eigen::MatrixXd encode(std::span<const std::string> tokens) const override;
  std::string version() const override;

  Eigen::Ref<Eigen::VectorXd> parameters() override { return params_; }
  void backward(std::span<const std::string> tokens, const Eigen::MatrixXd& grad_output,
                Eigen::Ref<Eigen::VectorXd> grad) const override;
  nlohmann::json state() const override;
  std::unique_ptr<TrainableEncoder> clone() const override;

  static TinyEncoder from_state(const nlohmann::json& state);
  const TinyEncoderConfig& config() const { return config_; }

 private:
  // Offsets of the rows feeding token i, in params_.
  struct Rows {
    Eigen::Index self, left, right, position;
  };
  Rows rows_for(std::span<const std::string> tokens, std::size_t i) const;

  TinyEncoderConfig config_;
  Eigen::VectorXd params_;
};

std::uint64_t stable_token_hash(const std::string& token);

}  // namespace spansteer

#endif  // SPANSTEER_ENCODER_H_
