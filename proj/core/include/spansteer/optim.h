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

#ifndef SPANSTEER_OPTIM_H_
#define SPANSTEER_OPTIM_H_

#include <cmath>
#include <cstdint>

#include <Eigen/Core>

namespace spansteer {

struct AdamWConfig {
  double learning_rate = 3e-5;
  double weight_decay = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// Adam with decoupled weight decay over one flat parameter vector.
class AdamW {
 public:
  AdamW(Eigen::Index size, AdamWConfig config)
      : config_(config), m_(Eigen::VectorXd::Zero(size)), v_(Eigen::VectorXd::Zero(size)) {}

  void step(Eigen::Ref<Eigen::VectorXd> params, const Eigen::Ref<const Eigen::VectorXd>& grad) {
    ++t_;
    const double b1 = config_.beta1;
    const double b2 = config_.beta2;
    m_ = b1 * m_ + (1.0 - b1) * grad;
    v_ = b2 * v_ + (1.0 - b2) * grad.cwiseProduct(grad);
    const double c1 = 1.0 - std::pow(b1, static_cast<double>(t_));
    const double c2 = 1.0 - std::pow(b2, static_cast<double>(t_));
    params *= 1.0 - config_.learning_rate * config_.weight_decay;
    params.array() -= config_.learning_rate * (m_.array() / c1) /
                      ((v_.array() / c2).sqrt() + config_.epsilon);
  }

  std::int64_t steps() const { return t_; }

 private:
  AdamWConfig config_;
  Eigen::VectorXd m_;
  Eigen::VectorXd v_;
  std::int64_t t_ = 0;
};

}  // namespace spansteer

#endif  // SPANSTEER_OPTIM_H_
