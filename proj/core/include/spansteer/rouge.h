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

#ifndef SPANSTEER_ROUGE_H_
#define SPANSTEER_ROUGE_H_

// ROUGE-1/2/L over pre-tokenized text. Tokens are lowercased before
// matching; no stemming. Multi-sentence references are scored as one
// concatenated token list.

#include <span>
#include <string>

namespace spansteer {

struct RougeScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  static RougeScore from(double precision, double recall);
};

using Tokens = std::span<const std::string>;

// Clipped n-gram overlap. n must be 1 or 2.
RougeScore rouge_n(Tokens candidate, Tokens reference, int n);

// Longest-common-subsequence based score.
RougeScore rouge_l(Tokens candidate, Tokens reference);

std::size_t lcs_length(Tokens a, Tokens b);

}  // namespace spansteer

#endif  // SPANSTEER_ROUGE_H_
