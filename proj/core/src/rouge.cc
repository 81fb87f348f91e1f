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

#include "spansteer/rouge.h"

#include <algorithm>
#include <map>
#include <vector>

#include "spansteer/error.h"
#include "spansteer/text.h"

namespace spansteer {
namespace {

std::map<std::vector<std::string>, std::size_t> ngram_counts(Tokens tokens, int n,
                                                              std::size_t* total) {
  std::map<std::vector<std::string>, std::size_t> counts;
  *total = 0;
  const auto un = static_cast<std::size_t>(n);
  if (tokens.size() < un) return counts;
  std::vector<std::string> lowered;
  lowered.reserve(tokens.size());
  for (const auto& t : tokens) lowered.push_back(to_lower(t));
  for (std::size_t i = 0; i + un <= lowered.size(); ++i) {
    ++counts[{lowered.begin() + static_cast<std::ptrdiff_t>(i),
              lowered.begin() + static_cast<std::ptrdiff_t>(i + un)}];
    ++*total;
  }
  return counts;
}

}  // namespace

RougeScore RougeScore::from(double precision, double recall) {
  const double f1 = precision + recall > 0.0 ? 2.0 * precision * recall / (precision + recall)
                                             : 0.0;
  return {precision, recall, f1};
}

RougeScore rouge_n(Tokens candidate, Tokens reference, int n) {
  if (n != 1 && n != 2) throw ConfigError("rouge_n supports n = 1 or 2");
  std::size_t cand_total = 0;
  std::size_t ref_total = 0;
  const auto cand = ngram_counts(candidate, n, &cand_total);
  const auto ref = ngram_counts(reference, n, &ref_total);
  std::size_t overlap = 0;
  for (const auto& [gram, count] : cand) {
    auto it = ref.find(gram);
    if (it != ref.end()) overlap += std::min(count, it->second);
  }
  const double p = cand_total ? static_cast<double>(overlap) / static_cast<double>(cand_total) : 0.0;
  const double r = ref_total ? static_cast<double>(overlap) / static_cast<double>(ref_total) : 0.0;
  return RougeScore::from(p, r);
}

std::size_t lcs_length(Tokens a, Tokens b) {
  std::vector<std::string> la;
  std::vector<std::string> lb;
  for (const auto& t : a) la.push_back(to_lower(t));
  for (const auto& t : b) lb.push_back(to_lower(t));
  std::vector<std::size_t> prev(lb.size() + 1, 0);
  std::vector<std::size_t> cur(lb.size() + 1, 0);
  for (std::size_t i = 1; i <= la.size(); ++i) {
    for (std::size_t j = 1; j <= lb.size(); ++j) {
      cur[j] = la[i - 1] == lb[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[lb.size()];
}

RougeScore rouge_l(Tokens candidate, Tokens reference) {
  if (candidate.empty() || reference.empty()) return {};
  const auto l = static_cast<double>(lcs_length(candidate, reference));
  return RougeScore::from(l / static_cast<double>(candidate.size()),
                          l / static_cast<double>(reference.size()));
}

}  // namespace spansteer
