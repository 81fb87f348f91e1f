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

#ifndef SPANSTEER_TESTS_SUPPORT_REFERENCE_H_
#define SPANSTEER_TESTS_SUPPORT_REFERENCE_H_

// Deliberately naive re-derivations used as test oracles. They share no
// code with the library.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace spansteer::testing::reference {

inline std::string lower(std::string s) {
  for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

inline std::vector<std::string> grams(const std::vector<std::string>& t, std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i + n <= t.size(); ++i) {
    std::string g;
    for (std::size_t j = 0; j < n; ++j) g += lower(t[i + j]) + '\x01';
    out.push_back(g);
  }
  return out;
}

struct Prf {
  double p = 0, r = 0, f = 0;
};

inline Prf prf(double overlap, double cand, double ref) {
  Prf s;
  s.p = cand > 0 ? overlap / cand : 0.0;
  s.r = ref > 0 ? overlap / ref : 0.0;
  s.f = s.p + s.r > 0 ? 2 * s.p * s.r / (s.p + s.r) : 0.0;
  return s;
}

// Clipped overlap by repeated removal from a copy of the reference list.
inline Prf rouge_n(const std::vector<std::string>& cand, const std::vector<std::string>& ref,
                   std::size_t n) {
  auto c = grams(cand, n);
  auto r = grams(ref, n);
  const auto total_ref = r.size();
  std::size_t overlap = 0;
  for (const auto& g : c) {
    auto it = std::find(r.begin(), r.end(), g);
    if (it != r.end()) {
      ++overlap;
      r.erase(it);
    }
  }
  return prf(static_cast<double>(overlap), static_cast<double>(c.size()),
             static_cast<double>(total_ref));
}

// LCS by memoized recursion over suffixes.
inline std::size_t lcs(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::vector<long>> memo(a.size() + 1, std::vector<long>(b.size() + 1, -1));
  auto go = [&](auto&& self, std::size_t i, std::size_t j) -> long {
    if (i == a.size() || j == b.size()) return 0;
    if (memo[i][j] >= 0) return memo[i][j];
    long v = lower(a[i]) == lower(b[j]) ? 1 + self(self, i + 1, j + 1)
                                        : std::max(self(self, i + 1, j), self(self, i, j + 1));
    return memo[i][j] = v;
  };
  return static_cast<std::size_t>(go(go, 0, 0));
}

inline Prf rouge_l(const std::vector<std::string>& cand, const std::vector<std::string>& ref) {
  return prf(static_cast<double>(lcs(cand, ref)), static_cast<double>(cand.size()),
             static_cast<double>(ref.size()));
}

// Balanced BCE from its definition, written with explicit per-class loops.
inline double balanced_bce(const std::vector<double>& logits, const std::vector<bool>& labels) {
  double pos = 0, neg = 0;
  std::size_t np = 0, nn = 0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double p = 1.0 / (1.0 + std::exp(-logits[i]));
    if (labels[i]) {
      pos += -std::log(p);
      ++np;
    } else {
      neg += -std::log(1.0 - p);
      ++nn;
    }
  }
  if (np && nn) return 0.5 * pos / np + 0.5 * neg / nn;
  return np ? pos / np : neg / nn;
}

}  // namespace spansteer::testing::reference

#endif  // SPANSTEER_TESTS_SUPPORT_REFERENCE_H_
