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

#ifndef SPANSTEER_PARALLEL_H_
#define SPANSTEER_PARALLEL_H_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <initializer_list>
#include <thread>
#include <vector>

namespace spansteer {

// Effective worker count: `requested` capped by every nonzero adapter limit.
inline std::size_t effective_workers(std::size_t requested,
                                     std::initializer_list<std::size_t> limits) {
  std::size_t n = std::max<std::size_t>(requested, 1);
  for (auto l : limits) {
    if (l) n = std::min(n, l);
  }
  return n;
}

// Runs fn(i) for i in [0, n) on up to `workers` threads. Results must be
// written to per-index slots, so output order never depends on scheduling.
// The exception from the lowest failing index is rethrown.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
  workers = std::min(std::max<std::size_t>(workers, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (auto i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace spansteer

#endif  // SPANSTEER_PARALLEL_H_
