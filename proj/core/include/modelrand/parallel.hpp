// Copyright 2026 The modelrand Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef MODELRAND_PARALLEL_HPP_
#define MODELRAND_PARALLEL_HPP_

#include <algorithm>
#include <functional>
#include <thread>
#include <vector>

namespace modelrand {

inline int resolve_threads(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn over [0, n) split into contiguous chunks, one per worker. Work
// items must write to disjoint slots; results are then independent of the
// thread count.
inline void parallel_for(long n, int threads, const std::function<void(long, long)>& fn) {
  if (n <= 0) return;
  const int workers = std::min<long>(resolve_threads(threads), n);
  if (workers <= 1) {
    fn(0, n);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const long chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const long begin = w * chunk;
    const long end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&fn, begin, end] { fn(begin, end); });
  }
  for (std::thread& t : pool) t.join();
}

}  // namespace modelrand

#endif  // MODELRAND_PARALLEL_HPP_
