/*
 * Copyright 2026 The occtrack Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef OCCTRACK_PARALLEL_H_
#define OCCTRACK_PARALLEL_H_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace occtrack {

// Worker count: OCCTRACK_THREADS when set to a positive integer (capped at
// the hardware concurrency), otherwise the hardware concurrency.
int WorkerCount();

// Splits [0, count) into at most WorkerCount() contiguous chunks and calls
// fn(chunk_begin, chunk_end, worker) on each. Chunk boundaries depend only on
// count and the worker count; the first exception thrown by any chunk is
// rethrown after all workers join.
template <typename Fn>
void ParallelFor(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(
      static_cast<std::size_t>(WorkerCount()), std::max<std::size_t>(count, 1));
  if (workers <= 1) {
    fn(std::size_t{0}, count, std::size_t{0});
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = count * w / workers;
    const std::size_t end = count * (w + 1) / workers;
    threads.emplace_back([&, begin, end, w] {
      try {
        fn(begin, end, w);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace occtrack

#endif  // OCCTRACK_PARALLEL_H_
