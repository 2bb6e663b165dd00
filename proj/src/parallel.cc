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

#include "occtrack/parallel.h"

#include <cstdlib>
#include <string>

namespace occtrack {

int WorkerCount() {
  const int hardware =
      std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  if (const char* env = std::getenv("OCCTRACK_THREADS")) {
    try {
      const int requested = std::stoi(env);
      if (requested > 0) return std::min(requested, hardware);
    } catch (const std::exception&) {
    }
  }
  return hardware;
}

}  // namespace occtrack
