// Copyright 2026 The Anchor Motion Authors.
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

#ifndef ANCHOR_MOTION_PARALLEL_H_
#define ANCHOR_MOTION_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace anchor_motion {

// Environment variable that caps worker threads for every parallel loop.
inline constexpr const char* kThreadsEnvVar = "ANCHOR_MOTION_THREADS";

// Number of workers parallel_for will use: the value of
// ANCHOR_MOTION_THREADS when it parses as a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t worker_count();

// Runs body(i) for every i in [0, n). Indices are split into contiguous
// chunks, one per worker. body must only write state owned by index i so
// results do not depend on the schedule. The first exception thrown by any
// worker is rethrown on the calling thread. Each worker gets at least
// `grain` indices, so small loops stay on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body,
                  std::size_t grain = 1);

}  // namespace anchor_motion

#endif  // ANCHOR_MOTION_PARALLEL_H_
