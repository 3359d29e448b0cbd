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

#include <benchmark/benchmark.h>

#include "anchor_motion/flow_tracking.h"
#include "anchor_motion/synth_scenes.h"

namespace anchor_motion {
namespace {

void BM_CollectTrajectories(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const FlowSequences flows = random_flows(16, side, side, 1.5, 7);
  const auto keys = default_keyframes(16);
  for (auto _ : state) {
    benchmark::DoNotOptimize(collect_trajectories(flows.forward, flows.backward, keys));
  }
}
BENCHMARK(BM_CollectTrajectories)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

void BM_DownsampleFlows(benchmark::State& state) {
  const FlowSequences flows = random_flows(16, 256, 256, 4.0, 3);
  for (auto _ : state) benchmark::DoNotOptimize(downsample_flows(flows.forward, 32, 32));
}
BENCHMARK(BM_DownsampleFlows)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace anchor_motion
