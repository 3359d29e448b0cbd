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

#include <cmath>
#include <random>

#include <benchmark/benchmark.h>

#include "anchor_motion/anchor_select.h"
#include "anchor_motion/motion_tokens.h"

namespace anchor_motion {
namespace {

MotionTokenSet make_tokens(std::size_t count, int frames, int channels) {
  std::mt19937_64 rng(42);
  std::normal_distribution<double> normal;
  MotionTokenSet set;
  set.frames = frames;
  set.channels = channels;
  for (std::size_t k = 0; k < count; ++k) {
    MotionToken t;
    t.trajectory_index = k;
    t.frames = frames;
    t.channels = channels;
    t.features.resize(static_cast<std::size_t>(frames) * channels);
    for (int i = 0; i < frames; ++i) {
      double norm = 0.0;
      double* row = t.features.data() + static_cast<std::size_t>(i) * channels;
      for (int c = 0; c < channels; ++c) norm += (row[c] = normal(rng)) * row[c];
      for (int c = 0; c < channels; ++c) row[c] /= std::sqrt(norm);
    }
    set.tokens.push_back(std::move(t));
  }
  return set;
}

void BM_PairwiseDistances(benchmark::State& state) {
  const MotionTokenSet tokens = make_tokens(static_cast<std::size_t>(state.range(0)), 16, 64);
  for (auto _ : state) benchmark::DoNotOptimize(pairwise_distances(tokens));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PairwiseDistances)->RangeMultiplier(2)->Range(128, 1024)->Unit(benchmark::kMillisecond);

void BM_FpsSelectMatrix(benchmark::State& state) {
  const DistanceMatrix d =
      pairwise_distances(make_tokens(static_cast<std::size_t>(state.range(0)), 16, 64));
  for (auto _ : state) benchmark::DoNotOptimize(fps_select(d, 0.65));
}
BENCHMARK(BM_FpsSelectMatrix)->RangeMultiplier(2)->Range(128, 2048)->Unit(benchmark::kMicrosecond);

void BM_FpsSelectStreaming(benchmark::State& state) {
  const MotionTokenSet tokens = make_tokens(static_cast<std::size_t>(state.range(0)), 16, 64);
  for (auto _ : state) benchmark::DoNotOptimize(fps_select(tokens, 0.65));
}
BENCHMARK(BM_FpsSelectStreaming)->RangeMultiplier(2)->Range(128, 2048)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace anchor_motion
