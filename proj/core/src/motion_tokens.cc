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

#include "anchor_motion/motion_tokens.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "anchor_motion/error.h"
#include "anchor_motion/parallel.h"

namespace anchor_motion {
namespace {

// Norms at or below this are treated as a degenerate (all-zero) feature.
constexpr double kZeroNorm = 1e-12;

}  // namespace

FeatureVolume normalize_features(const FeatureVolume& raw) {
  validate(raw);
  if (raw.normalized) {
    fail(ErrorCode::kValidation, "feature volume is already normalized");
  }
  FeatureVolume out = raw;
  out.normalized = true;
  const std::size_t cells = static_cast<std::size_t>(raw.height) * raw.width;
  const std::size_t stride = cells * raw.channels;
  parallel_for(cells, [&](std::size_t cell) {
    for (int ch = 0; ch < raw.channels; ++ch) {
      const std::size_t base = cell * raw.channels + ch;
      double sum = 0.0;
      for (int i = 0; i < raw.frames; ++i) sum += raw.data[i * stride + base];
      const double mean = sum / raw.frames;
      for (int i = 0; i < raw.frames; ++i) {
        out.data[i * stride + base] = static_cast<float>(raw.data[i * stride + base] - mean);
      }
    }
  });
  return out;
}

std::vector<double> sample_features(const FeatureVolume& volume, int frame,
                                    LatentPoint pos) {
  const int max_c = volume.width - 1;
  const int max_r = volume.height - 1;
  const int c0 = std::clamp(static_cast<int>(std::floor(pos.u)), 0, max_c);
  const int r0 = std::clamp(static_cast<int>(std::floor(pos.v)), 0, max_r);
  const int c1 = std::min(c0 + 1, max_c);
  const int r1 = std::min(r0 + 1, max_r);
  const double fx = std::clamp(pos.u - c0, 0.0, 1.0);
  const double fy = std::clamp(pos.v - r0, 0.0, 1.0);

  const auto f00 = volume.vector_at(frame, r0, c0);
  const auto f01 = volume.vector_at(frame, r0, c1);
  const auto f10 = volume.vector_at(frame, r1, c0);
  const auto f11 = volume.vector_at(frame, r1, c1);
  std::vector<double> out(static_cast<std::size_t>(volume.channels));
  for (std::size_t ch = 0; ch < out.size(); ++ch) {
    const double top = (1.0 - fx) * f00[ch] + fx * f01[ch];
    const double bottom = (1.0 - fx) * f10[ch] + fx * f11[ch];
    out[ch] = (1.0 - fy) * top + fy * bottom;
  }
  return out;
}

MotionToken build_motion_token(const Trajectory& trajectory,
                               const FeatureVolume& normalized,
                               std::size_t trajectory_index) {
  if (!normalized.normalized) {
    fail(ErrorCode::kValidation, "motion tokens require a normalized feature volume");
  }
  if (trajectory.positions.size() != static_cast<std::size_t>(normalized.frames)) {
    fail(ErrorCode::kValidation, "trajectory length " +
                                     std::to_string(trajectory.positions.size()) +
                                     " does not match " +
                                     std::to_string(normalized.frames) + " frames");
  }
  MotionToken token;
  token.trajectory_index = trajectory_index;
  token.frames = normalized.frames;
  token.channels = normalized.channels;
  token.features.reserve(static_cast<std::size_t>(token.frames) * token.channels);
  for (int i = 0; i < normalized.frames; ++i) {
    const LatentPoint p = trajectory.positions[i];
    if (!(p.u >= 0.0 && p.u <= normalized.width - 1 && p.v >= 0.0 &&
          p.v <= normalized.height - 1)) {
      fail(ErrorCode::kValidation, "trajectory position outside the feature grid");
    }
    std::vector<double> f = sample_features(normalized, i, p);
    double sq = 0.0;
    for (double x : f) sq += x * x;
    const double norm = std::sqrt(sq);
    for (double x : f) token.features.push_back(norm > kZeroNorm ? x / norm : 0.0);
  }
  return token;
}

MotionTokenSet build_motion_tokens(const TrajectorySet& trajectories,
                                   const FeatureVolume& normalized) {
  validate(normalized);
  if (trajectories.frames != normalized.frames ||
      trajectories.height != normalized.height ||
      trajectories.width != normalized.width) {
    fail(ErrorCode::kValidation, "trajectory grid does not match the feature volume");
  }
  MotionTokenSet set;
  set.frames = normalized.frames;
  set.channels = normalized.channels;
  set.tokens.resize(trajectories.trajectories.size());
  parallel_for(set.tokens.size(), [&](std::size_t k) {
    set.tokens[k] = build_motion_token(trajectories.trajectories[k], normalized, k);
  });
  return set;
}

double token_distance(const MotionToken& a, const MotionToken& b) {
  if (a.frames != b.frames || a.channels != b.channels ||
      a.features.size() != b.features.size()) {
    fail(ErrorCode::kValidation, "token shapes differ");
  }
  if (a.frames < 1) fail(ErrorCode::kValidation, "token has no frames");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.features.size(); ++i) sum += a.features[i] * b.features[i];
  return std::clamp(1.0 - sum / a.frames, 0.0, 2.0);
}

DistanceMatrix pairwise_distances(const MotionTokenSet& tokens) {
  const std::size_t k = tokens.size();
  DistanceMatrix out(k);
  parallel_for(k, [&](std::size_t i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      out.set(i, j, token_distance(tokens.tokens[i], tokens.tokens[j]));
    }
  });
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < i; ++j) out.set(i, j, out.at(j, i));
  }
  return out;
}

}  // namespace anchor_motion
