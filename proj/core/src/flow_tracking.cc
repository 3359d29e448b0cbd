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

#include "anchor_motion/flow_tracking.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <unordered_set>

#include "anchor_motion/error.h"
#include "anchor_motion/parallel.h"

namespace anchor_motion {
namespace {

struct DedupKeyHash {
  std::size_t operator()(const std::vector<std::int32_t>& key) const noexcept {
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (std::int32_t x : key) {
      h ^= static_cast<std::uint32_t>(x);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

std::vector<std::int32_t> dedup_key(const Trajectory& t) {
  std::vector<std::int32_t> key;
  key.reserve(t.positions.size() * 2);
  for (const LatentPoint& p : t.positions) {
    key.push_back(static_cast<std::int32_t>(std::lround(p.u)));
    key.push_back(static_cast<std::int32_t>(std::lround(p.v)));
  }
  return key;
}

void check_flow_sequences(const std::vector<FlowField>& fwd,
                          const std::vector<FlowField>& bwd) {
  if (fwd.empty()) fail(ErrorCode::kValidation, "need at least one forward flow");
  if (fwd.size() != bwd.size()) {
    fail(ErrorCode::kValidation, "forward and backward flow counts differ");
  }
  for (const auto* seq : {&fwd, &bwd}) {
    for (const FlowField& f : *seq) {
      if (f.width != fwd.front().width || f.height != fwd.front().height) {
        fail(ErrorCode::kValidation, "flow dimensions differ across frames");
      }
    }
  }
}

// Advances one step and clamps; returns false if the unclamped position
// left the grid.
bool step(LatentPoint& pos, const FlowField& flow) {
  const LatentPoint next = advect(pos, flow);
  const double max_u = flow.width - 1;
  const double max_v = flow.height - 1;
  const bool inside = next.u >= 0.0 && next.u <= max_u && next.v >= 0.0 && next.v <= max_v;
  pos = {std::clamp(next.u, 0.0, max_u), std::clamp(next.v, 0.0, max_v)};
  return inside;
}

Trajectory track_cell(const std::vector<FlowField>& fwd,
                      const std::vector<FlowField>& bwd, int keyframe, GridCell cell) {
  const std::size_t frames = fwd.size() + 1;
  const std::size_t seed = static_cast<std::size_t>(keyframe - 1);
  Trajectory t;
  t.seed_keyframe = keyframe;
  t.seed_cell = cell;
  t.positions.resize(frames);
  t.valid.assign(frames, false);
  t.positions[seed] = {static_cast<double>(cell.col), static_cast<double>(cell.row)};
  t.valid[seed] = true;

  LatentPoint pos = t.positions[seed];
  bool valid = true;
  for (std::size_t i = seed; i + 1 < frames; ++i) {
    valid = step(pos, fwd[i]) && valid;
    t.positions[i + 1] = pos;
    t.valid[i + 1] = valid;
  }
  pos = t.positions[seed];
  valid = true;
  for (std::size_t i = seed; i > 0; --i) {
    valid = step(pos, bwd[i - 1]) && valid;
    t.positions[i - 1] = pos;
    t.valid[i - 1] = valid;
  }
  return t;
}

}  // namespace

FlowField downsample_flow(const FlowField& flow, int target_height, int target_width) {
  validate(flow);
  if (target_height < 1 || target_width < 1) {
    fail(ErrorCode::kValidation, "downsample target must be positive");
  }
  if (target_height > flow.height || target_width > flow.width) {
    fail(ErrorCode::kValidation, "downsample target larger than source flow");
  }
  const double scale_u = static_cast<double>(target_width) / flow.width;
  const double scale_v = static_cast<double>(target_height) / flow.height;

  FlowField out(target_width, target_height);
  for (int r = 0; r < target_height; ++r) {
    const int r0 = static_cast<int>(static_cast<std::int64_t>(r) * flow.height / target_height);
    const int r1 = static_cast<int>(static_cast<std::int64_t>(r + 1) * flow.height / target_height);
    for (int c = 0; c < target_width; ++c) {
      const int c0 = static_cast<int>(static_cast<std::int64_t>(c) * flow.width / target_width);
      const int c1 = static_cast<int>(static_cast<std::int64_t>(c + 1) * flow.width / target_width);
      double su = 0.0;
      double sv = 0.0;
      for (int sr = r0; sr < r1; ++sr) {
        for (int sc = c0; sc < c1; ++sc) {
          su += flow.u_at(sr, sc);
          sv += flow.v_at(sr, sc);
        }
      }
      const double count = static_cast<double>(r1 - r0) * (c1 - c0);
      out.set(r, c, static_cast<float>(su / count * scale_u),
              static_cast<float>(sv / count * scale_v));
    }
  }
  return out;
}

std::vector<FlowField> downsample_flows(const std::vector<FlowField>& flows,
                                        int target_height, int target_width) {
  std::vector<FlowField> out(flows.size());
  parallel_for(flows.size(), [&](std::size_t i) {
    out[i] = downsample_flow(flows[i], target_height, target_width);
  });
  return out;
}

LatentPoint sample_flow(const FlowField& flow, LatentPoint pos) {
  const int max_c = flow.width - 1;
  const int max_r = flow.height - 1;
  const int c0 = std::clamp(static_cast<int>(std::floor(pos.u)), 0, max_c);
  const int r0 = std::clamp(static_cast<int>(std::floor(pos.v)), 0, max_r);
  const int c1 = std::min(c0 + 1, max_c);
  const int r1 = std::min(r0 + 1, max_r);
  const double fx = std::clamp(pos.u - c0, 0.0, 1.0);
  const double fy = std::clamp(pos.v - r0, 0.0, 1.0);

  auto lerp2 = [&](const std::vector<float>& ch) {
    const double top = (1.0 - fx) * ch[flow.offset(r0, c0)] + fx * ch[flow.offset(r0, c1)];
    const double bottom = (1.0 - fx) * ch[flow.offset(r1, c0)] + fx * ch[flow.offset(r1, c1)];
    return (1.0 - fy) * top + fy * bottom;
  };
  return {lerp2(flow.u), lerp2(flow.v)};
}

LatentPoint advect(LatentPoint pos, const FlowField& flow) {
  const LatentPoint d = sample_flow(flow, pos);
  return {pos.u + d.u, pos.v + d.v};
}

std::vector<Trajectory> deduplicate_trajectories(std::vector<Trajectory> trajectories) {
  std::unordered_set<std::vector<std::int32_t>, DedupKeyHash> seen;
  std::vector<Trajectory> kept;
  for (Trajectory& t : trajectories) {
    if (seen.insert(dedup_key(t)).second) kept.push_back(std::move(t));
  }
  return kept;
}

std::vector<int> default_keyframes(int frames) {
  std::vector<int> keys = {1, frames / 2, frames};
  keys.erase(std::remove_if(keys.begin(), keys.end(), [](int k) { return k < 1; }),
             keys.end());
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

std::vector<Trajectory> track_from_keyframe(const std::vector<FlowField>& fwd,
                                            const std::vector<FlowField>& bwd,
                                            int keyframe) {
  check_flow_sequences(fwd, bwd);
  const int frames = static_cast<int>(fwd.size()) + 1;
  if (keyframe < 1 || keyframe > frames) {
    fail(ErrorCode::kValidation, "keyframe " + std::to_string(keyframe) +
                                     " outside [1, " + std::to_string(frames) + "]");
  }
  const int height = fwd.front().height;
  const int width = fwd.front().width;
  std::vector<Trajectory> out(static_cast<std::size_t>(height) * width);
  parallel_for(static_cast<std::size_t>(height), [&](std::size_t r) {
    for (int c = 0; c < width; ++c) {
      out[r * width + c] = track_cell(fwd, bwd, keyframe, {static_cast<int>(r), c});
    }
  });
  return out;
}

TrajectorySet collect_trajectories(const std::vector<FlowField>& fwd,
                                   const std::vector<FlowField>& bwd,
                                   std::span<const int> keyframes,
                                   const SubjectMask* mask) {
  check_flow_sequences(fwd, bwd);
  const int frames = static_cast<int>(fwd.size()) + 1;
  const int height = fwd.front().height;
  const int width = fwd.front().width;
  if (keyframes.empty()) fail(ErrorCode::kValidation, "keyframe set is empty");
  std::vector<int> keys(keyframes.begin(), keyframes.end());
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  for (int k : keys) {
    if (k < 1 || k > frames) {
      fail(ErrorCode::kValidation, "keyframe " + std::to_string(k) + " outside [1, " +
                                       std::to_string(frames) + "]");
    }
  }
  if (mask != nullptr) {
    validate(*mask);
    if (mask->height != height || mask->width != width) {
      fail(ErrorCode::kValidation, "mask dimensions do not match the latent grid");
    }
  }

  TrajectorySet set;
  set.frames = frames;
  set.height = height;
  set.width = width;

  // Ordered by (keyframe, row, col); every later pass preserves this order.
  std::vector<Trajectory> candidates;
  candidates.reserve(keys.size() * height * width);
  for (int k : keys) {
    std::vector<Trajectory> tracks = track_from_keyframe(fwd, bwd, k);
    std::move(tracks.begin(), tracks.end(), std::back_inserter(candidates));
  }
  set.candidate_count = candidates.size();

  if (mask != nullptr) {
    std::erase_if(candidates, [&](const Trajectory& t) {
      return !mask->at(t.seed_cell.row, t.seed_cell.col);
    });
  }
  set.trajectories = deduplicate_trajectories(std::move(candidates));
  if (set.trajectories.empty()) {
    fail(ErrorCode::kEmptyResult, "no trajectories after filtering");
  }
  return set;
}

}  // namespace anchor_motion
