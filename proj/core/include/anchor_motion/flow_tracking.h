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

// Candidate trajectory collection: every latent cell is seeded at a few
// keyframes and advected forward and backward through latent-resolution
// flow. Duplicates are removed and an optional subject mask filters seeds.
//
// Coordinates are continuous latent-grid positions: u is the column (x) and
// v is the row (y), with cell centers at integer values. Frame numbers and
// keyframes are 1-based.

#ifndef ANCHOR_MOTION_FLOW_TRACKING_H_
#define ANCHOR_MOTION_FLOW_TRACKING_H_

#include <cstddef>
#include <span>
#include <vector>

#include "anchor_motion/tensor_store.h"

namespace anchor_motion {

struct LatentPoint {
  double u = 0.0;
  double v = 0.0;

  bool operator==(const LatentPoint&) const = default;
};

struct GridCell {
  int row = 0;
  int col = 0;

  bool operator==(const GridCell&) const = default;
};

struct Trajectory {
  std::vector<LatentPoint> positions;  // One per frame, clamped to the grid.
  std::vector<bool> valid;             // False once the point left the grid.
  int seed_keyframe = 1;
  GridCell seed_cell;

  bool operator==(const Trajectory&) const = default;
};

struct TrajectorySet {
  int frames = 0;
  int height = 0;
  int width = 0;
  std::vector<Trajectory> trajectories;
  // Trajectories seeded before mask filtering and deduplication
  // (keyframes x H x W).
  std::size_t candidate_count = 0;

  bool operator==(const TrajectorySet&) const = default;
};

// Block-mean downsampling. Displacements are rescaled into target-grid units.
FlowField downsample_flow(const FlowField& flow, int target_height, int target_width);
std::vector<FlowField> downsample_flows(const std::vector<FlowField>& flows,
                                        int target_height, int target_width);

// Bilinear flow lookup at a continuous position; border cells are reused
// when the 2x2 neighbourhood leaves the grid.
LatentPoint sample_flow(const FlowField& flow, LatentPoint pos);

// pos + sample_flow(flow, pos). Not clamped.
LatentPoint advect(LatentPoint pos, const FlowField& flow);

// {1, floor(N/2), N} with duplicates removed (N = 2 or 3 collapse).
std::vector<int> default_keyframes(int frames);

// One trajectory per latent cell seeded at `keyframe`. fwd[i] maps frame
// i+1 to i+2 and bwd[i] maps frame i+2 back to i+1 (1-based frames).
std::vector<Trajectory> track_from_keyframe(const std::vector<FlowField>& fwd,
                                            const std::vector<FlowField>& bwd,
                                            int keyframe);

// Removes trajectories whose rounded positions coincide at every frame with
// an earlier one. Input order decides which copy survives.
std::vector<Trajectory> deduplicate_trajectories(std::vector<Trajectory> trajectories);

// Union of per-keyframe tracks. Trajectories whose seed cell is false in
// `mask` are dropped, then duplicates (identical rounded positions at every
// frame) are removed keeping the earliest (keyframe, row, col). Throws
// ErrorCode::kEmptyResult when nothing survives.
TrajectorySet collect_trajectories(const std::vector<FlowField>& fwd,
                                   const std::vector<FlowField>& bwd,
                                   std::span<const int> keyframes,
                                   const SubjectMask* mask = nullptr);

}  // namespace anchor_motion

#endif  // ANCHOR_MOTION_FLOW_TRACKING_H_
