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

// Anchor alignment: every source anchor is matched to the closest target
// motion token (independent argmin per anchor, lowest index on ties, many
// to one allowed) and its injection trajectory is moved onto that token's
// trajectory.

#ifndef ANCHOR_MOTION_ANCHOR_ALIGN_H_
#define ANCHOR_MOTION_ANCHOR_ALIGN_H_

#include <cstddef>
#include <optional>
#include <vector>

#include "anchor_motion/anchor_select.h"
#include "anchor_motion/flow_tracking.h"
#include "anchor_motion/motion_tokens.h"

namespace anchor_motion {

struct AnchorMatch {
  std::size_t source_index = 0;  // Anchor's index in the source token set.
  std::size_t target_index = 0;  // Matched index in the target token set.
  double distance = 0.0;

  bool operator==(const AnchorMatch&) const = default;
};

struct AlignmentMapping {
  std::vector<AnchorMatch> pairs;  // One per anchor, in anchor order.
};

AlignmentMapping match_anchors(const AnchorBundle& anchors,
                               const MotionTokenSet& target);
AlignmentMapping match_anchors(const AnchorSet& anchors, const MotionTokenSet& source,
                               const MotionTokenSet& target);

struct ScheduledAnchor {
  std::size_t source_index = 0;
  std::optional<std::size_t> target_index;  // Empty without alignment.
  std::optional<double> match_distance;
  Trajectory trajectory;  // Where the features are injected.
  MotionToken token;

  bool operator==(const ScheduledAnchor&) const = default;
};

struct InjectionSchedule {
  int frames = 0;
  int height = 0;
  int width = 0;
  bool alignment_applied = false;
  std::vector<ScheduledAnchor> anchors;

  bool operator==(const InjectionSchedule&) const = default;
};

// Moves each anchor onto target trajectory mapping.pairs[k].target_index.
// Token features are carried over unchanged.
InjectionSchedule relocate(const AnchorBundle& anchors, const AlignmentMapping& mapping,
                           const TrajectorySet& target_trajectories);

// Schedule that injects along the anchors' own source trajectories.
InjectionSchedule unaligned_schedule(const AnchorBundle& anchors);

}  // namespace anchor_motion

#endif  // ANCHOR_MOTION_ANCHOR_ALIGN_H_
