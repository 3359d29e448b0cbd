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

#include "anchor_motion/anchor_align.h"

#include <string>

#include "anchor_motion/error.h"
#include "anchor_motion/parallel.h"

namespace anchor_motion {
namespace {

AnchorMatch closest_target(const MotionToken& anchor, std::size_t source_index,
                           const MotionTokenSet& target) {
  AnchorMatch best{source_index, 0, token_distance(anchor, target.tokens[0])};
  for (std::size_t j = 1; j < target.size(); ++j) {
    const double d = token_distance(anchor, target.tokens[j]);
    if (d < best.distance) {
      best.target_index = j;
      best.distance = d;
    }
  }
  return best;
}

void check_target(const MotionTokenSet& target, int frames, int channels) {
  if (target.size() == 0) fail(ErrorCode::kValidation, "target token set is empty");
  if (target.frames != frames || target.channels != channels) {
    fail(ErrorCode::kValidation,
         "target tokens are " + std::to_string(target.frames) + "x" +
             std::to_string(target.channels) + ", anchors are " + std::to_string(frames) +
             "x" + std::to_string(channels));
  }
}

}  // namespace

AlignmentMapping match_anchors(const AnchorBundle& anchors, const MotionTokenSet& target) {
  check_target(target, anchors.frames, anchors.channels);
  AlignmentMapping mapping;
  mapping.pairs.resize(anchors.anchors.size());
  parallel_for(mapping.pairs.size(), [&](std::size_t k) {
    const AnchorRecord& a = anchors.anchors[k];
    mapping.pairs[k] = closest_target(a.token, a.index, target);
  });
  return mapping;
}

AlignmentMapping match_anchors(const AnchorSet& anchors, const MotionTokenSet& source,
                               const MotionTokenSet& target) {
  check_target(target, source.frames, source.channels);
  AlignmentMapping mapping;
  mapping.pairs.resize(anchors.size());
  parallel_for(mapping.pairs.size(), [&](std::size_t k) {
    const std::size_t index = anchors.indices[k];
    if (index >= source.size()) fail(ErrorCode::kValidation, "anchor index out of range");
    mapping.pairs[k] = closest_target(source.tokens[index], index, target);
  });
  return mapping;
}

InjectionSchedule relocate(const AnchorBundle& anchors, const AlignmentMapping& mapping,
                           const TrajectorySet& target_trajectories) {
  if (mapping.pairs.size() != anchors.anchors.size()) {
    fail(ErrorCode::kValidation, "mapping does not cover every anchor");
  }
  if (target_trajectories.frames != anchors.frames) {
    fail(ErrorCode::kValidation, "target trajectories have a different frame count");
  }
  InjectionSchedule schedule;
  schedule.frames = target_trajectories.frames;
  schedule.height = target_trajectories.height;
  schedule.width = target_trajectories.width;
  schedule.alignment_applied = true;
  for (std::size_t k = 0; k < mapping.pairs.size(); ++k) {
    const AnchorMatch& m = mapping.pairs[k];
    const AnchorRecord& a = anchors.anchors[k];
    if (m.source_index != a.index) {
      fail(ErrorCode::kValidation, "mapping order does not match the anchors");
    }
    if (m.target_index >= target_trajectories.trajectories.size()) {
      fail(ErrorCode::kValidation,
           "target index " + std::to_string(m.target_index) + " out of range");
    }
    schedule.anchors.push_back({a.index, m.target_index, m.distance,
                                target_trajectories.trajectories[m.target_index],
                                a.token});
  }
  return schedule;
}

InjectionSchedule unaligned_schedule(const AnchorBundle& anchors) {
  InjectionSchedule schedule;
  schedule.frames = anchors.frames;
  schedule.height = anchors.height;
  schedule.width = anchors.width;
  schedule.alignment_applied = false;
  for (const AnchorRecord& a : anchors.anchors) {
    schedule.anchors.push_back({a.index, std::nullopt, std::nullopt, a.trajectory, a.token});
  }
  return schedule;
}

}  // namespace anchor_motion
