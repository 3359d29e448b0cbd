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

// JSON documents exchanged by the CLI. Object keys are emitted in sorted
// order and reals with round-trip precision, so equal values always produce
// equal bytes. Malformed documents throw Error(ErrorCode::kFormat).
//
// trajectories.json
//   {n, h, w, candidate_count,
//    trajectories: [{seed_keyframe, seed_cell: [r, c],
//                    positions: [[u, v], ...], valid: [bool, ...]}]}
// anchors.json
//   {n, h, w, c, tau, l_max, seed_rule, strategy, audit,
//    indices: [k, ...], trajectories: [<trajectory>, ...],
//    token_features: [[N*C reals, frame-major], ...]}
// schedule.json
//   {n, h, w, c, alignment_applied,
//    anchors: [{source_index, target_index, match_distance,
//               trajectory: [[u, v], ...], valid, seed_keyframe, seed_cell,
//               features: [[C reals], ... N rows]}]}
// metrics.json
//   {flow_similarity, flow_similarity_degenerate, flow_pixels,
//    warp_error, warp_error_raw, precision, recall, f1, detection_matches}
//   with null for metrics whose inputs were not supplied.

#ifndef ANCHOR_MOTION_JSON_IO_H_
#define ANCHOR_MOTION_JSON_IO_H_

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "anchor_motion/anchor_align.h"
#include "anchor_motion/anchor_select.h"
#include "anchor_motion/eval_metrics.h"
#include "anchor_motion/flow_tracking.h"
#include "anchor_motion/synth_scenes.h"

namespace anchor_motion {

using Json = nlohmann::json;

Json to_json(const Trajectory& trajectory);
Trajectory trajectory_from_json(const Json& j, int frames);

Json to_json(const TrajectorySet& set);
TrajectorySet trajectory_set_from_json(const Json& j);

Json to_json(const AnchorBundle& bundle);
AnchorBundle anchor_bundle_from_json(const Json& j);

Json to_json(const InjectionSchedule& schedule);
InjectionSchedule injection_schedule_from_json(const Json& j);

Json to_json(const MetricReport& report);

Json to_json(const DetectionBox& box);
DetectionBox detection_box_from_json(const Json& j);
// One JSON object per non-blank line.
std::vector<DetectionBox> read_detection_boxes(const std::filesystem::path& path);

SceneSpec scene_spec_from_json(const Json& j);
Json to_json(const SceneSpec& spec);

Json read_json(const std::filesystem::path& path);
// Two-space indented, trailing newline.
void write_json(const Json& j, const std::filesystem::path& path);

}  // namespace anchor_motion

#endif  // ANCHOR_MOTION_JSON_IO_H_
