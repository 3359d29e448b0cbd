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

// Motion and edit metrics: flow similarity, warp error and detection F1.

#ifndef ANCHOR_MOTION_EVAL_METRICS_H_
#define ANCHOR_MOTION_EVAL_METRICS_H_

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "anchor_motion/tensor_store.h"

namespace anchor_motion {

// Flow vectors shorter than this are left out of the cosine average.
inline constexpr double kMinFlowNorm = 1e-8;
// Warp error is reported multiplied by this factor.
inline constexpr double kWarpErrorScale = 1e-4;
inline constexpr double kDefaultIouThreshold = 0.5;

struct FlowSimilarity {
  double value = 0.0;
  // Set when no pixel had two non-zero vectors. value is then 1.0 if both
  // videos are completely static and 0.0 otherwise.
  bool degenerate = false;
  std::size_t pixels_used = 0;
};

// Mean cosine between source and edited flow vectors, pooled over all
// frame pairs and pixels.
FlowSimilarity flow_similarity(const std::vector<FlowField>& source_flows,
                               const std::vector<FlowField>& edited_flows);

struct WarpError {
  double raw = 0.0;     // Mean squared difference on the [0, 255] scale.
  double scaled = 0.0;  // raw * kWarpErrorScale.
};

// Backward-warps frame i+1 onto frame i through source flow i -> i+1 and
// averages the per-pair MSE over in-bounds pixels and all channels. Pairs
// with no in-bounds pixel are skipped.
WarpError warp_error(const std::vector<FlowField>& source_flows,
                     const FrameSequence& edited_frames);

// Bilinear backward warp of `next` through `flow`. Pixels whose source
// position falls outside `next` get in_bounds = 0.
Image backward_warp(const Image& next, const FlowField& flow,
                    std::vector<std::uint8_t>* in_bounds = nullptr);

struct DetectionBox {
  int frame = 0;
  double x_min = 0.0;
  double y_min = 0.0;
  double x_max = 0.0;
  double y_max = 0.0;
  std::string label;
};

struct DetectionScore {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t matches = 0;
};

double box_iou(const DetectionBox& a, const DetectionBox& b);

// Per frame, GT/prediction pairs are matched greedily by descending IoU;
// each box is used at most once and a pair counts only if IoU exceeds
// iou_threshold. Labels are not compared. Empty sets give 0 precision or
// recall rather than NaN.
DetectionScore detection_f1(const std::vector<DetectionBox>& ground_truth,
                            const std::vector<DetectionBox>& predictions,
                            double iou_threshold = kDefaultIouThreshold);

struct MetricReport {
  std::optional<FlowSimilarity> flow_similarity;
  std::optional<WarpError> warp_error;
  std::optional<DetectionScore> detection;
};

}  // namespace anchor_motion

#endif  // ANCHOR_MOTION_EVAL_METRICS_H_
