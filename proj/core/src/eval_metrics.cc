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

#include "anchor_motion/eval_metrics.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <tuple>

#include "anchor_motion/error.h"
#include "anchor_motion/parallel.h"

namespace anchor_motion {
namespace {

void check_flow_lists(const std::vector<FlowField>& a, const std::vector<FlowField>& b) {
  if (a.empty()) fail(ErrorCode::kValidation, "flow list is empty");
  if (a.size() != b.size()) fail(ErrorCode::kValidation, "flow counts differ");
  for (std::size_t i = 0; i < a.size(); ++i) {
    validate(a[i]);
    validate(b[i]);
    if (a[i].width != b[i].width || a[i].height != b[i].height) {
      fail(ErrorCode::kValidation, "flow dimensions differ");
    }
  }
}

// Bilinear RGB sample at a position known to be inside the image.
std::array<double, 3> sample_rgb(const Image& image, double x, double y) {
  const int c0 = std::clamp(static_cast<int>(std::floor(x)), 0, image.width - 1);
  const int r0 = std::clamp(static_cast<int>(std::floor(y)), 0, image.height - 1);
  const int c1 = std::min(c0 + 1, image.width - 1);
  const int r1 = std::min(r0 + 1, image.height - 1);
  const double fx = std::clamp(x - c0, 0.0, 1.0);
  const double fy = std::clamp(y - r0, 0.0, 1.0);
  std::array<double, 3> out{};
  for (int ch = 0; ch < 3; ++ch) {
    const double top = (1.0 - fx) * image.at(r0, c0, ch) + fx * image.at(r0, c1, ch);
    const double bottom = (1.0 - fx) * image.at(r1, c0, ch) + fx * image.at(r1, c1, ch);
    out[ch] = (1.0 - fy) * top + fy * bottom;
  }
  return out;
}

// Source position of pixel (row, col) under backward warping, or nullopt when
// it lands outside the image.
std::optional<std::pair<double, double>> warp_source(const FlowField& flow, int row,
                                                     int col) {
  const double x = col + static_cast<double>(flow.u_at(row, col));
  const double y = row + static_cast<double>(flow.v_at(row, col));
  if (x < 0.0 || y < 0.0 || x > flow.width - 1 || y > flow.height - 1) return std::nullopt;
  return std::make_pair(x, y);
}

void check_box(const DetectionBox& b) {
  const bool finite = std::isfinite(b.x_min) && std::isfinite(b.y_min) &&
                      std::isfinite(b.x_max) && std::isfinite(b.y_max);
  if (!finite || b.frame < 0 || b.x_min >= b.x_max || b.y_min >= b.y_max ||
      b.x_min < 0.0 || b.y_min < 0.0) {
    fail(ErrorCode::kValidation, "malformed detection box in frame " + std::to_string(b.frame));
  }
}

}  // namespace

FlowSimilarity flow_similarity(const std::vector<FlowField>& source_flows,
                               const std::vector<FlowField>& edited_flows) {
  check_flow_lists(source_flows, edited_flows);
  const std::size_t pairs = source_flows.size();
  std::vector<double> sums(pairs, 0.0);
  std::vector<std::size_t> counts(pairs, 0);
  std::vector<char> any_motion(pairs, 0);
  parallel_for(pairs, [&](std::size_t f) {
    const FlowField& a = source_flows[f];
    const FlowField& b = edited_flows[f];
    for (std::size_t i = 0; i < a.u.size(); ++i) {
      const double au = a.u[i], av = a.v[i], bu = b.u[i], bv = b.v[i];
      const double na = std::sqrt(au * au + av * av);
      const double nb = std::sqrt(bu * bu + bv * bv);
      if (na >= kMinFlowNorm || nb >= kMinFlowNorm) any_motion[f] = 1;
      if (na < kMinFlowNorm || nb < kMinFlowNorm) continue;
      sums[f] += (au * bu + av * bv) / (na * nb);
      ++counts[f];
    }
  });

  FlowSimilarity out;
  double total = 0.0;
  for (std::size_t f = 0; f < pairs; ++f) {
    total += sums[f];
    out.pixels_used += counts[f];
  }
  if (out.pixels_used == 0) {
    out.degenerate = true;
    const bool static_videos = std::none_of(any_motion.begin(), any_motion.end(),
                                            [](char m) { return m != 0; });
    out.value = static_videos ? 1.0 : 0.0;
    return out;
  }
  out.value = total / static_cast<double>(out.pixels_used);
  return out;
}

Image backward_warp(const Image& next, const FlowField& flow,
                    std::vector<std::uint8_t>* in_bounds) {
  if (next.width != flow.width || next.height != flow.height) {
    fail(ErrorCode::kValidation, "flow and frame dimensions differ");
  }
  Image out(next.width, next.height);
  if (in_bounds != nullptr) in_bounds->assign(out.rgb.size() / 3, 0);
  for (int r = 0; r < next.height; ++r) {
    for (int c = 0; c < next.width; ++c) {
      const auto src = warp_source(flow, r, c);
      if (!src) continue;
      const auto rgb = sample_rgb(next, src->first, src->second);
      out.set(r, c, static_cast<std::uint8_t>(std::lround(rgb[0])),
              static_cast<std::uint8_t>(std::lround(rgb[1])),
              static_cast<std::uint8_t>(std::lround(rgb[2])));
      if (in_bounds != nullptr) (*in_bounds)[static_cast<std::size_t>(r) * out.width + c] = 1;
    }
  }
  return out;
}

WarpError warp_error(const std::vector<FlowField>& source_flows,
                     const FrameSequence& edited_frames) {
  validate(edited_frames);
  if (source_flows.size() + 1 != edited_frames.size()) {
    fail(ErrorCode::kValidation, "need exactly one flow per consecutive frame pair");
  }
  for (const FlowField& f : source_flows) {
    validate(f);
    if (f.width != edited_frames.front().width || f.height != edited_frames.front().height) {
      fail(ErrorCode::kValidation, "flow resolution differs from frame resolution");
    }
  }

  const std::size_t pairs = source_flows.size();
  std::vector<double> mse(pairs, 0.0);
  std::vector<char> usable(pairs, 0);
  parallel_for(pairs, [&](std::size_t i) {
    const Image& current = edited_frames[i];
    const Image& next = edited_frames[i + 1];
    const FlowField& flow = source_flows[i];
    double sum = 0.0;
    std::size_t samples = 0;
    for (int r = 0; r < current.height; ++r) {
      for (int c = 0; c < current.width; ++c) {
        const auto src = warp_source(flow, r, c);
        if (!src) continue;
        const auto warped = sample_rgb(next, src->first, src->second);
        for (int ch = 0; ch < 3; ++ch) {
          const double d = static_cast<double>(current.at(r, c, ch)) - warped[ch];
          sum += d * d;
        }
        samples += 3;
      }
    }
    if (samples > 0) {
      mse[i] = sum / static_cast<double>(samples);
      usable[i] = 1;
    }
  });

  WarpError out;
  std::size_t used = 0;
  for (std::size_t i = 0; i < pairs; ++i) {
    if (!usable[i]) continue;
    out.raw += mse[i];
    ++used;
  }
  if (used > 0) out.raw /= static_cast<double>(used);
  out.scaled = out.raw * kWarpErrorScale;
  return out;
}

double box_iou(const DetectionBox& a, const DetectionBox& b) {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double area_a = (a.x_max - a.x_min) * (a.y_max - a.y_min);
  const double area_b = (b.x_max - b.x_min) * (b.y_max - b.y_min);
  return inter / (area_a + area_b - inter);
}

DetectionScore detection_f1(const std::vector<DetectionBox>& ground_truth,
                            const std::vector<DetectionBox>& predictions,
                            double iou_threshold) {
  for (const auto& b : ground_truth) check_box(b);
  for (const auto& b : predictions) check_box(b);

  std::map<int, std::pair<std::vector<std::size_t>, std::vector<std::size_t>>> frames;
  for (std::size_t i = 0; i < ground_truth.size(); ++i) {
    frames[ground_truth[i].frame].first.push_back(i);
  }
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    frames[predictions[i].frame].second.push_back(i);
  }

  DetectionScore out;
  for (const auto& [frame, boxes] : frames) {
    const auto& [gt, pred] = boxes;
    std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
    for (std::size_t g = 0; g < gt.size(); ++g) {
      for (std::size_t p = 0; p < pred.size(); ++p) {
        const double iou = box_iou(ground_truth[gt[g]], predictions[pred[p]]);
        if (iou > iou_threshold) candidates.emplace_back(iou, g, p);
      }
    }
    std::sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
      if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
      return std::tie(std::get<1>(a), std::get<2>(a)) < std::tie(std::get<1>(b), std::get<2>(b));
    });
    std::vector<char> gt_used(gt.size(), 0);
    std::vector<char> pred_used(pred.size(), 0);
    for (const auto& [iou, g, p] : candidates) {
      if (gt_used[g] || pred_used[p]) continue;
      gt_used[g] = 1;
      pred_used[p] = 1;
      ++out.matches;
    }
  }

  const double m = static_cast<double>(out.matches);
  out.precision = predictions.empty() ? 0.0 : m / static_cast<double>(predictions.size());
  out.recall = ground_truth.empty() ? 0.0 : m / static_cast<double>(ground_truth.size());
  const double sum = out.precision + out.recall;
  out.f1 = sum > 0.0 ? 2.0 * out.precision * out.recall / sum : 0.0;
  return out;
}

}  // namespace anchor_motion
