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
#include <random>

#include <gtest/gtest.h>

#include "test_support.h"

namespace anchor_motion {
namespace {

using testing::error_code_of;

std::vector<FlowField> random_flow_list(int count, int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<float> d(-3.0f, 3.0f);
  std::vector<FlowField> out;
  for (int i = 0; i < count; ++i) {
    FlowField f(w, h);
    for (auto& x : f.u) x = d(rng);
    for (auto& x : f.v) x = d(rng);
    out.push_back(f);
  }
  return out;
}

FrameSequence constant_video(int frames, int w, int h, std::uint8_t value) {
  return FrameSequence(frames, Image(w, h, value));
}

DetectionBox box(int frame, double x0, double y0, double x1, double y1,
                 const std::string& label = "") {
  return {frame, x0, y0, x1, y1, label};
}

TEST(FlowSimilarityTest, IdenticalAntipodalOrthogonal) {
  const auto src = random_flow_list(3, 8, 6, 1);
  EXPECT_NEAR(flow_similarity(src, src).value, 1.0, 1e-12);
  auto neg = src;
  for (auto& f : neg) {
    for (auto& x : f.u) x = -x;
    for (auto& x : f.v) x = -x;
  }
  EXPECT_NEAR(flow_similarity(src, neg).value, -1.0, 1e-12);
  const std::vector<FlowField> right(2, FlowField(4, 4, 1.0f, 0.0f));
  const std::vector<FlowField> down(2, FlowField(4, 4, 0.0f, 1.0f));
  const FlowSimilarity s = flow_similarity(right, down);
  EXPECT_NEAR(s.value, 0.0, 1e-12);
  EXPECT_FALSE(s.degenerate);
  EXPECT_EQ(s.pixels_used, 32u);
}

TEST(FlowSimilarityTest, SkipsNearZeroVectors) {
  std::vector<FlowField> a(1, FlowField(2, 1, 1.0f, 0.0f));
  std::vector<FlowField> b(1, FlowField(2, 1, 1.0f, 0.0f));
  b[0].set(0, 1, 0.0f, 0.0f);
  a[0].set(0, 0, 2.0f, 0.0f);
  const FlowSimilarity s = flow_similarity(a, b);
  EXPECT_EQ(s.pixels_used, 1u);
  EXPECT_DOUBLE_EQ(s.value, 1.0);
}

TEST(FlowSimilarityTest, DegenerateConventions) {
  const std::vector<FlowField> zero(2, FlowField(3, 3));
  const FlowSimilarity both_static = flow_similarity(zero, zero);
  EXPECT_TRUE(both_static.degenerate);
  EXPECT_EQ(both_static.value, 1.0);
  EXPECT_EQ(both_static.pixels_used, 0u);
  const std::vector<FlowField> moving(2, FlowField(3, 3, 1.0f, 0.0f));
  const FlowSimilarity one_static = flow_similarity(zero, moving);
  EXPECT_TRUE(one_static.degenerate);
  EXPECT_EQ(one_static.value, 0.0);
}

TEST(FlowSimilarityTest, SymmetricAndScaleInvariant) {
  const auto a = random_flow_list(4, 7, 5, 2);
  const auto b = random_flow_list(4, 7, 5, 3);
  EXPECT_NEAR(flow_similarity(a, b).value, flow_similarity(b, a).value, 1e-12);
  auto a2 = a;
  auto b3 = b;
  for (auto& f : a2) {
    for (auto& x : f.u) x *= 2.0f;
    for (auto& x : f.v) x *= 2.0f;
  }
  for (auto& f : b3) {
    for (auto& x : f.u) x *= 0.5f;
    for (auto& x : f.v) x *= 0.5f;
  }
  EXPECT_NEAR(flow_similarity(a2, b3).value, flow_similarity(a, b).value, 1e-6);
}

TEST(FlowSimilarityTest, RejectsMismatches) {
  const auto a = random_flow_list(2, 4, 4, 4);
  const auto b = random_flow_list(3, 4, 4, 5);
  const auto c = random_flow_list(2, 5, 4, 6);
  EXPECT_EQ(error_code_of([&] { flow_similarity(a, b); }), ErrorCode::kValidation);
  EXPECT_EQ(error_code_of([&] { flow_similarity(a, c); }), ErrorCode::kValidation);
  EXPECT_EQ(error_code_of([&] { flow_similarity({}, {}); }), ErrorCode::kValidation);
}

TEST(WarpErrorTest, ZeroFlowConstantVideoIsZero) {
  const WarpError e = warp_error(std::vector<FlowField>(3, FlowField(6, 4)),
                                 constant_video(4, 6, 4, 77));
  EXPECT_EQ(e.raw, 0.0);
  EXPECT_EQ(e.scaled, 0.0);
}

TEST(WarpErrorTest, ConstantOffsetGivesMse) {
  FrameSequence frames = {Image(5, 5, 20), Image(5, 5, 30)};
  const WarpError e = warp_error({FlowField(5, 5)}, frames);
  EXPECT_DOUBLE_EQ(e.raw, 100.0);
  EXPECT_DOUBLE_EQ(e.scaled, 0.01);
}

TEST(WarpErrorTest, MatchingTranslationIsNearZero) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> pix(0, 255);
  const int w = 24, h = 16, shift = 2, n = 4;
  // Frame i+1 is frame i moved right by `shift` pixels.
  Image base(w + shift * n, h);
  for (auto& x : base.rgb) x = static_cast<std::uint8_t>(pix(rng));
  FrameSequence frames;
  for (int i = 0; i < n; ++i) {
    Image f(w, h);
    for (int r = 0; r < h; ++r) {
      for (int c = 0; c < w; ++c) {
        const int sc = c - shift * i + shift * n;
        f.set(r, c, base.at(r, sc, 0), base.at(r, sc, 1), base.at(r, sc, 2));
      }
    }
    frames.push_back(f);
  }
  const std::vector<FlowField> flows(n - 1, FlowField(w, h, shift, 0.0f));
  EXPECT_LE(warp_error(flows, frames).scaled, 1e-6);
  // The wrong direction is far from zero.
  const std::vector<FlowField> wrong(n - 1, FlowField(w, h, -shift, 0.0f));
  EXPECT_GT(warp_error(wrong, frames).scaled, 1e-3);
}

TEST(WarpErrorTest, OutOfBoundsPixelsAreSkipped) {
  FrameSequence frames = {Image(4, 1, 0), Image(4, 1, 0)};
  frames[1].set(0, 0, 255, 255, 255);
  FlowField flow(4, 1, 1.0f, 0.0f);
  // Pixel 3 maps to x = 4, outside; pixel 0 reads frame 1 at x = 1.
  const WarpError e = warp_error({flow}, frames);
  EXPECT_DOUBLE_EQ(e.raw, 0.0);
  std::vector<std::uint8_t> in_bounds;
  backward_warp(frames[1], flow, &in_bounds);
  EXPECT_EQ(in_bounds, (std::vector<std::uint8_t>{1, 1, 1, 0}));
}

TEST(WarpErrorTest, RejectsBadShapes) {
  EXPECT_EQ(error_code_of([] { warp_error({}, constant_video(1, 2, 2, 0)); }),
            ErrorCode::kValidation);
  EXPECT_EQ(error_code_of([] {
              warp_error(std::vector<FlowField>(2, FlowField(2, 2)), constant_video(2, 2, 2, 0));
            }),
            ErrorCode::kValidation);
  EXPECT_EQ(error_code_of([] { warp_error({FlowField(3, 2)}, constant_video(2, 2, 2, 0)); }),
            ErrorCode::kValidation);
}

TEST(BoxIouTest, HandComputed) {
  EXPECT_DOUBLE_EQ(box_iou(box(0, 0, 0, 2, 2), box(0, 1, 0, 3, 2)), 2.0 / 6.0);
  EXPECT_DOUBLE_EQ(box_iou(box(0, 0, 0, 1, 1), box(0, 2, 2, 3, 3)), 0.0);
  EXPECT_DOUBLE_EQ(box_iou(box(0, 0, 0, 4, 4), box(0, 0, 0, 4, 4)), 1.0);
}

TEST(DetectionF1Test, PerfectPredictions) {
  const std::vector<DetectionBox> gt = {box(0, 0, 0, 10, 10), box(1, 5, 5, 20, 20)};
  const DetectionScore s = detection_f1(gt, gt);
  EXPECT_DOUBLE_EQ(s.precision, 1.0);
  EXPECT_DOUBLE_EQ(s.recall, 1.0);
  EXPECT_DOUBLE_EQ(s.f1, 1.0);
}

TEST(DetectionF1Test, EmptySetsScoreZero) {
  const std::vector<DetectionBox> gt = {box(0, 0, 0, 10, 10)};
  const DetectionScore none = detection_f1(gt, {});
  EXPECT_EQ(none.precision, 0.0);
  EXPECT_EQ(none.recall, 0.0);
  EXPECT_EQ(none.f1, 0.0);
  const DetectionScore nothing = detection_f1({}, {});
  EXPECT_EQ(nothing.f1, 0.0);
}

TEST(DetectionF1Test, TwoGroundTruthOnePerfectPrediction) {
  const std::vector<DetectionBox> gt = {box(0, 0, 0, 10, 10), box(0, 20, 20, 30, 30)};
  const DetectionScore s = detection_f1(gt, {box(0, 20, 20, 30, 30)});
  EXPECT_DOUBLE_EQ(s.precision, 1.0);
  EXPECT_DOUBLE_EQ(s.recall, 0.5);
  EXPECT_NEAR(s.f1, 2.0 / 3.0, 1e-9);
}

TEST(DetectionF1Test, ThresholdIsStrict) {
  // IoU exactly 0.5: two unit-height boxes overlapping on two thirds of each.
  const DetectionBox g = box(0, 0, 0, 3, 1);
  const DetectionBox p = box(0, 1, 0, 4, 1);
  ASSERT_DOUBLE_EQ(box_iou(g, p), 0.5);
  EXPECT_EQ(detection_f1({g}, {p}).matches, 0u);
  EXPECT_EQ(detection_f1({g}, {p}, 0.4).matches, 1u);
}

TEST(DetectionF1Test, FramesAreMatchedSeparatelyAndLabelsIgnored) {
  const std::vector<DetectionBox> gt = {box(0, 0, 0, 10, 10, "cat")};
  EXPECT_EQ(detection_f1(gt, {box(1, 0, 0, 10, 10, "cat")}).matches, 0u);
  EXPECT_EQ(detection_f1(gt, {box(0, 0, 0, 10, 10, "dog")}).matches, 1u);
}

TEST(DetectionF1Test, GreedyTakesHighestIouFirst) {
  // One prediction overlaps both GT boxes; the better overlap wins and the
  // second prediction then matches the remaining box.
  const std::vector<DetectionBox> gt = {box(0, 0, 0, 10, 10), box(0, 1, 0, 11, 10)};
  const std::vector<DetectionBox> pred = {box(0, 1, 0, 11, 10), box(0, 0, 0, 10, 10)};
  EXPECT_EQ(detection_f1(gt, pred).matches, 2u);
}

TEST(DetectionF1Test, OrderInvarianceAndBound) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> pos(0.0, 40.0), size(4.0, 15.0);
  std::uniform_int_distribution<int> frame(0, 2);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<DetectionBox> gt, pred;
    for (int i = 0; i < 6; ++i) {
      const double x = pos(rng), y = pos(rng);
      gt.push_back(box(frame(rng), x, y, x + size(rng), y + size(rng)));
      const double px = pos(rng), py = pos(rng);
      pred.push_back(box(frame(rng), px, py, px + size(rng), py + size(rng)));
    }
    pred.push_back(gt[0]);
    const DetectionScore s = detection_f1(gt, pred);
    std::shuffle(gt.begin(), gt.end(), rng);
    std::shuffle(pred.begin(), pred.end(), rng);
    const DetectionScore t = detection_f1(gt, pred);
    EXPECT_EQ(s.matches, t.matches);
    EXPECT_DOUBLE_EQ(s.f1, t.f1);
    EXPECT_LE(s.f1, std::min(2 * s.precision, 2 * s.recall) + 1e-12);
  }
}

TEST(DetectionF1Test, MalformedBoxesAreRejected) {
  const std::vector<DetectionBox> ok = {box(0, 0, 0, 1, 1)};
  EXPECT_EQ(error_code_of([&] { detection_f1({box(0, 2, 0, 1, 1)}, ok); }),
            ErrorCode::kValidation);
  EXPECT_EQ(error_code_of([&] { detection_f1(ok, {box(0, 0, 3, 1, 3)}); }),
            ErrorCode::kValidation);
  EXPECT_EQ(error_code_of([&] { detection_f1(ok, {box(-1, 0, 0, 1, 1)}); }),
            ErrorCode::kValidation);
}

}  // namespace
}  // namespace anchor_motion
