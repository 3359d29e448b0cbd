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

// Synthetic videos with analytically known motion and features.
//
// A scene is a set of disc-shaped blobs translating at constant velocity
// over a static background, defined on the latent grid. A latent cell (r, c)
// belongs to a blob in frame i when its distance to the blob center is at
// most the radius. Every pixel inherits the membership of the latent cell it
// falls in (pixel_scale x pixel_scale pixels per cell), so downsampled flow
// is exact.

#ifndef ANCHOR_MOTION_SYNTH_SCENES_H_
#define ANCHOR_MOTION_SYNTH_SCENES_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "anchor_motion/flow_tracking.h"
#include "anchor_motion/tensor_store.h"

namespace anchor_motion {

struct BlobSpec {
  LatentPoint start;     // Center at frame 1, latent units.
  LatentPoint velocity;  // Latent cells per frame.
  double radius = 2.0;
  std::vector<double> signature;  // Unit C-vector; empty = drawn from the rng.
  std::array<std::uint8_t, 3> color{255, 255, 255};

  LatentPoint center(int frame) const {
    return {start.u + velocity.u * (frame - 1), start.v + velocity.v * (frame - 1)};
  }
};

struct SceneSpec {
  int frames = 16;
  int latent_height = 32;
  int latent_width = 32;
  int pixel_scale = 4;
  int channels = 8;
  std::vector<BlobSpec> blobs;
  std::vector<double> background_signature;  // Empty = zero vector.
  std::array<std::uint8_t, 3> background_color{0, 0, 0};
  // Amplitude of a static per-pixel texture added to the background.
  int background_noise = 0;
  std::vector<int> keyframes;  // Mask keyframes; empty = {1, N/2, N}.
  bool require_in_frame = true;
  std::uint64_t rng_seed = 0;
};

struct Scene {
  FrameSequence frames;
  std::vector<FlowField> forward_flows;   // Pixel resolution.
  std::vector<FlowField> backward_flows;  // Pixel resolution.
  FeatureVolume features;                 // Raw, latent resolution.
  SubjectMask mask;                       // Union of supports at the keyframes.
};

// Fills in rng-drawn signatures and the zero background; throws
// ErrorCode::kValidation for inconsistent specs, including blobs whose
// supports ever overlap.
SceneSpec resolve_scene_spec(const SceneSpec& spec);

Scene generate_scene(const SceneSpec& spec);

// Writes frames/, flows/, features.fmap and mask.pgm under `dir`.
void write_scene(const Scene& scene, const std::filesystem::path& dir);

bool in_blob(const BlobSpec& blob, int frame, int row, int col);

struct GroundTruth {
  std::vector<std::vector<LatentPoint>> blob_paths;  // [blob][frame]
  // Token distance between two tracked points on blobs a and b:
  // 1 - <unit(s_a - bg), unit(s_b - bg)>, row-major B x B.
  std::vector<double> blob_distances;
  std::size_t blob_count = 0;

  double blob_distance(std::size_t a, std::size_t b) const {
    return blob_distances[a * blob_count + b];
  }
  // Greedy selection over blob-level distances with the same seed, tie and
  // stop rules as the anchor selector; assumes tokens within a blob coincide.
  std::size_t expected_anchor_count(double tau) const;
};

GroundTruth ground_truth(const SceneSpec& spec);

// Global affine motion x' = x + A x + t in latent units; used to check
// tracking against closed-form trajectories.
struct AffineMotion {
  double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;
  double tu = 0.0, tv = 0.0;

  LatentPoint forward(LatentPoint p) const;
  LatentPoint backward(LatentPoint p) const;  // Inverse of forward.
};

struct FlowSequences {
  std::vector<FlowField> forward;
  std::vector<FlowField> backward;
};

FlowSequences affine_flows(int frames, int height, int width, const AffineMotion& motion);

// Closed-form positions for a point seeded at (col, row) on `keyframe`.
std::vector<LatentPoint> affine_trajectory(const AffineMotion& motion, GridCell seed,
                                           int keyframe, int frames);

// I.i.d. uniform flow in [-amplitude, amplitude] per cell and component.
FlowSequences random_flows(int frames, int height, int width, double amplitude,
                           std::uint64_t seed);

}  // namespace anchor_motion

#endif  // ANCHOR_MOTION_SYNTH_SCENES_H_
