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

// Motion tokens: per-frame feature vectors sampled along a trajectory.
//
// Features are first centered over time at every location. Each sampled
// frame vector is then L2-normalized (zero stays zero) and the distance
// between two tokens is
//
//   d(a, b) = 1 - (1/N) * sum_i <a_i, b_i>
//
// which is 0 for identical tokens, 1 for frame-wise orthogonal tokens and 2
// for antipodal ones.

#ifndef ANCHOR_MOTION_MOTION_TOKENS_H_
#define ANCHOR_MOTION_MOTION_TOKENS_H_

#include <cstddef>
#include <span>
#include <vector>

#include "anchor_motion/flow_tracking.h"
#include "anchor_motion/tensor_store.h"

namespace anchor_motion {

struct MotionToken {
  std::size_t trajectory_index = 0;
  int frames = 0;
  int channels = 0;
  std::vector<double> features;  // frames x channels, row-major.

  std::span<const double> row(int frame) const {
    return {features.data() + static_cast<std::size_t>(frame) * channels,
            static_cast<std::size_t>(channels)};
  }

  bool operator==(const MotionToken&) const = default;
};

struct MotionTokenSet {
  int frames = 0;
  int channels = 0;
  std::vector<MotionToken> tokens;  // tokens[k] belongs to trajectory k.

  std::size_t size() const { return tokens.size(); }
};

// Dense symmetric K x K matrix, row-major.
class DistanceMatrix {
 public:
  DistanceMatrix() = default;
  explicit DistanceMatrix(std::size_t size)
      : size_(size), values_(size * size, 0.0) {}

  std::size_t size() const { return size_; }
  double at(std::size_t i, std::size_t j) const { return values_[i * size_ + j]; }
  void set(std::size_t i, std::size_t j, double value) { values_[i * size_ + j] = value; }
  std::span<const double> row(std::size_t i) const {
    return {values_.data() + i * size_, size_};
  }

  bool operator==(const DistanceMatrix&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<double> values_;
};

// Subtracts the per-location, per-channel mean over frames. Rejects a volume
// already flagged as normalized.
FeatureVolume normalize_features(const FeatureVolume& raw);

// Bilinear feature lookup at a continuous latent position in one frame.
std::vector<double> sample_features(const FeatureVolume& volume, int frame,
                                    LatentPoint pos);

MotionToken build_motion_token(const Trajectory& trajectory,
                               const FeatureVolume& normalized,
                               std::size_t trajectory_index = 0);

MotionTokenSet build_motion_tokens(const TrajectorySet& trajectories,
                                   const FeatureVolume& normalized);

double token_distance(const MotionToken& a, const MotionToken& b);

// Entries computed independently per pair, so the result does not depend on
// the thread count. Diagonal is exactly zero.
DistanceMatrix pairwise_distances(const MotionTokenSet& tokens);

}  // namespace anchor_motion

#endif  // ANCHOR_MOTION_MOTION_TOKENS_H_
