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

// Anchor selection by farthest point sampling over token distances.
//
// The seed is the token with the largest distance row sum. Each following
// step picks the unselected token whose minimum distance to the selected set
// is largest. Selection stops before adding a candidate whose minimum
// distance is below tau, at l_max anchors, or when every token is selected.
// All ties go to the lowest index.

#ifndef ANCHOR_MOTION_ANCHOR_SELECT_H_
#define ANCHOR_MOTION_ANCHOR_SELECT_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "anchor_motion/flow_tracking.h"
#include "anchor_motion/motion_tokens.h"

namespace anchor_motion {

inline constexpr double kDefaultTau = 0.65;
inline constexpr std::size_t kDefaultMaxAnchors = 64;
inline constexpr std::string_view kSeedRuleMaxRowSum = "max-row-sum";
inline constexpr std::string_view kSeedRuleRandom = "random";
// Absolute tolerance for the symmetry and zero-diagonal checks.
inline constexpr double kDistanceMatrixTolerance = 1e-6;

enum class StopReason { kThreshold, kMaxAnchors, kExhausted };

std::string_view stop_reason_name(StopReason reason);

struct AnchorSet {
  std::vector<std::size_t> indices;  // Selection order.
  double tau = kDefaultTau;
  std::size_t l_max = kDefaultMaxAnchors;
  std::string seed_rule{kSeedRuleMaxRowSum};
  StopReason stop_reason = StopReason::kExhausted;

  std::size_t size() const { return indices.size(); }
};

// Throws ErrorCode::kValidation for an empty, asymmetric or non-zero-diagonal
// matrix.
void validate_distance_matrix(const DistanceMatrix& dist);

AnchorSet fps_select(const DistanceMatrix& dist, double tau = kDefaultTau,
                     std::size_t l_max = kDefaultMaxAnchors);

// Same selection without materializing the K x K matrix; distances are
// evaluated on demand with token_distance. Bit-identical to
// fps_select(pairwise_distances(tokens), ...).
AnchorSet fps_select(const MotionTokenSet& tokens, double tau = kDefaultTau,
                     std::size_t l_max = kDefaultMaxAnchors);

// True iff every step of `anchors` follows the seed rule, the argmax-min
// criterion with lowest-index ties, and the stop condition.
bool audit_selection(const AnchorSet& anchors, const DistanceMatrix& dist);
bool audit_selection(const AnchorSet& anchors, const MotionTokenSet& tokens);

// Uniform random subset of `count` indices out of `token_count`, seeded.
// Baseline for ablations; the order is the draw order.
AnchorSet random_select(std::size_t token_count, std::size_t count, std::uint64_t seed);

// Selected anchors with their trajectories and token features; the persisted
// anchors.json payload.
struct AnchorRecord {
  std::size_t index = 0;  // Into the source trajectory/token set.
  Trajectory trajectory;
  MotionToken token;

  bool operator==(const AnchorRecord&) const = default;
};

struct AnchorBundle {
  int frames = 0;
  int height = 0;
  int width = 0;
  int channels = 0;
  double tau = kDefaultTau;
  std::size_t l_max = kDefaultMaxAnchors;
  std::string seed_rule{kSeedRuleMaxRowSum};
  std::string strategy = "fps";
  std::optional<bool> audit;
  std::vector<AnchorRecord> anchors;

  bool operator==(const AnchorBundle&) const = default;
};

AnchorBundle make_anchor_bundle(const AnchorSet& anchors,
                                const TrajectorySet& trajectories,
                                const MotionTokenSet& tokens);

}  // namespace anchor_motion

#endif  // ANCHOR_MOTION_ANCHOR_SELECT_H_
