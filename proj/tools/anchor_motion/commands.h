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

// Subcommands of the anchor_motion tool. Each reads its inputs, writes its
// outputs under `out` and throws anchor_motion::Error on failure.

#ifndef ANCHOR_MOTION_TOOLS_COMMANDS_H_
#define ANCHOR_MOTION_TOOLS_COMMANDS_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "anchor_motion/anchor_select.h"
#include "anchor_motion/eval_metrics.h"

namespace anchor_motion::cli {

namespace fs = std::filesystem;

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitEmptyResult = 3;

// Above this many tokens the selector streams distances instead of
// materializing the K x K matrix.
inline constexpr std::size_t kMaxMatrixTokens = 4096;

inline constexpr const char* kTrajectoriesFile = "trajectories.json";
inline constexpr const char* kAnchorsFile = "anchors.json";
inline constexpr const char* kScheduleFile = "schedule.json";
inline constexpr const char* kMetricsFile = "metrics.json";
inline constexpr const char* kSceneFile = "scene.json";
inline constexpr const char* kOverlayDir = "overlay";

struct SynthConfig {
  fs::path spec;
  fs::path out;
};

struct TrackConfig {
  fs::path flows;
  std::optional<fs::path> features;  // Latent grid taken from the volume.
  std::optional<int> latent_height;
  std::optional<int> latent_width;
  std::optional<fs::path> mask;
  std::optional<fs::path> frames;  // Overlay backgrounds.
  std::vector<int> keyframes;      // Empty = {1, N/2, N}.
  fs::path out;
};

struct SelectConfig {
  fs::path trajectories;
  fs::path features;
  double tau = kDefaultTau;
  std::size_t l_max = kDefaultMaxAnchors;
  std::string strategy = "fps";
  std::optional<fs::path> external_features;
  std::uint64_t seed = 0;
  fs::path out;
};

struct AlignConfig {
  fs::path anchors;
  std::optional<fs::path> target_features;
  std::optional<fs::path> target_trajectories;
  bool align = true;
  fs::path out;
};

struct MetricsConfig {
  std::optional<fs::path> source_flows;
  std::optional<fs::path> edited_flows;
  std::optional<fs::path> edited_frames;
  std::optional<fs::path> gt_boxes;
  std::optional<fs::path> pred_boxes;
  double iou_threshold = kDefaultIouThreshold;
  fs::path out;
};

void run_synth(const SynthConfig& config, std::ostream& log);
void run_track(const TrackConfig& config, std::ostream& log);
void run_select(const SelectConfig& config, std::ostream& log);
void run_align(const AlignConfig& config, std::ostream& log);
void run_metrics(const MetricsConfig& config, std::ostream& log);

// Maps an exception escaping a subcommand to a process exit code and prints
// the diagnostic to `err`.
int report_failure(std::ostream& err);

}  // namespace anchor_motion::cli

#endif  // ANCHOR_MOTION_TOOLS_COMMANDS_H_
