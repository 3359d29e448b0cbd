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

#include "commands.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <utility>

#include "anchor_motion/anchor_align.h"
#include "anchor_motion/error.h"
#include "anchor_motion/flow_tracking.h"
#include "anchor_motion/json_io.h"
#include "anchor_motion/motion_tokens.h"
#include "anchor_motion/synth_scenes.h"
#include "anchor_motion/tensor_store.h"

namespace anchor_motion::cli {
namespace {

void make_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
}

std::vector<FlowField> read_flows(const fs::path& dir, bool forward) {
  if (!fs::is_directory(dir)) fail(ErrorCode::kIo, "not a directory: " + dir.string());
  std::vector<FlowField> flows = read_flow_sequence(dir, forward);
  if (flows.empty()) {
    fail(ErrorCode::kIo, std::string("no ") + (forward ? "forward" : "backward") +
                             " flow files in " + dir.string());
  }
  return flows;
}

FeatureVolume normalized(const fs::path& path) {
  FeatureVolume volume = read_feature_volume(path);
  return volume.normalized ? volume : normalize_features(volume);
}

// Overlay for frame `frame` (0-based): one dot per trajectory at the nearest
// pixel to its latent position. Valid points are green, clamped points red.
void draw_trajectories(Image& canvas, const TrajectorySet& set, int frame) {
  const double sx = static_cast<double>(canvas.width) / set.width;
  const double sy = static_cast<double>(canvas.height) / set.height;
  for (const Trajectory& t : set.trajectories) {
    const LatentPoint p = t.positions[frame];
    const int x = std::clamp(static_cast<int>(std::lround((p.u + 0.5) * sx - 0.5)), 0,
                             canvas.width - 1);
    const int y = std::clamp(static_cast<int>(std::lround((p.v + 0.5) * sy - 0.5)), 0,
                             canvas.height - 1);
    if (t.valid[frame]) {
      canvas.set(y, x, 0, 255, 0);
    } else {
      canvas.set(y, x, 255, 0, 0);
    }
  }
}

struct Selection {
  AnchorSet anchors;
  bool audit = false;
};

Selection farthest_point(const MotionTokenSet& tokens, double tau, std::size_t l_max) {
  Selection out;
  if (tokens.size() <= kMaxMatrixTokens) {
    const DistanceMatrix dist = pairwise_distances(tokens);
    out.anchors = fps_select(dist, tau, l_max);
    out.audit = audit_selection(out.anchors, dist);
  } else {
    out.anchors = fps_select(tokens, tau, l_max);
    out.audit = audit_selection(out.anchors, tokens);
  }
  return out;
}

// Location-independent identity of an input file: name plus FNV-1a 64 digest.
Json file_identity(const fs::path& path) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (std::uint8_t byte : read_file_bytes(path)) {
    hash ^= byte;
    hash *= 0x100000001b3ull;
  }
  char hex[17];
  std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(hash));
  return Json{{"file", path.filename().string()}, {"fnv1a64", hex}};
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

void run_synth(const SynthConfig& config, std::ostream& log) {
  const SceneSpec spec = scene_spec_from_json(read_json(config.spec));
  const SceneSpec resolved = resolve_scene_spec(spec);
  const Scene scene = generate_scene(spec);
  make_dir(config.out);
  write_scene(scene, config.out);
  write_json(to_json(resolved), config.out / kSceneFile);
  log << "wrote " << resolved.frames << " frames, " << resolved.blobs.size()
      << " blobs to " << config.out.string() << "\n";
}

void run_track(const TrackConfig& config, std::ostream& log) {
  const std::vector<FlowField> fwd_pixels = read_flows(config.flows, true);
  const std::vector<FlowField> bwd_pixels = read_flows(config.flows, false);
  if (fwd_pixels.size() != bwd_pixels.size()) {
    fail(ErrorCode::kValidation, "forward and backward flow counts differ");
  }
  const int frames = static_cast<int>(fwd_pixels.size()) + 1;
  const int pixel_width = fwd_pixels.front().width;
  const int pixel_height = fwd_pixels.front().height;

  int height = config.latent_height.value_or(pixel_height);
  int width = config.latent_width.value_or(pixel_width);
  if (config.features) {
    const FeatureVolume volume = read_feature_volume(*config.features);
    if (volume.frames != frames) {
      fail(ErrorCode::kValidation, "feature volume has " + std::to_string(volume.frames) +
                                       " frames, flows imply " + std::to_string(frames));
    }
    height = volume.height;
    width = volume.width;
  }
  const std::vector<FlowField> fwd = downsample_flows(fwd_pixels, height, width);
  const std::vector<FlowField> bwd = downsample_flows(bwd_pixels, height, width);

  std::optional<SubjectMask> mask;
  if (config.mask) mask = read_mask(*config.mask);
  const std::vector<int> keyframes =
      config.keyframes.empty() ? default_keyframes(frames) : config.keyframes;

  const TrajectorySet set =
      collect_trajectories(fwd, bwd, keyframes, mask ? &*mask : nullptr);

  FrameSequence backgrounds;
  if (config.frames) {
    backgrounds = read_frames(*config.frames);
    if (static_cast<int>(backgrounds.size()) != frames) {
      fail(ErrorCode::kValidation, "frame count does not match the flows");
    }
  } else {
    backgrounds.assign(frames, Image(pixel_width, pixel_height));
  }

  make_dir(config.out);
  write_json(to_json(set), config.out / kTrajectoriesFile);
  const fs::path overlay_dir = config.out / kOverlayDir;
  make_dir(overlay_dir);
  for (int i = 0; i < frames; ++i) {
    draw_trajectories(backgrounds[i], set, i);
    char name[32];
    std::snprintf(name, sizeof(name), "overlay_%03d.ppm", i + 1);
    write_ppm(backgrounds[i], overlay_dir / name);
  }
  log << "tracked " << set.trajectories.size() << " trajectories from "
      << set.candidate_count << " candidates\n";
}

void run_select(const SelectConfig& config, std::ostream& log) {
  if (!(config.tau >= 0.0) || !std::isfinite(config.tau)) {
    fail(ErrorCode::kValidation, "tau must be a finite value >= 0");
  }
  if (config.l_max < 1) fail(ErrorCode::kValidation, "l-max must be at least 1");
  if (config.strategy != "fps" && config.strategy != "random" &&
      config.strategy != "external-feature") {
    fail(ErrorCode::kValidation, "unknown strategy '" + config.strategy + "'");
  }
  if (config.strategy == "external-feature" && !config.external_features) {
    fail(ErrorCode::kValidation, "strategy external-feature needs --external-features");
  }

  const TrajectorySet set = trajectory_set_from_json(read_json(config.trajectories));
  if (set.trajectories.empty()) fail(ErrorCode::kEmptyResult, "trajectory set is empty");
  const MotionTokenSet tokens = build_motion_tokens(set, normalized(config.features));

  Selection selection;
  if (config.strategy == "fps") {
    selection = farthest_point(tokens, config.tau, config.l_max);
  } else if (config.strategy == "external-feature") {
    const MotionTokenSet external =
        build_motion_tokens(set, normalized(*config.external_features));
    selection = farthest_point(external, config.tau, config.l_max);
  } else {
    // Same budget as farthest point sampling at this threshold.
    const std::size_t count = farthest_point(tokens, config.tau, config.l_max).anchors.size();
    selection.anchors = random_select(tokens.size(), count, config.seed);
    selection.anchors.tau = config.tau;
  }

  AnchorBundle bundle = make_anchor_bundle(selection.anchors, set, tokens);
  bundle.strategy = config.strategy;
  bundle.l_max = config.l_max;
  if (config.strategy != "random") bundle.audit = selection.audit;

  make_dir(config.out);
  write_json(to_json(bundle), config.out / kAnchorsFile);
  log << "selected " << bundle.anchors.size() << " of " << tokens.size()
      << " tokens (strategy " << config.strategy << ", tau "
      << format_double(config.tau) << ", stop "
      << stop_reason_name(selection.anchors.stop_reason) << ")\n";
  if (bundle.audit && !*bundle.audit) log << "warning: selection audit failed\n";
}

void run_align(const AlignConfig& config, std::ostream& log) {
  const AnchorBundle bundle = anchor_bundle_from_json(read_json(config.anchors));
  InjectionSchedule schedule;
  Json target_volume = nullptr;
  if (!config.align) {
    schedule = unaligned_schedule(bundle);
  } else {
    if (!config.target_features || !config.target_trajectories) {
      fail(ErrorCode::kValidation,
           "alignment needs --target-features and --target-trajectories (or --no-align)");
    }
    const TrajectorySet target = trajectory_set_from_json(read_json(*config.target_trajectories));
    if (target.trajectories.empty()) {
      fail(ErrorCode::kEmptyResult, "target trajectory set is empty");
    }
    const MotionTokenSet tokens =
        build_motion_tokens(target, normalized(*config.target_features));
    schedule = relocate(bundle, match_anchors(bundle, tokens), target);
    target_volume = file_identity(*config.target_features);
  }
  make_dir(config.out);
  Json out = to_json(schedule);
  out["target_volume"] = target_volume;
  write_json(out, config.out / kScheduleFile);
  log << "scheduled " << schedule.anchors.size() << " anchors ("
      << (schedule.alignment_applied ? "aligned" : "unaligned") << ")\n";
}

void run_metrics(const MetricsConfig& config, std::ostream& log) {
  MetricReport report;
  std::optional<std::vector<FlowField>> source;
  if (config.source_flows) source = read_flows(*config.source_flows, true);
  if (source && config.edited_flows) {
    report.flow_similarity = flow_similarity(*source, read_flows(*config.edited_flows, true));
  }
  if (source && config.edited_frames) {
    report.warp_error = warp_error(*source, read_frames(*config.edited_frames));
  }
  if (config.gt_boxes && config.pred_boxes) {
    report.detection = detection_f1(read_detection_boxes(*config.gt_boxes),
                                    read_detection_boxes(*config.pred_boxes),
                                    config.iou_threshold);
  }
  make_dir(config.out);
  write_json(to_json(report), config.out / kMetricsFile);
  log << "flow_similarity "
      << (report.flow_similarity ? format_double(report.flow_similarity->value) : "null")
      << ", warp_error "
      << (report.warp_error ? format_double(report.warp_error->scaled) : "null") << ", f1 "
      << (report.detection ? format_double(report.detection->f1) : "null") << "\n";
}

int report_failure(std::ostream& err) {
  try {
    throw;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kEmptyResult ? kExitEmptyResult : kExitInputError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }
}

}  // namespace anchor_motion::cli
