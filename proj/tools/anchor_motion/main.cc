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

// anchor_motion: trajectories, anchor tokens, alignment and metrics from the
// command line.
//
//   anchor_motion synth   --spec scene.json --out scene/
//   anchor_motion track   --flows scene/flows --features scene/features.fmap
//                         [--mask scene/mask.pgm] [--frames scene/frames]
//                         [--keyframes 1,8,16] --out run/
//   anchor_motion select  --trajectories run/trajectories.json
//                         --features scene/features.fmap [--tau 0.65]
//                         [--l-max 64] [--strategy fps|random|external-feature]
//                         [--external-features f.fmap] [--seed 0] --out run/
//   anchor_motion align   --anchors run/anchors.json --target-features t.fmap
//                         --target-trajectories t/trajectories.json
//                         [--no-align] --out run/
//   anchor_motion metrics [--src-flows d] [--edit-flows d] [--edit-frames d]
//                         [--gt-boxes g.jsonl] [--pred-boxes p.jsonl] --out run/
//
// Exit status: 0 on success, 2 for bad input or configuration, 3 when a
// stage produces nothing (for example a mask that excludes every point).

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "commands.h"

namespace {

namespace cli = anchor_motion::cli;

template <typename T>
std::optional<T> if_given(const CLI::Option* option, const T& value) {
  return option->count() > 0 ? std::optional<T>(value) : std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anchor-token motion representation tools"};
  app.require_subcommand(1);

  cli::SynthConfig synth;
  auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic scene");
  synth_cmd->add_option("--spec", synth.spec, "Scene spec JSON")->required();
  synth_cmd->add_option("--out", synth.out, "Output directory")->required();

  cli::TrackConfig track;
  std::string track_features, track_mask, track_frames;
  int latent_height = 0, latent_width = 0;
  auto* track_cmd = app.add_subcommand("track", "Collect trajectories from optical flow");
  track_cmd->add_option("--flows", track.flows, "Directory of fwd_/bwd_ flow files")
      ->required();
  auto* features_opt =
      track_cmd->add_option("--features", track_features, "FMAP volume fixing the latent grid");
  auto* height_opt = track_cmd->add_option("--latent-height", latent_height, "Latent rows");
  auto* width_opt = track_cmd->add_option("--latent-width", latent_width, "Latent columns");
  auto* mask_opt = track_cmd->add_option("--mask", track_mask, "Subject mask (P5)");
  auto* frames_opt =
      track_cmd->add_option("--frames", track_frames, "Frame directory for overlays");
  track_cmd->add_option("--keyframes", track.keyframes, "1-based keyframes, comma separated")
      ->delimiter(',');
  track_cmd->add_option("--out", track.out, "Output directory")->required();
  features_opt->excludes(height_opt)->excludes(width_opt);

  cli::SelectConfig select;
  std::string external;
  auto* select_cmd = app.add_subcommand("select", "Select anchor tokens");
  select_cmd->add_option("--trajectories", select.trajectories, "trajectories.json")
      ->required();
  select_cmd->add_option("--features", select.features, "FMAP feature volume")->required();
  select_cmd->add_option("--tau", select.tau, "Stopping threshold")->capture_default_str();
  select_cmd->add_option("--l-max", select.l_max, "Maximum anchor count")
      ->capture_default_str();
  select_cmd->add_option("--strategy", select.strategy, "fps, random or external-feature")
      ->capture_default_str();
  auto* external_opt = select_cmd->add_option("--external-features", external,
                                              "FMAP volume for external-feature");
  select_cmd->add_option("--seed", select.seed, "Seed for the random strategy")
      ->capture_default_str();
  select_cmd->add_option("--out", select.out, "Output directory")->required();

  cli::AlignConfig align;
  std::string target_features, target_trajectories;
  bool no_align = false;
  auto* align_cmd = app.add_subcommand("align", "Match anchors to a target video");
  align_cmd->add_option("--anchors", align.anchors, "anchors.json")->required();
  auto* tf_opt =
      align_cmd->add_option("--target-features", target_features, "Target FMAP volume");
  auto* tt_opt = align_cmd->add_option("--target-trajectories", target_trajectories,
                                       "Target trajectories.json");
  align_cmd->add_flag("--no-align", no_align, "Keep source trajectories");
  align_cmd->add_option("--out", align.out, "Output directory")->required();

  cli::MetricsConfig metrics;
  std::string src_flows, edit_flows, edit_frames, gt_boxes, pred_boxes;
  auto* metrics_cmd = app.add_subcommand("metrics", "Score motion and edit metrics");
  auto* src_opt = metrics_cmd->add_option("--src-flows", src_flows, "Source flow directory");
  auto* edit_opt =
      metrics_cmd->add_option("--edit-flows", edit_flows, "Edited-video flow directory");
  auto* frames_m_opt =
      metrics_cmd->add_option("--edit-frames", edit_frames, "Edited-video frame directory");
  auto* gt_opt = metrics_cmd->add_option("--gt-boxes", gt_boxes, "Ground-truth boxes, JSONL");
  auto* pred_opt =
      metrics_cmd->add_option("--pred-boxes", pred_boxes, "Predicted boxes, JSONL");
  metrics_cmd->add_option("--iou-threshold", metrics.iou_threshold, "Match threshold")
      ->capture_default_str();
  metrics_cmd->add_option("--out", metrics.out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitInputError;
  }

  try {
    if (*synth_cmd) {
      cli::run_synth(synth, std::cout);
    } else if (*track_cmd) {
      track.features = if_given<cli::fs::path>(features_opt, track_features);
      track.latent_height = if_given(height_opt, latent_height);
      track.latent_width = if_given(width_opt, latent_width);
      track.mask = if_given<cli::fs::path>(mask_opt, track_mask);
      track.frames = if_given<cli::fs::path>(frames_opt, track_frames);
      cli::run_track(track, std::cout);
    } else if (*select_cmd) {
      select.external_features = if_given<cli::fs::path>(external_opt, external);
      cli::run_select(select, std::cout);
    } else if (*align_cmd) {
      align.align = !no_align;
      align.target_features = if_given<cli::fs::path>(tf_opt, target_features);
      align.target_trajectories = if_given<cli::fs::path>(tt_opt, target_trajectories);
      cli::run_align(align, std::cout);
    } else if (*metrics_cmd) {
      metrics.source_flows = if_given<cli::fs::path>(src_opt, src_flows);
      metrics.edited_flows = if_given<cli::fs::path>(edit_opt, edit_flows);
      metrics.edited_frames = if_given<cli::fs::path>(frames_m_opt, edit_frames);
      metrics.gt_boxes = if_given<cli::fs::path>(gt_opt, gt_boxes);
      metrics.pred_boxes = if_given<cli::fs::path>(pred_opt, pred_boxes);
      cli::run_metrics(metrics, std::cout);
    }
  } catch (...) {
    return cli::report_failure(std::cerr);
  }
  return cli::kExitOk;
}
