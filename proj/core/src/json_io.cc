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

#include "anchor_motion/json_io.h"

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "anchor_motion/error.h"
#include "anchor_motion/tensor_store.h"

namespace anchor_motion {
namespace {

namespace fs = std::filesystem;

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) fail(ErrorCode::kFormat, std::string("expected an object with '") + key + "'");
  auto it = j.find(key);
  if (it == j.end()) fail(ErrorCode::kFormat, std::string("missing key '") + key + "'");
  return *it;
}

template <typename T>
T get(const Json& j, const char* key) {
  return field(j, key).get<T>();
}

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  return it->get<T>();
}

// Runs a parser and reports library exceptions as format errors.
template <typename F>
auto parse_guarded(const char* what, F&& parse) {
  try {
    return parse();
  } catch (const Json::exception& e) {
    fail(ErrorCode::kFormat, std::string("malformed ") + what + ": " + e.what());
  }
}

Json positions_json(const std::vector<LatentPoint>& positions) {
  Json out = Json::array();
  for (const LatentPoint& p : positions) out.push_back({p.u, p.v});
  return out;
}

std::vector<LatentPoint> positions_from_json(const Json& j) {
  std::vector<LatentPoint> out;
  for (const Json& p : j) {
    if (!p.is_array() || p.size() != 2) fail(ErrorCode::kFormat, "position must be [u, v]");
    out.push_back({p[0].get<double>(), p[1].get<double>()});
    if (!std::isfinite(out.back().u) || !std::isfinite(out.back().v)) {
      fail(ErrorCode::kValidation, "non-finite trajectory position");
    }
  }
  return out;
}

Json seed_cell_json(GridCell cell) { return Json::array({cell.row, cell.col}); }

GridCell seed_cell_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 2) fail(ErrorCode::kFormat, "seed_cell must be [r, c]");
  return {j[0].get<int>(), j[1].get<int>()};
}

MotionToken token_from_flat(const Json& j, std::size_t index, int frames, int channels) {
  MotionToken token;
  token.trajectory_index = index;
  token.frames = frames;
  token.channels = channels;
  token.features = j.get<std::vector<double>>();
  if (token.features.size() != static_cast<std::size_t>(frames) * channels) {
    fail(ErrorCode::kValidation, "token feature length does not match n*c");
  }
  return token;
}

Json token_rows_json(const MotionToken& token) {
  Json rows = Json::array();
  for (int i = 0; i < token.frames; ++i) {
    auto r = token.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

MotionToken token_from_rows(const Json& rows, std::size_t index, int frames, int channels) {
  MotionToken token;
  token.trajectory_index = index;
  token.frames = frames;
  token.channels = channels;
  if (!rows.is_array() || rows.size() != static_cast<std::size_t>(frames)) {
    fail(ErrorCode::kValidation, "features must have one row per frame");
  }
  for (const Json& row : rows) {
    auto values = row.get<std::vector<double>>();
    if (values.size() != static_cast<std::size_t>(channels)) {
      fail(ErrorCode::kValidation, "feature row has the wrong width");
    }
    token.features.insert(token.features.end(), values.begin(), values.end());
  }
  return token;
}

Json optional_number(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

}  // namespace

Json to_json(const Trajectory& t) {
  Json j;
  j["seed_keyframe"] = t.seed_keyframe;
  j["seed_cell"] = seed_cell_json(t.seed_cell);
  j["positions"] = positions_json(t.positions);
  j["valid"] = std::vector<bool>(t.valid.begin(), t.valid.end());
  return j;
}

Trajectory trajectory_from_json(const Json& j, int frames) {
  return parse_guarded("trajectory", [&] {
    Trajectory t;
    t.seed_keyframe = get<int>(j, "seed_keyframe");
    t.seed_cell = seed_cell_from_json(field(j, "seed_cell"));
    t.positions = positions_from_json(field(j, "positions"));
    t.valid = get<std::vector<bool>>(j, "valid");
    if (t.positions.size() != static_cast<std::size_t>(frames) ||
        t.valid.size() != static_cast<std::size_t>(frames)) {
      fail(ErrorCode::kValidation, "trajectory length does not match n");
    }
    if (t.seed_keyframe < 1 || t.seed_keyframe > frames) {
      fail(ErrorCode::kValidation, "seed_keyframe out of range");
    }
    return t;
  });
}

Json to_json(const TrajectorySet& set) {
  Json j;
  j["n"] = set.frames;
  j["h"] = set.height;
  j["w"] = set.width;
  j["candidate_count"] = set.candidate_count;
  Json list = Json::array();
  for (const Trajectory& t : set.trajectories) list.push_back(to_json(t));
  j["trajectories"] = std::move(list);
  return j;
}

TrajectorySet trajectory_set_from_json(const Json& j) {
  return parse_guarded("trajectory set", [&] {
    TrajectorySet set;
    set.frames = get<int>(j, "n");
    set.height = get<int>(j, "h");
    set.width = get<int>(j, "w");
    if (set.frames < 2 || set.height < 1 || set.width < 1) {
      fail(ErrorCode::kValidation, "trajectory set has invalid dimensions");
    }
    set.candidate_count = get_or<std::size_t>(j, "candidate_count", 0);
    for (const Json& t : field(j, "trajectories")) {
      set.trajectories.push_back(trajectory_from_json(t, set.frames));
    }
    return set;
  });
}

Json to_json(const AnchorBundle& bundle) {
  Json j;
  j["n"] = bundle.frames;
  j["h"] = bundle.height;
  j["w"] = bundle.width;
  j["c"] = bundle.channels;
  j["tau"] = bundle.tau;
  j["l_max"] = bundle.l_max;
  j["seed_rule"] = bundle.seed_rule;
  j["strategy"] = bundle.strategy;
  j["audit"] = bundle.audit ? Json(*bundle.audit) : Json(nullptr);
  Json indices = Json::array();
  Json trajectories = Json::array();
  Json features = Json::array();
  for (const AnchorRecord& a : bundle.anchors) {
    indices.push_back(a.index);
    trajectories.push_back(to_json(a.trajectory));
    features.push_back(a.token.features);
  }
  j["L"] = bundle.anchors.size();
  j["indices"] = std::move(indices);
  j["trajectories"] = std::move(trajectories);
  j["token_features"] = std::move(features);
  return j;
}

AnchorBundle anchor_bundle_from_json(const Json& j) {
  return parse_guarded("anchor set", [&] {
    AnchorBundle bundle;
    bundle.frames = get<int>(j, "n");
    bundle.height = get<int>(j, "h");
    bundle.width = get<int>(j, "w");
    bundle.channels = get<int>(j, "c");
    if (bundle.frames < 2 || bundle.height < 1 || bundle.width < 1 || bundle.channels < 1) {
      fail(ErrorCode::kValidation, "anchor set has invalid dimensions");
    }
    bundle.tau = get<double>(j, "tau");
    bundle.l_max = get_or<std::size_t>(j, "l_max", kDefaultMaxAnchors);
    bundle.seed_rule = get<std::string>(j, "seed_rule");
    bundle.strategy = get_or<std::string>(j, "strategy", "fps");
    if (auto it = j.find("audit"); it != j.end() && !it->is_null()) {
      bundle.audit = it->get<bool>();
    }
    const Json& indices = field(j, "indices");
    const Json& trajectories = field(j, "trajectories");
    const Json& features = field(j, "token_features");
    if (indices.size() != trajectories.size() || indices.size() != features.size()) {
      fail(ErrorCode::kValidation, "anchor arrays differ in length");
    }
    if (get_or<std::size_t>(j, "L", indices.size()) != indices.size()) {
      fail(ErrorCode::kValidation, "anchor count L does not match indices");
    }
    for (std::size_t k = 0; k < indices.size(); ++k) {
      const auto index = indices[k].get<std::size_t>();
      bundle.anchors.push_back(
          {index, trajectory_from_json(trajectories[k], bundle.frames),
           token_from_flat(features[k], index, bundle.frames, bundle.channels)});
    }
    return bundle;
  });
}

Json to_json(const InjectionSchedule& schedule) {
  Json j;
  j["n"] = schedule.frames;
  j["h"] = schedule.height;
  j["w"] = schedule.width;
  j["c"] = schedule.anchors.empty() ? 0 : schedule.anchors.front().token.channels;
  j["alignment_applied"] = schedule.alignment_applied;
  Json anchors = Json::array();
  for (const ScheduledAnchor& a : schedule.anchors) {
    Json e;
    e["source_index"] = a.source_index;
    e["target_index"] = a.target_index ? Json(*a.target_index) : Json(nullptr);
    e["match_distance"] = optional_number(a.match_distance);
    e["trajectory"] = positions_json(a.trajectory.positions);
    e["valid"] = std::vector<bool>(a.trajectory.valid.begin(), a.trajectory.valid.end());
    e["seed_keyframe"] = a.trajectory.seed_keyframe;
    e["seed_cell"] = seed_cell_json(a.trajectory.seed_cell);
    e["features"] = token_rows_json(a.token);
    anchors.push_back(std::move(e));
  }
  j["anchors"] = std::move(anchors);
  return j;
}

InjectionSchedule injection_schedule_from_json(const Json& j) {
  return parse_guarded("injection schedule", [&] {
    InjectionSchedule schedule;
    schedule.frames = get<int>(j, "n");
    schedule.height = get<int>(j, "h");
    schedule.width = get<int>(j, "w");
    const int channels = get<int>(j, "c");
    schedule.alignment_applied = get<bool>(j, "alignment_applied");
    for (const Json& e : field(j, "anchors")) {
      ScheduledAnchor a;
      a.source_index = get<std::size_t>(e, "source_index");
      if (auto it = e.find("target_index"); it != e.end() && !it->is_null()) {
        a.target_index = it->get<std::size_t>();
      }
      if (auto it = e.find("match_distance"); it != e.end() && !it->is_null()) {
        a.match_distance = it->get<double>();
      }
      a.trajectory.positions = positions_from_json(field(e, "trajectory"));
      a.trajectory.valid = get_or<std::vector<bool>>(
          e, "valid", std::vector<bool>(a.trajectory.positions.size(), true));
      a.trajectory.seed_keyframe = get_or<int>(e, "seed_keyframe", 1);
      if (auto it = e.find("seed_cell"); it != e.end()) {
        a.trajectory.seed_cell = seed_cell_from_json(*it);
      }
      if (a.trajectory.positions.size() != static_cast<std::size_t>(schedule.frames) ||
          a.trajectory.valid.size() != a.trajectory.positions.size()) {
        fail(ErrorCode::kValidation, "schedule trajectory length does not match n");
      }
      a.token = token_from_rows(field(e, "features"), a.source_index, schedule.frames, channels);
      schedule.anchors.push_back(std::move(a));
    }
    return schedule;
  });
}

Json to_json(const MetricReport& report) {
  Json j;
  if (report.flow_similarity) {
    j["flow_similarity"] = report.flow_similarity->value;
    j["flow_similarity_degenerate"] = report.flow_similarity->degenerate;
    j["flow_pixels"] = report.flow_similarity->pixels_used;
  } else {
    j["flow_similarity"] = nullptr;
    j["flow_similarity_degenerate"] = nullptr;
    j["flow_pixels"] = nullptr;
  }
  if (report.warp_error) {
    j["warp_error_scaled"] = report.warp_error->scaled;
    j["warp_error_raw"] = report.warp_error->raw;
  } else {
    j["warp_error_scaled"] = nullptr;
    j["warp_error_raw"] = nullptr;
  }
  if (report.detection) {
    j["precision"] = report.detection->precision;
    j["recall"] = report.detection->recall;
    j["f1"] = report.detection->f1;
    j["detection_matches"] = report.detection->matches;
  } else {
    j["precision"] = nullptr;
    j["recall"] = nullptr;
    j["f1"] = nullptr;
    j["detection_matches"] = nullptr;
  }
  return j;
}

Json to_json(const DetectionBox& box) {
  return {{"frame", box.frame},   {"x_min", box.x_min}, {"y_min", box.y_min},
          {"x_max", box.x_max},   {"y_max", box.y_max}, {"label", box.label}};
}

DetectionBox detection_box_from_json(const Json& j) {
  return parse_guarded("detection box", [&] {
    DetectionBox box;
    box.frame = get<int>(j, "frame");
    box.x_min = get<double>(j, "x_min");
    box.y_min = get<double>(j, "y_min");
    box.x_max = get<double>(j, "x_max");
    box.y_max = get<double>(j, "y_max");
    box.label = get_or<std::string>(j, "label", "");
    return box;
  });
}

std::vector<DetectionBox> read_detection_boxes(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<DetectionBox> boxes;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      fail(ErrorCode::kFormat, path.string() + ":" + std::to_string(line_no) + ": invalid JSON");
    }
    boxes.push_back(detection_box_from_json(j));
  }
  return boxes;
}

SceneSpec scene_spec_from_json(const Json& j) {
  return parse_guarded("scene spec", [&] {
    auto point = [](const Json& p) -> LatentPoint {
      if (!p.is_array() || p.size() != 2) fail(ErrorCode::kFormat, "expected [u, v]");
      return {p[0].get<double>(), p[1].get<double>()};
    };
    SceneSpec spec;
    spec.frames = get_or<int>(j, "frames", spec.frames);
    spec.latent_height = get_or<int>(j, "latent_height", spec.latent_height);
    spec.latent_width = get_or<int>(j, "latent_width", spec.latent_width);
    spec.pixel_scale = get_or<int>(j, "pixel_scale", spec.pixel_scale);
    spec.channels = get_or<int>(j, "channels", spec.channels);
    spec.background_signature =
        get_or<std::vector<double>>(j, "background_signature", {});
    spec.background_color =
        get_or<std::array<std::uint8_t, 3>>(j, "background_color", spec.background_color);
    spec.background_noise = get_or<int>(j, "background_noise", 0);
    spec.keyframes = get_or<std::vector<int>>(j, "keyframes", {});
    spec.require_in_frame = get_or<bool>(j, "require_in_frame", true);
    spec.rng_seed = get_or<std::uint64_t>(j, "rng_seed", 0);
    for (const Json& b : field(j, "blobs")) {
      BlobSpec blob;
      blob.start = point(field(b, "start"));
      blob.velocity = point(field(b, "velocity"));
      blob.radius = get<double>(b, "radius");
      blob.signature = get_or<std::vector<double>>(b, "signature", {});
      blob.color = get_or<std::array<std::uint8_t, 3>>(b, "color", blob.color);
      spec.blobs.push_back(std::move(blob));
    }
    return spec;
  });
}

Json to_json(const SceneSpec& spec) {
  Json j;
  j["frames"] = spec.frames;
  j["latent_height"] = spec.latent_height;
  j["latent_width"] = spec.latent_width;
  j["pixel_scale"] = spec.pixel_scale;
  j["channels"] = spec.channels;
  j["background_signature"] = spec.background_signature;
  j["background_color"] = spec.background_color;
  j["background_noise"] = spec.background_noise;
  j["keyframes"] = spec.keyframes;
  j["require_in_frame"] = spec.require_in_frame;
  j["rng_seed"] = spec.rng_seed;
  Json blobs = Json::array();
  for (const BlobSpec& b : spec.blobs) {
    blobs.push_back({{"start", {b.start.u, b.start.v}},
                     {"velocity", {b.velocity.u, b.velocity.v}},
                     {"radius", b.radius},
                     {"signature", b.signature},
                     {"color", b.color}});
  }
  j["blobs"] = std::move(blobs);
  return j;
}

Json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  Json j = Json::parse(buffer.str(), nullptr, false);
  if (j.is_discarded()) fail(ErrorCode::kFormat, path.string() + ": invalid JSON");
  return j;
}

void write_json(const Json& j, const fs::path& path) {
  const std::string text = j.dump(2) + "\n";
  write_file_bytes({reinterpret_cast<const std::uint8_t*>(text.data()), text.size()}, path);
}

}  // namespace anchor_motion
