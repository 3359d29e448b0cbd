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

#include "anchor_motion/synth_scenes.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "anchor_motion/error.h"

namespace anchor_motion {
namespace {

namespace fs = std::filesystem;

// Portable draws: std distributions are implementation-defined, the raw
// mt19937_64 stream is not.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<double> random_unit_vector(std::mt19937_64& rng, int dim) {
  std::vector<double> v(static_cast<std::size_t>(dim));
  double norm = 0.0;
  while (norm < 1e-6) {
    norm = 0.0;
    for (double& x : v) {
      x = standard_normal(rng);
      norm += x * x;
    }
    norm = std::sqrt(norm);
  }
  for (double& x : v) x /= norm;
  return v;
}

double norm_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

bool same_vector(const std::vector<double>& a, const std::vector<double>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i] - b[i]) > 1e-12) return false;
  }
  return true;
}

// Index of the blob covering (row, col) at `frame`, or -1.
int blob_at(const SceneSpec& spec, int frame, int row, int col) {
  for (std::size_t b = 0; b < spec.blobs.size(); ++b) {
    if (in_blob(spec.blobs[b], frame, row, col)) return static_cast<int>(b);
  }
  return -1;
}

std::uint8_t clamp_u8(int x) { return static_cast<std::uint8_t>(std::clamp(x, 0, 255)); }

}  // namespace

bool in_blob(const BlobSpec& blob, int frame, int row, int col) {
  const LatentPoint c = blob.center(frame);
  const double du = col - c.u;
  const double dv = row - c.v;
  return du * du + dv * dv <= blob.radius * blob.radius;
}

SceneSpec resolve_scene_spec(const SceneSpec& input) {
  SceneSpec spec = input;
  if (spec.frames < 2) fail(ErrorCode::kValidation, "scene needs at least 2 frames");
  if (spec.latent_height < 1 || spec.latent_width < 1 || spec.pixel_scale < 1 ||
      spec.channels < 1) {
    fail(ErrorCode::kValidation, "scene dimensions must be positive");
  }
  if (spec.background_noise < 0 || spec.background_noise > 255) {
    fail(ErrorCode::kValidation, "background_noise must be in [0, 255]");
  }
  if (spec.background_signature.empty()) {
    spec.background_signature.assign(static_cast<std::size_t>(spec.channels), 0.0);
  }
  if (spec.background_signature.size() != static_cast<std::size_t>(spec.channels)) {
    fail(ErrorCode::kValidation, "background signature has the wrong dimension");
  }
  if (spec.keyframes.empty()) spec.keyframes = default_keyframes(spec.frames);
  for (int k : spec.keyframes) {
    if (k < 1 || k > spec.frames) fail(ErrorCode::kValidation, "scene keyframe out of range");
  }

  std::mt19937_64 rng(spec.rng_seed);
  for (std::size_t b = 0; b < spec.blobs.size(); ++b) {
    BlobSpec& blob = spec.blobs[b];
    const std::string name = "blob " + std::to_string(b);
    if (!(blob.radius > 0.0)) fail(ErrorCode::kValidation, name + " needs a positive radius");
    if (blob.signature.empty()) blob.signature = random_unit_vector(rng, spec.channels);
    if (blob.signature.size() != static_cast<std::size_t>(spec.channels)) {
      fail(ErrorCode::kValidation, name + " signature has the wrong dimension");
    }
    if (std::abs(norm_of(blob.signature) - 1.0) > 1e-6) {
      fail(ErrorCode::kValidation, name + " signature is not a unit vector");
    }
    if (same_vector(blob.signature, spec.background_signature)) {
      fail(ErrorCode::kValidation, name + " signature equals the background");
    }
    for (std::size_t o = 0; o < b; ++o) {
      if (same_vector(blob.signature, spec.blobs[o].signature)) {
        fail(ErrorCode::kValidation, "blobs " + std::to_string(o) + " and " +
                                         std::to_string(b) + " share a signature");
      }
    }
    if (spec.require_in_frame) {
      for (int i = 1; i <= spec.frames; ++i) {
        const LatentPoint c = blob.center(i);
        if (c.u - blob.radius < 0.0 || c.v - blob.radius < 0.0 ||
            c.u + blob.radius > spec.latent_width - 1 ||
            c.v + blob.radius > spec.latent_height - 1) {
          fail(ErrorCode::kValidation,
               name + " leaves the frame at frame " + std::to_string(i));
        }
      }
    }
  }

  for (int i = 1; i <= spec.frames; ++i) {
    for (int r = 0; r < spec.latent_height; ++r) {
      for (int c = 0; c < spec.latent_width; ++c) {
        int covering = 0;
        for (const BlobSpec& blob : spec.blobs) covering += in_blob(blob, i, r, c) ? 1 : 0;
        if (covering > 1) {
          fail(ErrorCode::kValidation, "blobs overlap at frame " + std::to_string(i) +
                                           " cell (" + std::to_string(r) + ", " +
                                           std::to_string(c) + ")");
        }
      }
    }
  }
  return spec;
}

Scene generate_scene(const SceneSpec& input) {
  const SceneSpec spec = resolve_scene_spec(input);
  const int s = spec.pixel_scale;
  const int ph = spec.latent_height * s;
  const int pw = spec.latent_width * s;

  // Texture draws come after the signature draws in the same stream.
  std::mt19937_64 rng(spec.rng_seed);
  for (const BlobSpec& blob : input.blobs) {
    if (blob.signature.empty()) random_unit_vector(rng, spec.channels);
  }
  std::vector<int> texture(static_cast<std::size_t>(ph) * pw, 0);
  if (spec.background_noise > 0) {
    const std::uint64_t span = 2 * static_cast<std::uint64_t>(spec.background_noise) + 1;
    for (int& t : texture) t = static_cast<int>(rng() % span) - spec.background_noise;
  }

  Scene scene;
  scene.frames.reserve(spec.frames);
  for (int i = 1; i <= spec.frames; ++i) {
    Image frame(pw, ph);
    for (int y = 0; y < ph; ++y) {
      for (int x = 0; x < pw; ++x) {
        const int b = blob_at(spec, i, y / s, x / s);
        if (b >= 0) {
          const auto& col = spec.blobs[b].color;
          frame.set(y, x, col[0], col[1], col[2]);
        } else {
          const int t = texture[static_cast<std::size_t>(y) * pw + x];
          const auto& col = spec.background_color;
          frame.set(y, x, clamp_u8(col[0] + t), clamp_u8(col[1] + t), clamp_u8(col[2] + t));
        }
      }
    }
    scene.frames.push_back(std::move(frame));
  }

  for (int i = 1; i < spec.frames; ++i) {
    FlowField fwd(pw, ph);
    FlowField bwd(pw, ph);
    for (int y = 0; y < ph; ++y) {
      for (int x = 0; x < pw; ++x) {
        const int b0 = blob_at(spec, i, y / s, x / s);
        if (b0 >= 0) {
          const LatentPoint v = spec.blobs[b0].velocity;
          fwd.set(y, x, static_cast<float>(v.u * s), static_cast<float>(v.v * s));
        }
        const int b1 = blob_at(spec, i + 1, y / s, x / s);
        if (b1 >= 0) {
          const LatentPoint v = spec.blobs[b1].velocity;
          bwd.set(y, x, static_cast<float>(-v.u * s), static_cast<float>(-v.v * s));
        }
      }
    }
    scene.forward_flows.push_back(std::move(fwd));
    scene.backward_flows.push_back(std::move(bwd));
  }

  scene.features = FeatureVolume(spec.frames, spec.latent_height, spec.latent_width,
                                 spec.channels);
  for (int i = 1; i <= spec.frames; ++i) {
    for (int r = 0; r < spec.latent_height; ++r) {
      for (int c = 0; c < spec.latent_width; ++c) {
        const int b = blob_at(spec, i, r, c);
        const auto& sig = b >= 0 ? spec.blobs[b].signature : spec.background_signature;
        auto out = scene.features.vector_at(i - 1, r, c);
        for (int ch = 0; ch < spec.channels; ++ch) out[ch] = static_cast<float>(sig[ch]);
      }
    }
  }

  scene.mask = SubjectMask(spec.latent_height, spec.latent_width);
  for (int k : spec.keyframes) {
    for (int r = 0; r < spec.latent_height; ++r) {
      for (int c = 0; c < spec.latent_width; ++c) {
        if (blob_at(spec, k, r, c) >= 0) scene.mask.set(r, c, true);
      }
    }
  }
  return scene;
}

void write_scene(const Scene& scene, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "frames", ec);
  fs::create_directories(dir / "flows", ec);
  if (ec) fail(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  write_frames(scene.frames, dir / "frames");
  write_flow_sequence(scene.forward_flows, dir / "flows", true);
  write_flow_sequence(scene.backward_flows, dir / "flows", false);
  write_feature_volume(scene.features, dir / "features.fmap");
  write_mask(scene.mask, dir / "mask.pgm");
}

std::size_t GroundTruth::expected_anchor_count(double tau) const {
  const std::size_t n = blob_count;
  if (n == 0) return 0;
  std::size_t seed = 0;
  double best_sum = -1.0;
  for (std::size_t a = 0; a < n; ++a) {
    double sum = 0.0;
    for (std::size_t b = 0; b < n; ++b) sum += blob_distance(a, b);
    if (sum > best_sum) {
      best_sum = sum;
      seed = a;
    }
  }
  std::vector<std::size_t> chosen = {seed};
  while (chosen.size() < n) {
    std::size_t best = n;
    double best_min = -1.0;
    for (std::size_t a = 0; a < n; ++a) {
      if (std::find(chosen.begin(), chosen.end(), a) != chosen.end()) continue;
      double m = 3.0;
      for (std::size_t c : chosen) m = std::min(m, blob_distance(a, c));
      if (m > best_min) {
        best_min = m;
        best = a;
      }
    }
    if (best_min < tau) break;
    chosen.push_back(best);
  }
  return chosen.size();
}

GroundTruth ground_truth(const SceneSpec& input) {
  const SceneSpec spec = resolve_scene_spec(input);
  GroundTruth gt;
  gt.blob_count = spec.blobs.size();
  for (const BlobSpec& blob : spec.blobs) {
    std::vector<LatentPoint> path;
    for (int i = 1; i <= spec.frames; ++i) path.push_back(blob.center(i));
    gt.blob_paths.push_back(std::move(path));
  }

  // Centered feature at a blob point is a positive multiple of (s - bg).
  std::vector<std::vector<double>> directions;
  for (const BlobSpec& blob : spec.blobs) {
    std::vector<double> d(blob.signature.size());
    for (std::size_t ch = 0; ch < d.size(); ++ch) {
      d[ch] = blob.signature[ch] - spec.background_signature[ch];
    }
    const double n = norm_of(d);
    for (double& x : d) x /= n;
    directions.push_back(std::move(d));
  }
  gt.blob_distances.assign(gt.blob_count * gt.blob_count, 0.0);
  for (std::size_t a = 0; a < gt.blob_count; ++a) {
    for (std::size_t b = 0; b < gt.blob_count; ++b) {
      if (a == b) continue;
      double dot = 0.0;
      for (std::size_t ch = 0; ch < directions[a].size(); ++ch) {
        dot += directions[a][ch] * directions[b][ch];
      }
      gt.blob_distances[a * gt.blob_count + b] = 1.0 - dot;
    }
  }
  return gt;
}

LatentPoint AffineMotion::forward(LatentPoint p) const {
  return {p.u + a11 * p.u + a12 * p.v + tu, p.v + a21 * p.u + a22 * p.v + tv};
}

LatentPoint AffineMotion::backward(LatentPoint p) const {
  // Solve (I + A) x = p - t.
  const double m11 = 1.0 + a11, m12 = a12, m21 = a21, m22 = 1.0 + a22;
  const double det = m11 * m22 - m12 * m21;
  const double bu = p.u - tu;
  const double bv = p.v - tv;
  return {(m22 * bu - m12 * bv) / det, (m11 * bv - m21 * bu) / det};
}

FlowSequences affine_flows(int frames, int height, int width, const AffineMotion& motion) {
  const double det = (1.0 + motion.a11) * (1.0 + motion.a22) - motion.a12 * motion.a21;
  if (std::abs(det) < 1e-9) fail(ErrorCode::kValidation, "affine motion is not invertible");
  FlowField fwd(width, height);
  FlowField bwd(width, height);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      const LatentPoint p{static_cast<double>(c), static_cast<double>(r)};
      const LatentPoint f = motion.forward(p);
      const LatentPoint b = motion.backward(p);
      fwd.set(r, c, static_cast<float>(f.u - p.u), static_cast<float>(f.v - p.v));
      bwd.set(r, c, static_cast<float>(b.u - p.u), static_cast<float>(b.v - p.v));
    }
  }
  FlowSequences out;
  out.forward.assign(static_cast<std::size_t>(frames - 1), fwd);
  out.backward.assign(static_cast<std::size_t>(frames - 1), bwd);
  return out;
}

std::vector<LatentPoint> affine_trajectory(const AffineMotion& motion, GridCell seed,
                                           int keyframe, int frames) {
  std::vector<LatentPoint> path(static_cast<std::size_t>(frames));
  path[keyframe - 1] = {static_cast<double>(seed.col), static_cast<double>(seed.row)};
  for (int i = keyframe; i < frames; ++i) path[i] = motion.forward(path[i - 1]);
  for (int i = keyframe - 1; i > 0; --i) path[i - 1] = motion.backward(path[i]);
  return path;
}

FlowSequences random_flows(int frames, int height, int width, double amplitude,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  auto draw = [&] { return static_cast<float>((2.0 * uniform01(rng) - 1.0) * amplitude); };
  FlowSequences out;
  for (auto* seq : {&out.forward, &out.backward}) {
    for (int i = 1; i < frames; ++i) {
      FlowField f(width, height);
      for (std::size_t k = 0; k < f.u.size(); ++k) {
        f.u[k] = draw();
        f.v[k] = draw();
      }
      seq->push_back(std::move(f));
    }
  }
  return out;
}

}  // namespace anchor_motion
