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

// On-disk formats and the in-memory containers they round-trip.
//
//   PIEH (.flo)   "PIEH" | i32 width | i32 height | f32 (u,v) interleaved,
//                 row-major. All values little-endian.
//   FMAP (.fmap)  "FMAP" | u32 version=1 | u32 N,H,W,C | u8 normalized |
//                 f32 data, frame-major, row-major, channel-last.
//   P5 (.pgm)     binary graymap; nonzero pixel means inside the subject.
//   P6 (.ppm)     binary pixmap, 8-bit RGB frames.
//
// Every reader rejects non-finite payload values, and every writer
// validates before touching the filesystem.

#ifndef ANCHOR_MOTION_TENSOR_STORE_H_
#define ANCHOR_MOTION_TENSOR_STORE_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace anchor_motion {

// Dense 2-channel displacement field in pixels/frame (or latent cells/frame
// after downsampling).
struct FlowField {
  int width = 0;
  int height = 0;
  std::vector<float> u;  // height x width, row-major.
  std::vector<float> v;

  FlowField() = default;
  FlowField(int width, int height, float fill_u = 0.0f, float fill_v = 0.0f);

  std::size_t offset(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width) +
           static_cast<std::size_t>(col);
  }
  float u_at(int row, int col) const { return u[offset(row, col)]; }
  float v_at(int row, int col) const { return v[offset(row, col)]; }
  void set(int row, int col, float du, float dv) {
    u[offset(row, col)] = du;
    v[offset(row, col)] = dv;
  }

  bool operator==(const FlowField&) const = default;
};

// N x H x W x C features for one video, channel-last.
struct FeatureVolume {
  int frames = 0;
  int height = 0;
  int width = 0;
  int channels = 0;
  std::vector<float> data;
  bool normalized = false;

  FeatureVolume() = default;
  FeatureVolume(int frames, int height, int width, int channels);

  std::size_t offset(int frame, int row, int col) const {
    return ((static_cast<std::size_t>(frame) * height + row) * width + col) *
           static_cast<std::size_t>(channels);
  }
  std::span<const float> vector_at(int frame, int row, int col) const {
    return {data.data() + offset(frame, row, col),
            static_cast<std::size_t>(channels)};
  }
  std::span<float> vector_at(int frame, int row, int col) {
    return {data.data() + offset(frame, row, col),
            static_cast<std::size_t>(channels)};
  }

  bool operator==(const FeatureVolume&) const = default;
};

// Latent-resolution subject mask.
struct SubjectMask {
  int height = 0;
  int width = 0;
  std::vector<std::uint8_t> values;  // 0 or 1, row-major.

  SubjectMask() = default;
  SubjectMask(int height, int width, bool fill = false);

  bool at(int row, int col) const {
    return values[static_cast<std::size_t>(row) * width + col] != 0;
  }
  void set(int row, int col, bool inside) {
    values[static_cast<std::size_t>(row) * width + col] = inside ? 1 : 0;
  }
  std::size_t count() const;

  bool operator==(const SubjectMask&) const = default;
};

// 8-bit interleaved RGB image.
struct Image {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgb;

  Image() = default;
  Image(int width, int height, std::uint8_t fill = 0);

  std::uint8_t at(int row, int col, int channel) const {
    return rgb[(static_cast<std::size_t>(row) * width + col) * 3 + channel];
  }
  void set(int row, int col, std::uint8_t r, std::uint8_t g, std::uint8_t b);

  bool operator==(const Image&) const = default;
};

using FrameSequence = std::vector<Image>;

void validate(const FlowField& flow);
void validate(const FeatureVolume& volume);
void validate(const SubjectMask& mask);
void validate(const FrameSequence& frames);

FlowField read_flow(const std::filesystem::path& path);
void write_flow(const FlowField& flow, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_flow(const FlowField& flow);
FlowField decode_flow(std::span<const std::uint8_t> bytes);

FeatureVolume read_feature_volume(const std::filesystem::path& path);
void write_feature_volume(const FeatureVolume& volume,
                          const std::filesystem::path& path);
std::vector<std::uint8_t> encode_feature_volume(const FeatureVolume& volume);
FeatureVolume decode_feature_volume(std::span<const std::uint8_t> bytes);

SubjectMask read_mask(const std::filesystem::path& path);
// Writes 0/255 P5.
void write_mask(const SubjectMask& mask, const std::filesystem::path& path);

Image read_ppm(const std::filesystem::path& path);
void write_ppm(const Image& image, const std::filesystem::path& path);

// Directory layout shared by the CLI and the synthetic scene writer. Indices
// are 1-based: fwd_001.flo maps frame 1 to frame 2, bwd_001.flo maps frame 2
// back to frame 1, frame_001.ppm is the first frame.
std::filesystem::path forward_flow_path(const std::filesystem::path& dir, int index);
std::filesystem::path backward_flow_path(const std::filesystem::path& dir, int index);
std::filesystem::path frame_path(const std::filesystem::path& dir, int index);

// Reads fwd_001.flo, fwd_002.flo, ... (or bwd_) until the first missing index.
std::vector<FlowField> read_flow_sequence(const std::filesystem::path& dir,
                                          bool forward);
void write_flow_sequence(const std::vector<FlowField>& flows,
                         const std::filesystem::path& dir, bool forward);
FrameSequence read_frames(const std::filesystem::path& dir);
void write_frames(const FrameSequence& frames, const std::filesystem::path& dir);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(std::span<const std::uint8_t> bytes,
                      const std::filesystem::path& path);

}  // namespace anchor_motion

#endif  // ANCHOR_MOTION_TENSOR_STORE_H_
