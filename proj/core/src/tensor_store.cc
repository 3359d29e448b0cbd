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

#include "anchor_motion/tensor_store.h"

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <string_view>

#include "anchor_motion/error.h"

namespace anchor_motion {
namespace {

namespace fs = std::filesystem;

constexpr std::string_view kFlowMagic = "PIEH";
constexpr std::string_view kFeatureMagic = "FMAP";
constexpr std::uint32_t kFeatureVersion = 1;
constexpr std::size_t kFlowHeaderBytes = 12;
constexpr std::size_t kFeatureHeaderBytes = 4 + 4 + 16 + 1;

class ByteWriter {
 public:
  explicit ByteWriter(std::size_t reserve) { bytes_.reserve(reserve); }

  void magic(std::string_view m) {
    bytes_.insert(bytes_.end(), m.begin(), m.end());
  }
  void u8(std::uint8_t value) { bytes_.push_back(value); }
  void u32(std::uint32_t value) {
    for (int shift = 0; shift < 32; shift += 8) {
      bytes_.push_back(static_cast<std::uint8_t>(value >> shift));
    }
  }
  void i32(std::int32_t value) { u32(std::bit_cast<std::uint32_t>(value)); }
  void f32(float value) { u32(std::bit_cast<std::uint32_t>(value)); }

  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
};

class ByteReader {
 public:
  explicit ByteReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  std::size_t remaining() const { return bytes_.size() - pos_; }

  bool magic(std::string_view m) {
    if (remaining() < m.size()) return false;
    bool ok = std::equal(m.begin(), m.end(), bytes_.begin() + pos_,
                         [](char a, std::uint8_t b) {
                           return static_cast<std::uint8_t>(a) == b;
                         });
    pos_ += m.size();
    return ok;
  }
  std::uint8_t u8() { return bytes_[pos_++]; }
  std::uint32_t u32() {
    std::uint32_t value = 0;
    for (int shift = 0; shift < 32; shift += 8) {
      value |= static_cast<std::uint32_t>(bytes_[pos_++]) << shift;
    }
    return value;
  }
  std::int32_t i32() { return std::bit_cast<std::int32_t>(u32()); }
  float f32() { return std::bit_cast<float>(u32()); }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

template <typename Range>
bool all_finite(const Range& values) {
  return std::all_of(values.begin(), values.end(),
                     [](float x) { return std::isfinite(x); });
}

std::optional<std::uint64_t> checked_product(
    std::initializer_list<std::uint64_t> factors) {
  std::uint64_t result = 1;
  for (std::uint64_t f : factors) {
    if (f != 0 && result > std::numeric_limits<std::uint64_t>::max() / f) {
      return std::nullopt;
    }
    result *= f;
  }
  return result;
}

// Netpbm header parsing shared by P5 and P6.
struct NetpbmHeader {
  int width = 0;
  int height = 0;
  int max_value = 0;
  std::size_t payload_offset = 0;
};

NetpbmHeader parse_netpbm_header(std::span<const std::uint8_t> bytes,
                                 std::string_view magic) {
  if (bytes.size() < 2 || bytes[0] != magic[0] || bytes[1] != magic[1]) {
    fail(ErrorCode::kFormat, "expected a binary " + std::string(magic) + " header");
  }
  std::size_t pos = 2;
  auto next_int = [&]() -> long long {
    // Skip whitespace and comments.
    while (pos < bytes.size()) {
      if (bytes[pos] == '#') {
        while (pos < bytes.size() && bytes[pos] != '\n') ++pos;
      } else if (std::isspace(bytes[pos])) {
        ++pos;
      } else {
        break;
      }
    }
    if (pos >= bytes.size() || !std::isdigit(bytes[pos])) {
      fail(ErrorCode::kFormat, "malformed " + std::string(magic) + " header");
    }
    long long value = 0;
    while (pos < bytes.size() && std::isdigit(bytes[pos])) {
      value = value * 10 + (bytes[pos] - '0');
      if (value > std::numeric_limits<int>::max()) {
        fail(ErrorCode::kFormat, "header value out of range");
      }
      ++pos;
    }
    return value;
  };

  NetpbmHeader header;
  header.width = static_cast<int>(next_int());
  header.height = static_cast<int>(next_int());
  header.max_value = static_cast<int>(next_int());
  if (pos >= bytes.size() || !std::isspace(bytes[pos])) {
    fail(ErrorCode::kFormat, "missing separator after " + std::string(magic) + " header");
  }
  header.payload_offset = pos + 1;
  if (header.width == 0 || header.height == 0) {
    fail(ErrorCode::kValidation, "image dimension is zero");
  }
  if (header.max_value <= 0 || header.max_value > 65535) {
    fail(ErrorCode::kFormat, "invalid maximum value in header");
  }
  return header;
}

std::vector<std::uint8_t> netpbm_header(std::string_view magic, int width,
                                        int height) {
  std::string text = std::string(magic) + "\n" + std::to_string(width) + " " +
                     std::to_string(height) + "\n255\n";
  return {text.begin(), text.end()};
}

fs::path numbered_path(const fs::path& dir, std::string_view prefix, int index,
                       std::string_view extension) {
  char name[64];
  std::snprintf(name, sizeof(name), "%s_%03d%s", std::string(prefix).c_str(),
                index, std::string(extension).c_str());
  return dir / name;
}

}  // namespace

FlowField::FlowField(int width, int height, float fill_u, float fill_v)
    : width(width),
      height(height),
      u(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), fill_u),
      v(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), fill_v) {}

FeatureVolume::FeatureVolume(int frames, int height, int width, int channels)
    : frames(frames),
      height(height),
      width(width),
      channels(channels),
      data(static_cast<std::size_t>(std::max(frames, 0)) * std::max(height, 0) *
               std::max(width, 0) * std::max(channels, 0),
           0.0f) {}

SubjectMask::SubjectMask(int height, int width, bool fill)
    : height(height),
      width(width),
      values(static_cast<std::size_t>(std::max(height, 0)) * std::max(width, 0),
             fill ? 1 : 0) {}

std::size_t SubjectMask::count() const {
  return static_cast<std::size_t>(
      std::count_if(values.begin(), values.end(), [](auto x) { return x != 0; }));
}

Image::Image(int width, int height, std::uint8_t fill)
    : width(width),
      height(height),
      rgb(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0) * 3, fill) {}

void Image::set(int row, int col, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  const std::size_t base = (static_cast<std::size_t>(row) * width + col) * 3;
  rgb[base] = r;
  rgb[base + 1] = g;
  rgb[base + 2] = b;
}

void validate(const FlowField& flow) {
  if (flow.width < 1 || flow.height < 1) {
    fail(ErrorCode::kValidation, "flow dimensions must be positive");
  }
  const std::size_t cells = static_cast<std::size_t>(flow.width) * flow.height;
  if (flow.u.size() != cells || flow.v.size() != cells) {
    fail(ErrorCode::kValidation, "flow channels do not match its dimensions");
  }
  if (!all_finite(flow.u) || !all_finite(flow.v)) {
    fail(ErrorCode::kValidation, "flow contains non-finite values");
  }
}

void validate(const FeatureVolume& volume) {
  if (volume.frames < 2) {
    fail(ErrorCode::kValidation, "feature volume needs at least 2 frames");
  }
  if (volume.height < 1 || volume.width < 1 || volume.channels < 1) {
    fail(ErrorCode::kValidation, "feature volume dimensions must be positive");
  }
  const std::size_t expected = static_cast<std::size_t>(volume.frames) *
                               volume.height * volume.width * volume.channels;
  if (volume.data.size() != expected) {
    fail(ErrorCode::kValidation, "feature volume data does not match its shape");
  }
  if (!all_finite(volume.data)) {
    fail(ErrorCode::kValidation, "feature volume contains non-finite values");
  }
}

void validate(const SubjectMask& mask) {
  if (mask.width < 1 || mask.height < 1) {
    fail(ErrorCode::kValidation, "mask dimensions must be positive");
  }
  if (mask.values.size() != static_cast<std::size_t>(mask.width) * mask.height) {
    fail(ErrorCode::kValidation, "mask values do not match its dimensions");
  }
}

void validate(const FrameSequence& frames) {
  if (frames.size() < 2) {
    fail(ErrorCode::kValidation, "frame sequence needs at least 2 frames");
  }
  for (const Image& frame : frames) {
    if (frame.width < 1 || frame.height < 1) {
      fail(ErrorCode::kValidation, "frame dimensions must be positive");
    }
    if (frame.width != frames.front().width || frame.height != frames.front().height) {
      fail(ErrorCode::kValidation, "frames differ in size");
    }
    if (frame.rgb.size() != static_cast<std::size_t>(frame.width) * frame.height * 3) {
      fail(ErrorCode::kValidation, "frame pixels do not match its dimensions");
    }
  }
}

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::kIo, "cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) fail(ErrorCode::kIo, "read failed for " + path.string());
  return bytes;
}

void write_file_bytes(std::span<const std::uint8_t> bytes, const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  out.flush();
  if (!out) fail(ErrorCode::kIo, "write failed for " + path.string());
}

std::vector<std::uint8_t> encode_flow(const FlowField& flow) {
  validate(flow);
  ByteWriter w(kFlowHeaderBytes + flow.u.size() * 8);
  w.magic(kFlowMagic);
  w.i32(flow.width);
  w.i32(flow.height);
  for (std::size_t i = 0; i < flow.u.size(); ++i) {
    w.f32(flow.u[i]);
    w.f32(flow.v[i]);
  }
  return w.take();
}

FlowField decode_flow(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (!r.magic(kFlowMagic)) fail(ErrorCode::kFormat, "bad flow magic (expected PIEH)");
  if (r.remaining() < kFlowHeaderBytes - 4) {
    fail(ErrorCode::kCorruption, "flow header truncated");
  }
  const std::int32_t width = r.i32();
  const std::int32_t height = r.i32();
  if (width < 1 || height < 1) {
    fail(ErrorCode::kValidation, "flow header has non-positive dimensions");
  }
  const std::uint64_t cells = static_cast<std::uint64_t>(width) * height;
  if (r.remaining() % 8 != 0 || r.remaining() / 8 != cells) {
    fail(ErrorCode::kCorruption, "flow payload size does not match header");
  }
  FlowField flow(width, height);
  for (std::size_t i = 0; i < cells; ++i) {
    flow.u[i] = r.f32();
    flow.v[i] = r.f32();
  }
  validate(flow);
  return flow;
}

FlowField read_flow(const fs::path& path) {
  return decode_flow(read_file_bytes(path));
}

void write_flow(const FlowField& flow, const fs::path& path) {
  write_file_bytes(encode_flow(flow), path);
}

std::vector<std::uint8_t> encode_feature_volume(const FeatureVolume& volume) {
  validate(volume);
  ByteWriter w(kFeatureHeaderBytes + volume.data.size() * 4);
  w.magic(kFeatureMagic);
  w.u32(kFeatureVersion);
  w.u32(static_cast<std::uint32_t>(volume.frames));
  w.u32(static_cast<std::uint32_t>(volume.height));
  w.u32(static_cast<std::uint32_t>(volume.width));
  w.u32(static_cast<std::uint32_t>(volume.channels));
  w.u8(volume.normalized ? 1 : 0);
  for (float x : volume.data) w.f32(x);
  return w.take();
}

FeatureVolume decode_feature_volume(std::span<const std::uint8_t> bytes) {
  ByteReader r(bytes);
  if (!r.magic(kFeatureMagic)) fail(ErrorCode::kFormat, "bad feature magic (expected FMAP)");
  if (r.remaining() < kFeatureHeaderBytes - 4) {
    fail(ErrorCode::kCorruption, "feature header truncated");
  }
  const std::uint32_t version = r.u32();
  if (version != kFeatureVersion) {
    fail(ErrorCode::kFormat, "unsupported FMAP version " + std::to_string(version));
  }
  const std::uint32_t n = r.u32();
  const std::uint32_t h = r.u32();
  const std::uint32_t w = r.u32();
  const std::uint32_t c = r.u32();
  const std::uint8_t flag = r.u8();
  if (flag > 1) fail(ErrorCode::kFormat, "normalized flag must be 0 or 1");
  if (n < 2 || h < 1 || w < 1 || c < 1) {
    fail(ErrorCode::kValidation, "FMAP header has invalid shape");
  }
  constexpr std::uint32_t kMaxDim = std::numeric_limits<std::int32_t>::max();
  if (n > kMaxDim || h > kMaxDim || w > kMaxDim || c > kMaxDim) {
    fail(ErrorCode::kValidation, "FMAP dimension out of range");
  }
  const auto count = checked_product({n, h, w, c});
  if (!count || r.remaining() % 4 != 0 || r.remaining() / 4 != *count) {
    fail(ErrorCode::kCorruption, "feature payload size does not match header");
  }
  FeatureVolume volume(static_cast<int>(n), static_cast<int>(h),
                       static_cast<int>(w), static_cast<int>(c));
  volume.normalized = flag == 1;
  for (float& x : volume.data) x = r.f32();
  validate(volume);
  return volume;
}

FeatureVolume read_feature_volume(const fs::path& path) {
  return decode_feature_volume(read_file_bytes(path));
}

void write_feature_volume(const FeatureVolume& volume, const fs::path& path) {
  write_file_bytes(encode_feature_volume(volume), path);
}

SubjectMask read_mask(const fs::path& path) {
  const std::vector<std::uint8_t> bytes = read_file_bytes(path);
  const NetpbmHeader header = parse_netpbm_header(bytes, "P5");
  const std::size_t bytes_per_sample = header.max_value > 255 ? 2 : 1;
  const std::size_t pixels = static_cast<std::size_t>(header.width) * header.height;
  if (bytes.size() - header.payload_offset < pixels * bytes_per_sample) {
    fail(ErrorCode::kCorruption, "P5 payload truncated");
  }
  SubjectMask mask(header.height, header.width);
  for (std::size_t i = 0; i < pixels; ++i) {
    const std::size_t at = header.payload_offset + i * bytes_per_sample;
    const bool inside = bytes[at] != 0 || (bytes_per_sample == 2 && bytes[at + 1] != 0);
    mask.values[i] = inside ? 1 : 0;
  }
  return mask;
}

void write_mask(const SubjectMask& mask, const fs::path& path) {
  validate(mask);
  std::vector<std::uint8_t> bytes = netpbm_header("P5", mask.width, mask.height);
  for (std::uint8_t value : mask.values) bytes.push_back(value ? 255 : 0);
  write_file_bytes(bytes, path);
}

Image read_ppm(const fs::path& path) {
  const std::vector<std::uint8_t> bytes = read_file_bytes(path);
  const NetpbmHeader header = parse_netpbm_header(bytes, "P6");
  if (header.max_value != 255) fail(ErrorCode::kFormat, "only 8-bit P6 is supported");
  Image image(header.width, header.height);
  if (bytes.size() - header.payload_offset < image.rgb.size()) {
    fail(ErrorCode::kCorruption, "P6 payload truncated");
  }
  std::copy_n(bytes.begin() + static_cast<std::ptrdiff_t>(header.payload_offset),
              image.rgb.size(), image.rgb.begin());
  return image;
}

void write_ppm(const Image& image, const fs::path& path) {
  if (image.width < 1 || image.height < 1 ||
      image.rgb.size() != static_cast<std::size_t>(image.width) * image.height * 3) {
    fail(ErrorCode::kValidation, "image shape is inconsistent");
  }
  std::vector<std::uint8_t> bytes = netpbm_header("P6", image.width, image.height);
  bytes.insert(bytes.end(), image.rgb.begin(), image.rgb.end());
  write_file_bytes(bytes, path);
}

fs::path forward_flow_path(const fs::path& dir, int index) {
  return numbered_path(dir, "fwd", index, ".flo");
}

fs::path backward_flow_path(const fs::path& dir, int index) {
  return numbered_path(dir, "bwd", index, ".flo");
}

fs::path frame_path(const fs::path& dir, int index) {
  return numbered_path(dir, "frame", index, ".ppm");
}

std::vector<FlowField> read_flow_sequence(const fs::path& dir, bool forward) {
  std::vector<FlowField> flows;
  for (int i = 1;; ++i) {
    const fs::path path = forward ? forward_flow_path(dir, i) : backward_flow_path(dir, i);
    if (!fs::exists(path)) break;
    flows.push_back(read_flow(path));
  }
  return flows;
}

void write_flow_sequence(const std::vector<FlowField>& flows, const fs::path& dir,
                         bool forward) {
  for (std::size_t i = 0; i < flows.size(); ++i) {
    const int index = static_cast<int>(i) + 1;
    write_flow(flows[i],
               forward ? forward_flow_path(dir, index) : backward_flow_path(dir, index));
  }
}

FrameSequence read_frames(const fs::path& dir) {
  FrameSequence frames;
  for (int i = 1;; ++i) {
    const fs::path path = frame_path(dir, i);
    if (!fs::exists(path)) break;
    frames.push_back(read_ppm(path));
  }
  return frames;
}

void write_frames(const FrameSequence& frames, const fs::path& dir) {
  validate(frames);
  for (std::size_t i = 0; i < frames.size(); ++i) {
    write_ppm(frames[i], frame_path(dir, static_cast<int>(i) + 1));
  }
}

}  // namespace anchor_motion
