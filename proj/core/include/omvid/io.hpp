// Copyright 2026 The omvid Authors.
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

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "omvid/types.hpp"

namespace omvid {

/// sRGB (8-bit) -> linear RGB -> XYZ (D65) -> CIELAB.
[[nodiscard]] Lab srgb_to_lab(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Builds a CIELAB volume from interleaved 8-bit RGB, T*H*W*3 bytes.
[[nodiscard]] VideoVolume volume_from_rgb(std::string video_id, Shape3 shape, std::span<const std::uint8_t> rgb);

/// Reads `frame_000000.png ... frame_{T-1}.png` from `dir`. The video id is the
/// directory name.
[[nodiscard]] VideoVolume load_video(const std::filesystem::path& dir);

/// Writes interleaved RGB frames as `frame_%06d.png` into `dir` (created if missing).
void write_video_frames(const std::filesystem::path& dir, Shape3 shape, std::span<const std::uint8_t> rgb);

// Row-major run lengths, space separated, first run counts zeros (may be 0).
[[nodiscard]] std::string encode_rle(const Bitmap& mask);
[[nodiscard]] Bitmap decode_rle(std::string_view rle, int height, int width);

/// Resolves a video id to its volume shape; nullopt when unknown.
using ShapeLookup = std::function<std::optional<Shape3>(const std::string&)>;

/// Parses the JSON-lines annotation format. Mask RLE needs the frame size and
/// every coordinate is bounds-checked, hence the shape lookup.
[[nodiscard]] std::vector<AnnotationRecord> parse_annotations(std::istream& in, const ShapeLookup& shapes);
[[nodiscard]] std::vector<AnnotationRecord> parse_annotations(const std::filesystem::path& file,
                                                              const ShapeLookup& shapes);
[[nodiscard]] std::string serialize_annotation(const AnnotationRecord& rec);
void write_annotations(const std::filesystem::path& file, std::span<const AnnotationRecord> records);

// SPV1 label volumes.
[[nodiscard]] std::vector<std::uint8_t> encode_labels(const SuperpixelLabels& sp);
[[nodiscard]] SuperpixelLabels decode_labels(std::span<const std::uint8_t> bytes, std::string video_id = {});
void write_labels(const SuperpixelLabels& sp, const std::filesystem::path& file);
/// The video id defaults to the file stem.
[[nodiscard]] SuperpixelLabels read_labels(const std::filesystem::path& file);

// Split files: {"round": n, "labeled": [...], "unlabeled": [...]}.
[[nodiscard]] DatasetSplit parse_split(std::string_view json);
[[nodiscard]] std::string serialize_split(const DatasetSplit& split);
[[nodiscard]] DatasetSplit read_split(const std::filesystem::path& file);

[[nodiscard]] std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& file);
void write_file_bytes(const std::filesystem::path& file, std::span<const std::uint8_t> bytes);
void write_text_file(const std::filesystem::path& file, std::string_view text);

}  // namespace omvid
