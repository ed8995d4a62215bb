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

#include "omvid/io.hpp"

#include <png.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <regex>
#include <sstream>

#include <fmt/core.h>
#include <json.hpp>

#include "binary_io.hpp"
#include "omvid/errors.hpp"

namespace omvid {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

constexpr double kWhiteX = 0.95047;
constexpr double kWhiteY = 1.0;
constexpr double kWhiteZ = 1.08883;

double srgb_to_linear(double c) { return c <= 0.04045 ? c / 12.92 : std::pow((c + 0.055) / 1.055, 2.4); }

double lab_f(double t) {
  constexpr double delta = 6.0 / 29.0;
  return t > delta * delta * delta ? std::cbrt(t) : t / (3.0 * delta * delta) + 4.0 / 29.0;
}

struct LabTable {
  // Transfer curve for all 256 code values, computed once.
  std::array<double, 256> linear{};
  LabTable() {
    for (int i = 0; i < 256; ++i) linear[i] = srgb_to_linear(i / 255.0);
  }
};

const LabTable& lab_table() {
  static const LabTable table;
  return table;
}

std::string frame_name(int index) { return fmt::format("frame_{:06d}.png", index); }

}  // namespace

Lab srgb_to_lab(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
  const auto& lin = lab_table().linear;
  const double r = lin[r8];
  const double g = lin[g8];
  const double b = lin[b8];
  const double x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
  const double y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
  const double z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;
  const double fx = lab_f(x / kWhiteX);
  const double fy = lab_f(y / kWhiteY);
  const double fz = lab_f(z / kWhiteZ);
  const double l = std::clamp(116.0 * fy - 16.0, 0.0, 100.0);
  return Lab{static_cast<float>(l), static_cast<float>(500.0 * (fx - fy)), static_cast<float>(200.0 * (fy - fz))};
}

VideoVolume volume_from_rgb(std::string video_id, Shape3 shape, std::span<const std::uint8_t> rgb) {
  if (!shape.valid() || rgb.size() != shape.voxels() * 3) {
    throw DimensionError(fmt::format("video '{}': {} RGB bytes for shape {}x{}x{}", video_id, rgb.size(),
                                     shape.frames, shape.height, shape.width));
  }
  std::vector<Lab> voxels(shape.voxels());
  for (std::size_t i = 0; i < voxels.size(); ++i) {
    voxels[i] = srgb_to_lab(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
  }
  return VideoVolume(std::move(video_id), shape, std::move(voxels));
}

VideoVolume load_video(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw FormatError(fmt::format("video directory '{}' does not exist", dir.string()));
  static const std::regex pattern(R"(frame_(\d{6})\.png)");
  std::vector<int> indices;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (name.rfind("frame_", 0) != 0) continue;
    std::smatch m;
    if (!std::regex_match(name, m, pattern)) {
      throw FormatError(fmt::format("video '{}': irregular frame file name '{}'", dir.string(), name));
    }
    indices.push_back(std::stoi(m[1].str()));
  }
  std::sort(indices.begin(), indices.end());
  for (std::size_t i = 0; i <= indices.size(); ++i) {
    if (i == indices.size()) {
      if (i == 0) throw FormatError(fmt::format("video '{}': missing frame 0", dir.string()));
      break;
    }
    if (indices[i] != static_cast<int>(i)) {
      throw FormatError(fmt::format("video '{}': missing frame {}", dir.string(), i));
    }
  }

  Shape3 shape{static_cast<int>(indices.size()), 0, 0};
  std::vector<std::uint8_t> rgb;
  for (int t = 0; t < shape.frames; ++t) {
    const auto path = dir / frame_name(t);
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (png_image_begin_read_from_file(&image, path.string().c_str()) == 0) {
      throw FormatError(fmt::format("video '{}': frame {} unreadable: {}", dir.string(), t, image.message));
    }
    image.format = PNG_FORMAT_RGB;
    if (t == 0) {
      shape.height = static_cast<int>(image.height);
      shape.width = static_cast<int>(image.width);
      rgb.resize(shape.voxels() * 3);
    } else if (static_cast<int>(image.height) != shape.height || static_cast<int>(image.width) != shape.width) {
      png_image_free(&image);
      throw DimensionError(fmt::format("video '{}': frame {} is {}x{}, frame 0 is {}x{}", dir.string(), t,
                                       image.width, image.height, shape.width, shape.height));
    }
    auto* dst = rgb.data() + static_cast<std::size_t>(t) * shape.pixels_per_frame() * 3;
    if (png_image_finish_read(&image, nullptr, dst, 0, nullptr) == 0) {
      throw FormatError(fmt::format("video '{}': frame {} decode failed: {}", dir.string(), t, image.message));
    }
  }
  const fs::path named = dir.has_filename() ? dir : dir.parent_path();
  return volume_from_rgb(named.filename().string(), shape, rgb);
}

void write_video_frames(const fs::path& dir, Shape3 shape, std::span<const std::uint8_t> rgb) {
  if (!shape.valid() || rgb.size() != shape.voxels() * 3) {
    throw DimensionError(fmt::format("write_video_frames: {} bytes for shape {}x{}x{}", rgb.size(), shape.frames,
                                     shape.height, shape.width));
  }
  fs::create_directories(dir);
  for (int t = 0; t < shape.frames; ++t) {
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(shape.width);
    image.height = static_cast<png_uint_32>(shape.height);
    image.format = PNG_FORMAT_RGB;
    const auto* src = rgb.data() + static_cast<std::size_t>(t) * shape.pixels_per_frame() * 3;
    const auto path = dir / frame_name(t);
    if (png_image_write_to_file(&image, path.string().c_str(), 0, src, 0, nullptr) == 0) {
      throw FormatError(fmt::format("cannot write '{}': {}", path.string(), image.message));
    }
  }
}

std::string encode_rle(const Bitmap& mask) {
  std::string out;
  bool current = false;
  std::size_t run = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask.flat(i) == current) {
      ++run;
      continue;
    }
    out += std::to_string(run);
    out += ' ';
    current = !current;
    run = 1;
  }
  out += std::to_string(run);
  return out;
}

Bitmap decode_rle(std::string_view rle, int height, int width) {
  Bitmap out(height, width);
  std::size_t pos = 0;
  bool value = false;
  std::size_t i = 0;
  while (i < rle.size()) {
    if (rle[i] == ' ') {
      ++i;
      continue;
    }
    std::size_t run = 0;
    const auto [end, ec] = std::from_chars(rle.data() + i, rle.data() + rle.size(), run);
    if (ec != std::errc{}) throw FormatError(fmt::format("RLE: invalid token at offset {}", i));
    i = static_cast<std::size_t>(end - rle.data());
    if (run > out.size() - pos) throw FormatError("RLE: runs exceed frame size");
    if (value) {
      for (std::size_t k = 0; k < run; ++k) out.set_flat(pos + k);
    }
    pos += run;
    value = !value;
  }
  if (pos != out.size()) {
    throw FormatError(fmt::format("RLE: runs cover {} pixels, frame has {}", pos, out.size()));
  }
  return out;
}

namespace {

Point parse_point(const json& j) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw FormatError("point must be [x, y] integers");
  }
  return Point{j[0].get<int>(), j[1].get<int>()};
}

AnnotationEntry parse_entry(const json& j, const Shape3& shape) {
  if (!j.is_object()) throw FormatError("entry must be an object");
  AnnotationEntry e;
  e.frame = j.at("frame").get<int>();
  const auto kind = j.at("kind").get<std::string>();
  const auto& data = j.at("data");
  if (kind == "point") {
    e.kind = AnnotationKind::kPoint;
    e.payload = parse_point(data);
  } else if (kind == "scribble") {
    e.kind = AnnotationKind::kScribble;
    if (!data.is_array()) throw FormatError("scribble data must be a list of [x, y]");
    Scribble s;
    for (const auto& p : data) s.push_back(parse_point(p));
    e.payload = std::move(s);
  } else if (kind == "box") {
    e.kind = AnnotationKind::kBox;
    if (!data.is_array() || data.size() != 4) throw FormatError("box data must be [xmin, ymin, xmax, ymax]");
    e.payload = Box{data[0].get<int>(), data[1].get<int>(), data[2].get<int>(), data[3].get<int>()};
  } else if (kind == "mask") {
    e.kind = AnnotationKind::kMask;
    e.payload = decode_rle(data.at("rle").get<std::string>(), shape.height, shape.width);
  } else {
    throw FormatError(fmt::format("unknown annotation kind '{}'", kind));
  }
  return e;
}

}  // namespace

std::vector<AnnotationRecord> parse_annotations(std::istream& in, const ShapeLookup& shapes) {
  std::vector<AnnotationRecord> out;
  std::map<std::string, std::size_t> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    AnnotationRecord rec;
    try {
      const auto j = json::parse(line);
      rec.video_id = j.at("video_id").get<std::string>();
      rec.class_tag = j.at("class").get<int>();
      const auto& entries = j.at("entries");
      if (!entries.is_array()) throw FormatError("'entries' must be a list");
      if (!entries.empty()) {
        const auto shape = shapes ? shapes(rec.video_id) : std::nullopt;
        if (!shape) throw ValidationError(fmt::format("video '{}': unknown frame geometry", rec.video_id));
        for (const auto& e : entries) rec.entries.push_back(parse_entry(e, *shape));
        validate_record(rec, *shape);
      } else if (rec.class_tag < 0) {
        throw ValidationError(fmt::format("video '{}': negative class {}", rec.video_id, rec.class_tag));
      }
    } catch (const json::exception& e) {
      throw FormatError(fmt::format("annotations line {}: {}", line_no, e.what()));
    } catch (const ValidationError& e) {
      throw ValidationError(fmt::format("annotations line {}: {}", line_no, e.what()));
    } catch (const FormatError& e) {
      throw FormatError(fmt::format("annotations line {}: {}", line_no, e.what()));
    }
    if (!seen.emplace(rec.video_id, out.size()).second) {
      throw ValidationError(fmt::format("annotations line {}: duplicate record for video '{}'", line_no, rec.video_id));
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<AnnotationRecord> parse_annotations(const fs::path& file, const ShapeLookup& shapes) {
  std::ifstream in(file);
  if (!in) throw FormatError(fmt::format("cannot open annotation file '{}'", file.string()));
  return parse_annotations(in, shapes);
}

std::string serialize_annotation(const AnnotationRecord& rec) {
  ordered_json j;
  j["video_id"] = rec.video_id;
  j["class"] = rec.class_tag;
  j["entries"] = ordered_json::array();
  for (const auto& e : rec.entries) {
    ordered_json je;
    je["frame"] = e.frame;
    je["kind"] = to_string(e.kind);
    switch (e.kind) {
      case AnnotationKind::kPoint: {
        const auto& p = std::get<Point>(e.payload);
        je["data"] = {p.x, p.y};
        break;
      }
      case AnnotationKind::kScribble: {
        auto arr = ordered_json::array();
        for (const auto& p : std::get<Scribble>(e.payload)) arr.push_back({p.x, p.y});
        je["data"] = std::move(arr);
        break;
      }
      case AnnotationKind::kBox: {
        const auto& b = std::get<Box>(e.payload);
        je["data"] = {b.x_min, b.y_min, b.x_max, b.y_max};
        break;
      }
      case AnnotationKind::kMask:
        je["data"] = {{"rle", encode_rle(std::get<Bitmap>(e.payload))}};
        break;
    }
    j["entries"].push_back(std::move(je));
  }
  return j.dump();
}

void write_annotations(const fs::path& file, std::span<const AnnotationRecord> records) {
  std::string text;
  for (const auto& r : records) {
    text += serialize_annotation(r);
    text += '\n';
  }
  write_text_file(file, text);
}

std::vector<std::uint8_t> encode_labels(const SuperpixelLabels& sp) {
  sp.validate();
  detail::LeWriter w;
  w.reserve(20 + sp.labels.size() * 4 + sp.clusters.size() * 48);
  w.magic("SPV1");
  w.u32(static_cast<std::uint32_t>(sp.shape.frames));
  w.u32(static_cast<std::uint32_t>(sp.shape.height));
  w.u32(static_cast<std::uint32_t>(sp.shape.width));
  w.u32(static_cast<std::uint32_t>(sp.clusters.size()));
  for (auto label : sp.labels) w.u32(label);
  for (const auto& c : sp.clusters) {
    for (float v : c.position) w.f32(v);
    for (float v : c.feature) w.f32(v);
  }
  return w.take();
}

SuperpixelLabels decode_labels(std::span<const std::uint8_t> bytes, std::string video_id) {
  detail::LeReader r(bytes, "SPV1");
  r.expect_magic("SPV1");
  SuperpixelLabels sp;
  sp.video_id = std::move(video_id);
  sp.shape.frames = static_cast<int>(r.u32());
  sp.shape.height = static_cast<int>(r.u32());
  sp.shape.width = static_cast<int>(r.u32());
  const auto k = r.u32();
  if (!sp.shape.valid()) throw FormatError("SPV1: zero dimension in header");
  const std::size_t n = sp.shape.voxels();
  r.need(n * 4 + static_cast<std::size_t>(k) * 48, "payload");
  sp.labels.resize(n);
  for (auto& label : sp.labels) label = r.u32();
  sp.clusters.resize(k);
  for (auto& c : sp.clusters) {
    for (float& v : c.position) v = r.f32();
    for (float& v : c.feature) v = r.f32();
  }
  if (r.remaining() != 0) throw FormatError(fmt::format("SPV1: {} trailing bytes", r.remaining()));
  try {
    sp.validate();
  } catch (const InvariantError& e) {
    throw FormatError(std::string("SPV1: ") + e.what());
  }
  return sp;
}

void write_labels(const SuperpixelLabels& sp, const fs::path& file) { write_file_bytes(file, encode_labels(sp)); }

SuperpixelLabels read_labels(const fs::path& file) {
  return decode_labels(read_file_bytes(file), file.stem().string());
}

DatasetSplit parse_split(std::string_view text) {
  DatasetSplit split;
  try {
    const auto j = json::parse(text);
    split.round_index = j.value("round", 1);
    split.labeled = j.value("labeled", std::vector<std::string>{});
    split.unlabeled = j.at("unlabeled").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("split: {}", e.what()));
  }
  split.validate();
  return split;
}

std::string serialize_split(const DatasetSplit& split) {
  ordered_json j;
  j["round"] = split.round_index;
  j["labeled"] = split.labeled;
  j["unlabeled"] = split.unlabeled;
  return j.dump(2) + "\n";
}

DatasetSplit read_split(const fs::path& file) {
  const auto bytes = read_file_bytes(file);
  return parse_split(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

std::vector<std::uint8_t> read_file_bytes(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw FormatError(fmt::format("cannot open '{}'", file.string()));
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const fs::path& file, std::span<const std::uint8_t> bytes) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(fmt::format("cannot write '{}'", file.string()));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

void write_text_file(const fs::path& file, std::string_view text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError(fmt::format("cannot write '{}'", file.string()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

}  // namespace omvid
