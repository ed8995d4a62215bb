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

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace omvid {

/// Extent of a T x H x W video volume. Flat voxel index is (t * H + y) * W + x.
struct Shape3 {
  int frames = 0;
  int height = 0;
  int width = 0;

  [[nodiscard]] std::size_t voxels() const {
    return static_cast<std::size_t>(frames) * height * width;
  }
  [[nodiscard]] std::size_t pixels_per_frame() const {
    return static_cast<std::size_t>(height) * width;
  }
  [[nodiscard]] std::size_t index(int t, int y, int x) const {
    return (static_cast<std::size_t>(t) * height + y) * width + x;
  }
  [[nodiscard]] bool valid() const { return frames >= 1 && height >= 1 && width >= 1; }
  [[nodiscard]] bool contains(int t, int y, int x) const {
    return t >= 0 && t < frames && y >= 0 && y < height && x >= 0 && x < width;
  }
  bool operator==(const Shape3&) const = default;
};

struct Lab {
  float l = 0.0F;
  float a = 0.0F;
  float b = 0.0F;
  bool operator==(const Lab&) const = default;
};

/// A T x H x W grid of CIELAB voxels.
class VideoVolume {
 public:
  VideoVolume(std::string video_id, Shape3 shape, std::vector<Lab> voxels);

  [[nodiscard]] const std::string& video_id() const { return video_id_; }
  [[nodiscard]] const Shape3& shape() const { return shape_; }
  [[nodiscard]] const Lab& at(int t, int y, int x) const { return voxels_[shape_.index(t, y, x)]; }
  [[nodiscard]] const std::vector<Lab>& voxels() const { return voxels_; }

 private:
  std::string video_id_;
  Shape3 shape_;
  std::vector<Lab> voxels_;
};

struct Point {
  int x = 0;
  int y = 0;
  bool operator==(const Point&) const = default;
  auto operator<=>(const Point&) const = default;
};

/// Inclusive integer pixel box.
struct Box {
  int x_min = 0;
  int y_min = 0;
  int x_max = 0;
  int y_max = 0;

  [[nodiscard]] bool well_formed() const { return x_min <= x_max && y_min <= y_max; }
  [[nodiscard]] long long area() const {
    return well_formed() ? static_cast<long long>(x_max - x_min + 1) * (y_max - y_min + 1) : 0;
  }
  bool operator==(const Box&) const = default;
};

/// Row-major binary H x W image.
class Bitmap {
 public:
  Bitmap() = default;
  Bitmap(int height, int width) : height_(height), width_(width), bits_(static_cast<std::size_t>(height) * width, 0) {}

  [[nodiscard]] int height() const { return height_; }
  [[nodiscard]] int width() const { return width_; }
  [[nodiscard]] std::size_t size() const { return bits_.size(); }
  [[nodiscard]] bool get(int y, int x) const { return bits_[static_cast<std::size_t>(y) * width_ + x] != 0; }
  void set(int y, int x, bool on = true) { bits_[static_cast<std::size_t>(y) * width_ + x] = on ? 1 : 0; }
  [[nodiscard]] bool flat(std::size_t i) const { return bits_[i] != 0; }
  void set_flat(std::size_t i, bool on = true) { bits_[i] = on ? 1 : 0; }
  [[nodiscard]] std::size_t count() const;
  [[nodiscard]] bool empty_mask() const { return count() == 0; }
  /// Tight bounding box of the set pixels; nullopt when no pixel is set.
  [[nodiscard]] std::optional<Box> bounds() const;
  [[nodiscard]] const std::vector<std::uint8_t>& bits() const { return bits_; }

  static Bitmap from_box(int height, int width, const Box& box);

  bool operator==(const Bitmap&) const = default;

 private:
  int height_ = 0;
  int width_ = 0;
  std::vector<std::uint8_t> bits_;
};

enum class AnnotationKind { kPoint, kScribble, kBox, kMask };

[[nodiscard]] const char* to_string(AnnotationKind kind);

using Scribble = std::vector<Point>;
using AnnotationPayload = std::variant<Point, Scribble, Box, Bitmap>;

struct AnnotationEntry {
  int frame = 0;
  AnnotationKind kind = AnnotationKind::kPoint;
  AnnotationPayload payload;
  bool operator==(const AnnotationEntry&) const = default;
};

/// One video's sparse labels. An empty entry list is a video-level tag.
struct AnnotationRecord {
  std::string video_id;
  int class_tag = 0;
  std::vector<AnnotationEntry> entries;

  [[nodiscard]] bool tag_only() const { return entries.empty(); }
  /// Number of distinct annotated frames (F').
  [[nodiscard]] int annotated_frames() const;
  [[nodiscard]] bool has_kind(AnnotationKind kind) const;
  bool operator==(const AnnotationRecord&) const = default;
};

/// Checks frame/coordinate bounds, box ordering, mask shape and the
/// (frame, kind) uniqueness rule. Throws ValidationError.
void validate_record(const AnnotationRecord& rec, const Shape3& shape);

struct DatasetSplit {
  std::vector<std::string> labeled;
  std::vector<std::string> unlabeled;
  int round_index = 1;

  /// Throws ValidationError if the sets overlap or the round index is < 1.
  void validate() const;
  [[nodiscard]] std::size_t total() const { return labeled.size() + unlabeled.size(); }
  bool operator==(const DatasetSplit&) const = default;
};

struct Cluster {
  std::array<float, 3> position{};  // (x, y, z = frame)
  std::array<float, 9> feature{};
  bool operator==(const Cluster&) const = default;
};

/// Hard association of every voxel with a superpixel.
struct SuperpixelLabels {
  std::string video_id;
  Shape3 shape;
  std::vector<std::uint32_t> labels;
  std::vector<Cluster> clusters;

  [[nodiscard]] std::size_t cluster_count() const { return clusters.size(); }
  [[nodiscard]] std::uint32_t at(int t, int y, int x) const { return labels[shape.index(t, y, x)]; }
  /// Throws InvariantError on out-of-range labels or a size mismatch.
  void validate() const;
};

enum class Provenance { kReal, kSuperpixel, kBoxInterp, kMaskInterp, kScribbleBox };

[[nodiscard]] const char* to_string(Provenance p);
[[nodiscard]] std::optional<Provenance> provenance_from_string(const std::string& s);

/// Pseudo-label of one frame: either a mask or a box.
struct PseudoFrame {
  int frame = 0;
  std::variant<Box, Bitmap> geometry;
  double weight = 1.0;
  Provenance provenance = Provenance::kReal;
  AnnotationKind origin = AnnotationKind::kBox;  // annotation kind the label was derived from

  [[nodiscard]] Bitmap rasterize(int height, int width) const;
  bool operator==(const PseudoFrame&) const = default;
};

struct PseudoLabelSet {
  std::string video_id;
  Shape3 shape;
  std::vector<std::optional<PseudoFrame>> frames;  // indexed by frame; nullopt = no label

  [[nodiscard]] int labeled_frames() const;
};

/// Unit annotation costs in seconds per item.
struct CostTable {
  double tag_s = 1.0;
  double point_s = 2.0;
  double scribble_s = 11.0;
  double box_s = 35.0;
  double mask_s = 79.0;

  /// Throws ValidationError unless every cost is positive.
  void validate() const;
  /// Human-readable notes when the documented ordering
  /// mask >= box >= scribble >= point >= tag does not hold.
  [[nodiscard]] std::vector<std::string> ordering_warnings() const;
  bool operator==(const CostTable&) const = default;
};

}  // namespace omvid
