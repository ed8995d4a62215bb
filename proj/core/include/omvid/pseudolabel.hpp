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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "omvid/io.hpp"
#include "omvid/types.hpp"

namespace omvid {

/// Frame weight as a function of temporal distance d to the nearest real
/// annotation: max(decay^d, floor), with weight(0) = 1.
struct WeightConfig {
  double decay = 0.9;
  double floor = 0.1;

  void validate() const;
  [[nodiscard]] double weight(int distance) const;
};

struct VoxelCoord {
  int frame = 0;
  int x = 0;
  int y = 0;
};

/// Binary T x H x W volume.
struct VolumeMask {
  Shape3 shape;
  std::vector<std::uint8_t> bits;

  [[nodiscard]] Bitmap frame(int t) const;
  [[nodiscard]] std::size_t count() const;
};

struct SparseExpansion {
  std::vector<std::uint32_t> labels;  // sorted superpixel ids touched by the pixels
  VolumeMask mask;                    // union of those superpixels
};

/// Superpixels that share at least one voxel with `pixels`, and their union.
[[nodiscard]] SparseExpansion expand_sparse(const SuperpixelLabels& sp, std::span<const VoxelCoord> pixels);

struct FrameBox {
  int frame = 0;
  Box box;
};

struct FrameMask {
  int frame = 0;
  Bitmap mask;
};

/// Linear interpolation between consecutive annotated boxes (rounded half away
/// from zero); the nearest box is replicated outside the annotated span.
[[nodiscard]] PseudoLabelSet interpolate_boxes(std::span<const FrameBox> anns, const Shape3& shape,
                                               const WeightConfig& wc);

/// Signed-distance blending between consecutive annotated masks.
[[nodiscard]] PseudoLabelSet interpolate_masks(std::span<const FrameMask> anns, const Shape3& shape,
                                               const WeightConfig& wc);

/// Squared Euclidean distance from every pixel to the nearest set pixel of
/// `targets` (infinity when none is set).
[[nodiscard]] std::vector<double> squared_distance_transform(const Bitmap& targets);

/// Signed distance with pixel-centred boundary: negative inside, <= -0.5 on
/// set pixels and >= 0.5 on unset ones.
[[nodiscard]] std::vector<double> signed_distance(const Bitmap& mask);

/// Tight bounding box of the scribble pixels. Requires at least one pixel.
[[nodiscard]] Box scribble_to_box(std::span<const Point> pixels);

enum class PseudoMode { kSuperpixel, kScribbleBox };

[[nodiscard]] const char* to_string(PseudoMode mode);

/// Dense pseudo-labels for one record. Tag-only records are rejected; route
/// them to classification only.
[[nodiscard]] PseudoLabelSet build_pseudolabels(const AnnotationRecord& rec, const Shape3& shape,
                                                const SuperpixelLabels* sp, const WeightConfig& wc, PseudoMode mode);

/// One JSON line per labeled frame.
[[nodiscard]] std::string serialize_pseudolabels(const PseudoLabelSet& set);
/// Reads JSON lines written by serialize_pseudolabels (any number of videos).
[[nodiscard]] std::vector<PseudoLabelSet> parse_pseudolabels(std::istream& in, const ShapeLookup& shapes);

}  // namespace omvid
