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
#include <vector>

#include "omvid/types.hpp"

namespace omvid {

/// Parameters of the spatio-temporal SLIC energy
///   sum_p ||f(p) - f'(p)|| + (m / S) ||p - p'||
/// where the z component of positions is scaled by `temporal_scale`.
struct SlicConfig {
  int interval = 16;          // S, voxels
  double compactness = 10.0;  // m
  int max_iters = 10;
  double temporal_scale = 1.0;  // rho
  int min_region = 8;

  /// Throws ConfigError if the config cannot be applied to `shape`.
  void validate(const Shape3& shape) const;
  /// ceil(T / (rho S)) * ceil(H / S) * ceil(W / S)
  [[nodiscard]] std::size_t initial_clusters(const Shape3& shape) const;
  /// Half extent of the temporal search window, ceil(rho S).
  [[nodiscard]] int temporal_window() const;
};

struct VoxelFeature {
  std::array<float, 9> color{};  // LAB at t-1, t, t+1 (clamped at the ends)
  std::array<float, 3> position{};
};

class FeatureVolume {
 public:
  FeatureVolume(Shape3 shape, std::vector<std::array<float, 9>> colors)
      : shape_(shape), colors_(std::move(colors)) {}

  [[nodiscard]] const Shape3& shape() const { return shape_; }
  [[nodiscard]] const std::array<float, 9>& color(std::size_t index) const { return colors_[index]; }
  [[nodiscard]] VoxelFeature at(int t, int y, int x) const {
    return {colors_[shape_.index(t, y, x)],
            {static_cast<float>(x), static_cast<float>(y), static_cast<float>(t)}};
  }

 private:
  Shape3 shape_;
  std::vector<std::array<float, 9>> colors_;
};

[[nodiscard]] FeatureVolume extract_features(const VideoVolume& video);

/// SLIC energy of a hard assignment against its cluster centroids.
/// Throws InvariantError if a label is out of range or shapes differ.
[[nodiscard]] double energy(const VideoVolume& video, const SuperpixelLabels& sp, const SlicConfig& cfg);
[[nodiscard]] double energy(const FeatureVolume& features, const SuperpixelLabels& sp, const SlicConfig& cfg);

struct SegmentReport {
  std::size_t initial_clusters = 0;
  int iterations = 0;
  /// Energy after every assignment step and every centroid update, in order,
  /// before connectivity enforcement.
  std::vector<double> energy_trace;
  /// Optional copies of the state each trace entry was measured on.
  bool keep_snapshots = false;
  std::vector<SuperpixelLabels> snapshots;
};

/// Spatio-temporal superpixels by alternating assignment / centroid update,
/// followed by connectivity enforcement and dense relabeling.
[[nodiscard]] SuperpixelLabels segment(const VideoVolume& video, const SlicConfig& cfg,
                                       SegmentReport* report = nullptr);

/// Merges non-largest and undersized 6-connected fragments of each label into
/// their largest neighbouring region and relabels densely in scan order.
/// Returns the new label volume; the result has no empty labels.
[[nodiscard]] std::vector<std::uint32_t> enforce_connectivity(const Shape3& shape,
                                                              const std::vector<std::uint32_t>& labels,
                                                              int min_region);

}  // namespace omvid
