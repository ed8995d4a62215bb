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

#include <map>
#include <span>
#include <string>
#include <vector>

#include "omvid/types.hpp"

namespace omvid {

struct Detection {
  std::string video_id;
  int frame = 0;
  Box box;
  int label = 0;
  double confidence = 1.0;
};

struct GroundTruth {
  std::string video_id;
  int frame = 0;
  Box box;
  int label = 0;
};

/// A spatio-temporal track: one box per frame it exists on.
struct Tube {
  std::string video_id;
  int label = 0;
  double confidence = 1.0;
  std::map<int, Box> boxes;
};

/// IoU of inclusive pixel boxes.
[[nodiscard]] double box_iou(const Box& a, const Box& b);
/// Mean per-frame IoU over the union of frames; frames covered by only one
/// tube count as 0.
[[nodiscard]] double tube_iou(const Tube& a, const Tube& b);

/// All-points interpolated AP from hit flags ordered by descending confidence.
[[nodiscard]] double average_precision(const std::vector<bool>& hits, std::size_t positives);

/// Frame-level mAP over the classes present in `gts`; 0 when `gts` is empty.
/// Throws ParameterError unless 0 < tau <= 1.
[[nodiscard]] double frame_map(std::span<const Detection> dets, std::span<const GroundTruth> gts, double tau);
/// Video-level mAP with tube IoU. Ground-truth confidences are ignored.
[[nodiscard]] double video_map(std::span<const Tube> dets, std::span<const Tube> gts, double tau);

}  // namespace omvid
