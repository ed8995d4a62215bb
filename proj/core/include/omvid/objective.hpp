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

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "omvid/types.hpp"

namespace omvid {

inline constexpr double kProbEpsilon = 1e-7;

/// H x W foreground probabilities of one frame.
struct FrameMap {
  int height = 0;
  int width = 0;
  std::vector<double> values;

  FrameMap() = default;
  FrameMap(int h, int w, double fill = 0.0) : height(h), width(w), values(static_cast<std::size_t>(h) * w, fill) {}
};

struct PredictionMap {
  std::vector<FrameMap> frames;
  std::vector<double> class_probs;

  /// Probabilities in [0, 1], class vector sums to 1 +- 1e-6.
  void validate() const;
};

/// Mean binary cross-entropy with predictions clamped to [eps, 1 - eps].
[[nodiscard]] double frame_loss(const FrameMap& pred, const Bitmap& target);

/// d frame_loss / d pred; zero where the clamp is active.
[[nodiscard]] FrameMap frame_loss_gradient(const FrameMap& pred, const Bitmap& target);

/// sum_i W_i L_i
[[nodiscard]] double weighted_detection_loss(std::span<const double> losses, std::span<const double> weights);

/// -ln p[c], clamped.
[[nodiscard]] double classification_loss(std::span<const double> class_probs, int label);

struct LossGates {
  bool box = false;
  bool pixel = false;
  bool scribble = false;
  bool point = false;
};

/// Per-sample loss terms; a detection term is absent when the sample carries no
/// annotation of that kind.
struct LossTerms {
  double cls = 0.0;
  std::optional<double> box;
  std::optional<double> pixel;
  std::optional<double> scribble;
  std::optional<double> point;
  double slic = 0.0;
};

struct LossBreakdown {
  double cls = 0.0;
  double box = 0.0;
  double pixel = 0.0;
  double scribble = 0.0;
  double point = 0.0;
  double slic = 0.0;
  double total = 0.0;
  LossGates gates;
};

/// cls + gated detection terms + slic. Throws ValidationError if a gate is set
/// for an absent term.
[[nodiscard]] LossBreakdown total_loss(const LossTerms& terms, const LossGates& gates);

/// SLIC energy divided by the voxel count.
[[nodiscard]] double normalized_slic(double energy, std::size_t voxels);

/// Gates enabled by the annotation kinds present in a pseudo-label set.
[[nodiscard]] LossGates gates_for(const PseudoLabelSet& labels);

/// Weighted detection loss per annotation kind. Boxes are rasterized to filled
/// maps before the per-frame loss.
[[nodiscard]] LossTerms detection_losses(const PredictionMap& pred, const PseudoLabelSet& labels);

/// Full per-sample objective. `labels` is null for tag-only samples.
[[nodiscard]] LossBreakdown sample_loss(const PredictionMap& pred, const PseudoLabelSet* labels, int class_label,
                                        double slic_term);

}  // namespace omvid
