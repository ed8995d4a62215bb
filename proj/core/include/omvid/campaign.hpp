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
#include <string>
#include <vector>

#include "omvid/metrics.hpp"
#include "omvid/pseudolabel.hpp"
#include "omvid/selection.hpp"
#include "omvid/superpixel3d.hpp"
#include "omvid/types.hpp"

namespace omvid {

/// Motion-direction classes of synthetic actors.
enum class Motion { kStatic, kRight, kLeft, kDown, kUp };
inline constexpr int kMotionClasses = 5;

[[nodiscard]] const char* to_string(Motion m);

struct SceneParams {
  int frames = 8;
  int height = 32;
  int width = 32;
  int min_size = 9;  // actor side length at the first frame
  int max_size = 13;
  int size_drift = 2;       // max change of each side over the clip
  double max_speed = 1.0;   // pixels per frame along each axis
  double texture = 6.0;     // RGB noise amplitude
  double min_contrast = 30.0;  // CIELAB distance between actor and background

  /// Throws ParameterError on infeasible geometry.
  void validate() const;
};

/// One moving rectangle over a textured background.
struct SyntheticScene {
  std::uint64_t seed = 0;
  std::string video_id;
  Shape3 shape;
  std::vector<std::uint8_t> rgb;  // T*H*W*3
  std::vector<Lab> lab;
  Motion motion = Motion::kStatic;
  std::vector<Box> boxes;  // ground truth per frame

  [[nodiscard]] VideoVolume volume() const { return {video_id, shape, lab}; }
  [[nodiscard]] Bitmap mask(int t) const { return Bitmap::from_box(shape.height, shape.width, boxes[t]); }
  [[nodiscard]] int label() const { return static_cast<int>(motion); }
};

[[nodiscard]] SyntheticScene generate_scene(std::uint64_t seed, const SceneParams& params, std::string video_id = {});

/// `count` scenes whose texture and speed grow with the index; `spread` = 0
/// keeps every scene at the base parameters.
[[nodiscard]] std::vector<SyntheticScene> generate_scenes(int count, std::uint64_t seed, const SceneParams& params,
                                                          double spread = 1.0);

/// Medial axis of a mask, restricted to pixels at least two pixels from the
/// background (the deepest pixel when nothing survives).
[[nodiscard]] std::vector<Point> medial_scribble(const Bitmap& mask);

/// Union of the superpixels lying mostly inside the actor, as IoU with the
/// ground-truth volume.
[[nodiscard]] double actor_cover_iou(const SyntheticScene& scene, const SuperpixelLabels& sp);

/// Volume IoU between a pseudo-label set and a scene's ground truth.
[[nodiscard]] double pseudo_label_iou(const SyntheticScene& scene, const PseudoLabelSet& set);

struct CampaignConfig {
  int rounds = 3;
  std::uint64_t seed = 0;
  BudgetConfig budget{.box_pct = 10.0, .scribble_pct = 20.0, .tag_pct = 0.0};
  SelectionPolicy policy;
  double noise = 0.4;  // detector noise of the first scene
  double noise_spread = 3.0;  // the last scene gets noise * (1 + noise_spread)
  CostTable costs;
  BoxGeometry geometry = BoxGeometry::kBox;
  SlicConfig slic{.interval = 6, .compactness = 20.0, .max_iters = 10, .temporal_scale = 1.0, .min_region = 8};
  WeightConfig weights;
  PseudoMode mode = PseudoMode::kSuperpixel;

  void validate() const;
};

struct RoundReport {
  int round_index = 0;
  std::string policy;
  double round_cost_hours = 0.0;
  double cumulative_cost_hours = 0.0;
  std::size_t labeled_videos = 0;
  std::size_t spatial_videos = 0;
  /// Mean volume IoU of every video's training target: its pseudo-label when
  /// spatially labeled, otherwise the detector's own thresholded prediction.
  double mean_pseudo_label_iou = 0.0;
  /// Mean volume IoU over spatially labeled videos only.
  double labeled_pseudo_label_iou = 0.0;
  /// Mean IoU on the frames a human annotated.
  double annotated_frame_iou = 0.0;
  double f_map_02 = 0.0;
  double f_map_05 = 0.0;
  double v_map_02 = 0.0;
  double v_map_05 = 0.0;
  std::vector<std::string> warnings;
  bool operator==(const RoundReport&) const = default;
};

/// Noisy ground-truth detector map of one scene: mask + N(0, sigma).
[[nodiscard]] std::vector<float> detector_map(const SyntheticScene& scene, double sigma, std::uint64_t seed);
/// Squared distance of a detector map to its binarization.
[[nodiscard]] UncertaintyVolume map_uncertainty(const SyntheticScene& scene, const std::vector<float>& map);

[[nodiscard]] std::vector<RoundReport> run_campaign(const std::vector<SyntheticScene>& scenes,
                                                    const CampaignConfig& cfg);

struct AblationLevel {
  double video_pct = 0.0;  // share of videos that receive spatial labels
  double frame_pct = 0.0;  // share of all frames that are annotated
};

[[nodiscard]] std::vector<AblationLevel> default_ablation_levels();

struct AblationResult {
  AblationLevel level;
  double superpixel_iou = 0.0;
  double scribble_box_iou = 0.0;
};

/// Labeled videos alternate between masks and scribbles; both pseudo-label
/// modes are scored by mean volume IoU over the labeled videos.
[[nodiscard]] std::vector<AblationResult> run_ablation(const std::vector<SyntheticScene>& scenes,
                                                       const std::vector<AblationLevel>& levels,
                                                       const SlicConfig& slic, const WeightConfig& weights);

[[nodiscard]] std::string serialize_reports(const std::vector<RoundReport>& reports);
[[nodiscard]] std::vector<RoundReport> parse_reports(std::string_view json);
/// round,policy,cumulative_cost_hours,... one row per report.
[[nodiscard]] std::string reports_csv(const std::vector<RoundReport>& reports);

}  // namespace omvid
