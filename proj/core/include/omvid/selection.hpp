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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "omvid/types.hpp"

namespace omvid {

/// Per-pixel, per-frame non-negative model uncertainty of one video.
struct UncertaintyVolume {
  std::string video_id;
  Shape3 shape;
  std::vector<float> values;

  void validate() const;
  [[nodiscard]] std::span<const float> frame(int t) const {
    return {values.data() + static_cast<std::size_t>(t) * shape.pixels_per_frame(), shape.pixels_per_frame()};
  }
};

/// Sum of pixel uncertainties. Throws ValidationError on a negative entry.
[[nodiscard]] double frame_uncertainty(std::span<const float> pixels);
[[nodiscard]] std::vector<double> frame_scores(const UncertaintyVolume& uv);
/// Mean of the frame scores.
[[nodiscard]] double video_uncertainty(const UncertaintyVolume& uv);

// UNC1 container: magic, u32 T/H/W/K (K = 0), then T*H*W little-endian f32.
[[nodiscard]] std::vector<std::uint8_t> encode_uncertainty(const UncertaintyVolume& uv);
[[nodiscard]] UncertaintyVolume decode_uncertainty(std::span<const std::uint8_t> bytes, std::string video_id = {});
void write_uncertainty(const UncertaintyVolume& uv, const std::filesystem::path& file);
[[nodiscard]] UncertaintyVolume read_uncertainty(const std::filesystem::path& file);
/// Every `<video_id>.unc` file in a directory.
[[nodiscard]] std::map<std::string, UncertaintyVolume> read_uncertainty_dir(const std::filesystem::path& dir);

enum class Bucket { kBox, kScribble, kTag };

[[nodiscard]] const char* to_string(Bucket b);

struct BudgetConfig {
  double box_pct = 0.0;     
  double scribble_pct = 0.0;
  double tag_pct = 0.0;     
  int frames_per_video_box = 2;
  int frames_per_video_scribble = 2;
  int min_frame_gap = 8;

  /// Throws ConfigError / BudgetError if the increments do not fit in the
  /// share of videos that is still unlabeled.
  void validate(double labeled_pct) const;
};

enum class PolicyKind { kBucket, kRandom };

struct SelectionPolicy {
  PolicyKind kind = PolicyKind::kBucket;
  std::uint64_t seed = 0;
};

[[nodiscard]] const char* to_string(PolicyKind p);

struct PlanEntry {
  std::string video_id;
  double score = 0.0;
  Bucket bucket = Bucket::kTag;
  std::vector<int> frames;
  bool uniform_fallback = false;  // frames could not honour the minimum gap
  bool operator==(const PlanEntry&) const = default;
};

struct SelectionPlan {
  int round = 1;
  std::string policy = "bucket";
  std::vector<PlanEntry> entries;
  double projected_cost_hours = 0.0;
  bool operator==(const SelectionPlan&) const = default;
};

struct BucketCounts {
  std::size_t box = 0;
  std::size_t scribble = 0;
  std::size_t tag = 0;
  [[nodiscard]] std::size_t total() const { return box + scribble + tag; }
};

/// Videos per bucket: round(pct * total videos / 100). Validates the budget
/// and throws BudgetError when more videos are requested than are unlabeled.
[[nodiscard]] BucketCounts bucket_counts(const DatasetSplit& split, const BudgetConfig& bc);

/// Greedy highest-score-first frame picking with a minimum pairwise gap;
/// falls back to uniform spacing (and sets *fallback) when infeasible.
[[nodiscard]] std::vector<int> pick_frames(std::span<const double> scores, int count, int min_gap, bool* fallback);
/// `count` frames evenly spread over [0, frames).
[[nodiscard]] std::vector<int> uniform_frames(int frames, int count);

/// Ranks unlabeled videos and assigns them to box / scribble / tag buckets.
/// `frame_scores` must cover the box and scribble videos (its length is the
/// frame count).
[[nodiscard]] SelectionPlan select(const DatasetSplit& split, const std::map<std::string, double>& scores,
                                   const BudgetConfig& bc, const std::map<std::string, std::vector<double>>& frame_scores,
                                   const SelectionPolicy& policy);
/// Same, with explicit bucket sizes (validated against the candidate pool).
[[nodiscard]] SelectionPlan select(const DatasetSplit& split, const std::map<std::string, double>& scores,
                                   const BucketCounts& counts, const BudgetConfig& bc,
                                   const std::map<std::string, std::vector<double>>& frame_scores,
                                   const SelectionPolicy& policy);

/// Whether box-bucket videos receive boxes or pixel masks.
enum class BoxGeometry { kBox, kMask };

/// Annotation item counts (fractional counts allowed for dataset profiles).
struct AnnotationMix {
  double tags = 0.0;
  double points = 0.0;
  double scribbles = 0.0;
  double boxes = 0.0;
  double masks = 0.0;
};

/// Items a plan pays for. Box/scribble entries with an empty frame list denote
/// whole-video annotation and are charged `mean_frames_per_video` frames.
/// Every selected video also pays one tag.
[[nodiscard]] AnnotationMix plan_mix(const SelectionPlan& plan, double mean_frames_per_video,
                                     BoxGeometry geometry = BoxGeometry::kBox);
[[nodiscard]] double mix_cost_hours(const AnnotationMix& mix, const CostTable& ct);
[[nodiscard]] double plan_cost(const SelectionPlan& plan, const CostTable& ct, double mean_frames_per_video,
                               BoxGeometry geometry = BoxGeometry::kBox);

enum class CostItem { kTag, kPoint, kScribble, kBox, kMask };

[[nodiscard]] const char* to_string(CostItem item);

struct CostObservation {
  AnnotationMix mix;
  double hours = 0.0;
};

struct CostFit {
  CostTable table;
  std::vector<CostItem> fitted;
  std::vector<double> residuals_hours;  // observed - predicted, per observation
};

/// Least-squares unit costs reproducing the observed hours. Costs not in
/// `free_items` (default: every item some observation uses) are held at
/// `base`. Throws CalibrationError when the system is rank deficient.
[[nodiscard]] CostFit fit_cost_table(std::span<const CostObservation> observations, const CostTable& base = {},
                                     std::optional<std::vector<CostItem>> free_items = std::nullopt);

[[nodiscard]] std::string serialize_plan(const SelectionPlan& plan);
[[nodiscard]] SelectionPlan parse_plan(std::string_view json);
[[nodiscard]] SelectionPlan read_plan(const std::filesystem::path& file);

/// {"tag_s": .., "point_s": .., "scribble_s": .., "box_s": .., "mask_s": ..}; missing keys keep defaults.
[[nodiscard]] CostTable parse_cost_table(std::string_view json);
[[nodiscard]] std::string serialize_cost_table(const CostTable& ct);

}  // namespace omvid
