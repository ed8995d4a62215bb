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

#include "omvid/types.hpp"

#include <algorithm>
#include <set>
#include <tuple>
#include <unordered_set>

#include <fmt/core.h>

#include "omvid/errors.hpp"

namespace omvid {

VideoVolume::VideoVolume(std::string video_id, Shape3 shape, std::vector<Lab> voxels)
    : video_id_(std::move(video_id)), shape_(shape), voxels_(std::move(voxels)) {
  if (!shape_.valid()) {
    throw DimensionError(fmt::format("video '{}': invalid shape {}x{}x{}", video_id_, shape_.frames,
                                     shape_.height, shape_.width));
  }
  if (voxels_.size() != shape_.voxels()) {
    throw DimensionError(fmt::format("video '{}': {} voxels for shape {}x{}x{}", video_id_, voxels_.size(),
                                     shape_.frames, shape_.height, shape_.width));
  }
}

std::size_t Bitmap::count() const {
  return static_cast<std::size_t>(std::count_if(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; }));
}

std::optional<Box> Bitmap::bounds() const {
  std::optional<Box> box;
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      if (!get(y, x)) continue;
      if (!box) {
        box = Box{x, y, x, y};
      } else {
        box->x_min = std::min(box->x_min, x);
        box->y_min = std::min(box->y_min, y);
        box->x_max = std::max(box->x_max, x);
        box->y_max = std::max(box->y_max, y);
      }
    }
  }
  return box;
}

Bitmap Bitmap::from_box(int height, int width, const Box& box) {
  Bitmap out(height, width);
  const int y0 = std::max(box.y_min, 0);
  const int y1 = std::min(box.y_max, height - 1);
  const int x0 = std::max(box.x_min, 0);
  const int x1 = std::min(box.x_max, width - 1);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) out.set(y, x);
  }
  return out;
}

const char* to_string(AnnotationKind kind) {
  switch (kind) {
    case AnnotationKind::kPoint: return "point";
    case AnnotationKind::kScribble: return "scribble";
    case AnnotationKind::kBox: return "box";
    case AnnotationKind::kMask: return "mask";
  }
  return "?";
}

int AnnotationRecord::annotated_frames() const {
  std::set<int> frames;
  for (const auto& e : entries) frames.insert(e.frame);
  return static_cast<int>(frames.size());
}

bool AnnotationRecord::has_kind(AnnotationKind kind) const {
  return std::any_of(entries.begin(), entries.end(), [kind](const AnnotationEntry& e) { return e.kind == kind; });
}

namespace {

void check_point(const AnnotationRecord& rec, int frame, const Point& p, const Shape3& shape) {
  if (p.x < 0 || p.x >= shape.width || p.y < 0 || p.y >= shape.height) {
    throw ValidationError(fmt::format("video '{}' frame {}: coordinate ({}, {}) outside {}x{} frame", rec.video_id,
                                      frame, p.x, p.y, shape.width, shape.height));
  }
}

}  // namespace

void validate_record(const AnnotationRecord& rec, const Shape3& shape) {
  if (rec.class_tag < 0) {
    throw ValidationError(fmt::format("video '{}': negative class {}", rec.video_id, rec.class_tag));
  }
  std::set<std::pair<int, AnnotationKind>> seen;
  for (const auto& e : rec.entries) {
    if (e.frame < 0 || e.frame >= shape.frames) {
      throw ValidationError(
          fmt::format("video '{}' frame {}: frame index outside [0, {})", rec.video_id, e.frame, shape.frames));
    }
    if (!seen.emplace(e.frame, e.kind).second) {
      throw ValidationError(
          fmt::format("video '{}' frame {}: duplicate {} entry", rec.video_id, e.frame, to_string(e.kind)));
    }
    switch (e.kind) {
      case AnnotationKind::kPoint:
        check_point(rec, e.frame, std::get<Point>(e.payload), shape);
        break;
      case AnnotationKind::kScribble: {
        const auto& s = std::get<Scribble>(e.payload);
        if (s.empty()) {
          throw ValidationError(fmt::format("video '{}' frame {}: empty scribble", rec.video_id, e.frame));
        }
        for (const auto& p : s) check_point(rec, e.frame, p, shape);
        break;
      }
      case AnnotationKind::kBox: {
        const auto& b = std::get<Box>(e.payload);
        if (!b.well_formed()) {
          throw ValidationError(fmt::format("video '{}' frame {}: box [{}, {}, {}, {}] has min > max", rec.video_id,
                                            e.frame, b.x_min, b.y_min, b.x_max, b.y_max));
        }
        check_point(rec, e.frame, {b.x_min, b.y_min}, shape);
        check_point(rec, e.frame, {b.x_max, b.y_max}, shape);
        break;
      }
      case AnnotationKind::kMask: {
        const auto& m = std::get<Bitmap>(e.payload);
        if (m.height() != shape.height || m.width() != shape.width) {
          throw ValidationError(fmt::format("video '{}' frame {}: mask is {}x{}, frame is {}x{}", rec.video_id,
                                            e.frame, m.height(), m.width(), shape.height, shape.width));
        }
        break;
      }
    }
  }
}

void DatasetSplit::validate() const {
  if (round_index < 1) throw ValidationError(fmt::format("split round index {} < 1", round_index));
  std::unordered_set<std::string> seen;
  for (const auto& id : labeled) {
    if (!seen.insert(id).second) throw ValidationError(fmt::format("split lists video '{}' twice", id));
  }
  for (const auto& id : unlabeled) {
    if (!seen.insert(id).second) {
      throw ValidationError(fmt::format("video '{}' is both labeled and unlabeled (or listed twice)", id));
    }
  }
}

void SuperpixelLabels::validate() const {
  if (!shape.valid() || labels.size() != shape.voxels()) {
    throw InvariantError(fmt::format("superpixels '{}': {} labels for shape {}x{}x{}", video_id, labels.size(),
                                     shape.frames, shape.height, shape.width));
  }
  const auto k = clusters.size();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= k) {
      throw InvariantError(fmt::format("superpixels '{}': voxel {} has label {} but K = {}", video_id, i, labels[i], k));
    }
  }
}

const char* to_string(Provenance p) {
  switch (p) {
    case Provenance::kReal: return "real";
    case Provenance::kSuperpixel: return "superpixel";
    case Provenance::kBoxInterp: return "box_interp";
    case Provenance::kMaskInterp: return "mask_interp";
    case Provenance::kScribbleBox: return "scribble_box";
  }
  return "?";
}

std::optional<Provenance> provenance_from_string(const std::string& s) {
  for (auto p : {Provenance::kReal, Provenance::kSuperpixel, Provenance::kBoxInterp, Provenance::kMaskInterp,
                 Provenance::kScribbleBox}) {
    if (s == to_string(p)) return p;
  }
  return std::nullopt;
}

Bitmap PseudoFrame::rasterize(int height, int width) const {
  if (const auto* m = std::get_if<Bitmap>(&geometry)) return *m;
  return Bitmap::from_box(height, width, std::get<Box>(geometry));
}

int PseudoLabelSet::labeled_frames() const {
  return static_cast<int>(std::count_if(frames.begin(), frames.end(), [](const auto& f) { return f.has_value(); }));
}

void CostTable::validate() const {
  for (auto [name, v] : {std::pair{"tag_s", tag_s}, {"point_s", point_s}, {"scribble_s", scribble_s},
                         {"box_s", box_s}, {"mask_s", mask_s}}) {
    if (!(v > 0.0)) throw ValidationError(fmt::format("cost table: {} = {} is not positive", name, v));
  }
}

std::vector<std::string> CostTable::ordering_warnings() const {
  std::vector<std::string> out;
  const std::array<std::pair<const char*, double>, 5> chain{
      {{"mask_s", mask_s}, {"box_s", box_s}, {"scribble_s", scribble_s}, {"point_s", point_s}, {"tag_s", tag_s}}};
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) {
    if (chain[i].second < chain[i + 1].second) {
      out.push_back(fmt::format("{} ({}) < {} ({})", chain[i].first, chain[i].second, chain[i + 1].first,
                                chain[i + 1].second));
    }
  }
  return out;
}

}  // namespace omvid
