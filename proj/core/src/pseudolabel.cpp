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

#include "omvid/pseudolabel.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <map>

#include <fmt/core.h>
#include <json.hpp>

#include "omvid/errors.hpp"

namespace omvid {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void WeightConfig::validate() const {
  if (!(decay > 0.0 && decay <= 1.0)) throw ConfigError(fmt::format("weight decay {} outside (0, 1]", decay));
  if (!(floor >= 0.0 && floor < 1.0)) throw ConfigError(fmt::format("weight floor {} outside [0, 1)", floor));
}

double WeightConfig::weight(int distance) const {
  if (distance <= 0) return 1.0;
  return std::max(std::pow(decay, distance), floor);
}

Bitmap VolumeMask::frame(int t) const {
  Bitmap out(shape.height, shape.width);
  const std::size_t base = static_cast<std::size_t>(t) * shape.pixels_per_frame();
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (bits[base + i] != 0) out.set_flat(i);
  }
  return out;
}

std::size_t VolumeMask::count() const {
  return static_cast<std::size_t>(std::count_if(bits.begin(), bits.end(), [](auto b) { return b != 0; }));
}

SparseExpansion expand_sparse(const SuperpixelLabels& sp, std::span<const VoxelCoord> pixels) {
  if (pixels.empty()) throw ValidationError("expand_sparse: annotation has no pixels");
  const Shape3& s = sp.shape;
  std::vector<std::uint8_t> hit(sp.cluster_count(), 0);
  for (const auto& p : pixels) {
    if (!s.contains(p.frame, p.y, p.x)) {
      throw ValidationError(fmt::format("expand_sparse: pixel ({}, {}) at frame {} outside {}x{}x{} volume", p.x,
                                        p.y, p.frame, s.frames, s.height, s.width));
    }
    hit[sp.at(p.frame, p.y, p.x)] = 1;
  }
  SparseExpansion out;
  for (std::uint32_t k = 0; k < hit.size(); ++k) {
    if (hit[k] != 0) out.labels.push_back(k);
  }
  out.mask.shape = s;
  out.mask.bits.resize(s.voxels());
  for (std::size_t i = 0; i < sp.labels.size(); ++i) out.mask.bits[i] = hit[sp.labels[i]];
  return out;
}

namespace {

// round(num / den) with halves away from zero; den > 0.
int round_ratio(long long num, long long den) {
  const long long q = (2 * std::llabs(num) + den) / (2 * den);
  return static_cast<int>(num < 0 ? -q : q);
}

int lerp_coord(int a, int b, int t_off, int span) {
  return round_ratio(static_cast<long long>(a) * span + static_cast<long long>(t_off) * (b - a), span);
}

template <class Ann>
std::vector<Ann> sorted_unique(std::span<const Ann> anns, const Shape3& shape, const char* what) {
  if (anns.empty()) throw ValidationError(fmt::format("{}: no annotated frames", what));
  std::vector<Ann> out(anns.begin(), anns.end());
  std::stable_sort(out.begin(), out.end(), [](const Ann& a, const Ann& b) { return a.frame < b.frame; });
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (out[i].frame < 0 || out[i].frame >= shape.frames) {
      throw ValidationError(fmt::format("{}: frame {} outside [0, {})", what, out[i].frame, shape.frames));
    }
    if (i > 0 && out[i].frame == out[i - 1].frame) {
      throw ValidationError(fmt::format("{}: duplicate frame {}", what, out[i].frame));
    }
  }
  return out;
}

// Distance from every frame to the nearest frame in `annotated` (sorted).
std::vector<int> distance_to_nearest(const std::vector<int>& annotated, int frames) {
  std::vector<int> d(static_cast<std::size_t>(frames), std::numeric_limits<int>::max());
  for (int t = 0; t < frames; ++t) {
    for (int a : annotated) d[t] = std::min(d[t], std::abs(t - a));
  }
  return d;
}

PseudoLabelSet empty_set(const Shape3& shape) {
  PseudoLabelSet set;
  set.shape = shape;
  set.frames.resize(static_cast<std::size_t>(shape.frames));
  return set;
}

}  // namespace

PseudoLabelSet interpolate_boxes(std::span<const FrameBox> anns_in, const Shape3& shape, const WeightConfig& wc) {
  wc.validate();
  const auto anns = sorted_unique(anns_in, shape, "interpolate_boxes");
  for (const auto& a : anns) {
    const Box& b = a.box;
    if (!b.well_formed() || b.x_min < 0 || b.y_min < 0 || b.x_max >= shape.width || b.y_max >= shape.height) {
      throw ValidationError(fmt::format("interpolate_boxes: invalid box [{}, {}, {}, {}] at frame {}", b.x_min,
                                        b.y_min, b.x_max, b.y_max, a.frame));
    }
  }
  std::vector<int> frames;
  for (const auto& a : anns) frames.push_back(a.frame);
  const auto dist = distance_to_nearest(frames, shape.frames);

  PseudoLabelSet set = empty_set(shape);
  std::size_t seg = 0;
  for (int t = 0; t < shape.frames; ++t) {
    while (seg + 1 < anns.size() && anns[seg + 1].frame <= t) ++seg;
    Box box;
    if (t <= anns.front().frame) {
      box = anns.front().box;
    } else if (seg + 1 >= anns.size()) {
      box = anns.back().box;
    } else {
      const auto& a = anns[seg];
      const auto& b = anns[seg + 1];
      const int off = t - a.frame;
      const int span = b.frame - a.frame;
      box = Box{lerp_coord(a.box.x_min, b.box.x_min, off, span), lerp_coord(a.box.y_min, b.box.y_min, off, span),
                lerp_coord(a.box.x_max, b.box.x_max, off, span), lerp_coord(a.box.y_max, b.box.y_max, off, span)};
    }
    if (!box.well_formed() || box.x_min < 0 || box.y_min < 0 || box.x_max >= shape.width ||
        box.y_max >= shape.height) {
      throw InvariantError(fmt::format("interpolated box at frame {} left the frame", t));
    }
    const bool real = dist[t] == 0;
    set.frames[t] = PseudoFrame{t, box, wc.weight(dist[t]), real ? Provenance::kReal : Provenance::kBoxInterp,
                                AnnotationKind::kBox};
  }
  return set;
}

std::vector<double> squared_distance_transform(const Bitmap& targets) {
  const int h = targets.height();
  const int w = targets.width();
  constexpr double kInf = 1e20;
  std::vector<double> grid(targets.size());
  for (std::size_t i = 0; i < grid.size(); ++i) grid[i] = targets.flat(i) ? 0.0 : kInf;

  // Felzenszwalb & Huttenlocher lower envelope of parabolas, one axis at a time.
  auto transform_1d = [](const std::vector<double>& f, std::vector<double>& out) {
    constexpr double inf = std::numeric_limits<double>::infinity();
    const int n = static_cast<int>(f.size());
    std::vector<int> v(n);
    std::vector<double> z(n + 1);
    auto intersect = [&](int q, int p) {
      return ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) / (2.0 * (q - p));
    };
    int k = 0;
    v[0] = 0;
    z[0] = -inf;
    z[1] = inf;
    for (int q = 1; q < n; ++q) {
      double s = intersect(q, v[k]);
      while (s <= z[k]) {
        --k;
        s = intersect(q, v[k]);
      }
      ++k;
      v[k] = q;
      z[k] = s;
      z[k + 1] = inf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
      while (z[k + 1] < q) ++k;
      const double d = q - v[k];
      out[q] = d * d + f[v[k]];
    }
  };

  std::vector<double> f, out;
  f.resize(h);
  out.resize(h);
  for (int x = 0; x < w; ++x) {
    for (int y = 0; y < h; ++y) f[y] = grid[static_cast<std::size_t>(y) * w + x];
    transform_1d(f, out);
    for (int y = 0; y < h; ++y) grid[static_cast<std::size_t>(y) * w + x] = out[y];
  }
  f.resize(w);
  out.resize(w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) f[x] = grid[static_cast<std::size_t>(y) * w + x];
    transform_1d(f, out);
    for (int x = 0; x < w; ++x) grid[static_cast<std::size_t>(y) * w + x] = out[x];
  }
  for (auto& g : grid) {
    if (g >= kInf / 2) g = std::numeric_limits<double>::infinity();
  }
  return grid;
}

std::vector<double> signed_distance(const Bitmap& mask) {
  Bitmap outside(mask.height(), mask.width());
  for (std::size_t i = 0; i < mask.size(); ++i) outside.set_flat(i, !mask.flat(i));
  const auto to_inside = squared_distance_transform(mask);
  const auto to_outside = squared_distance_transform(outside);
  // Caps the distance when the mask is full or empty.
  const double cap = 2.0 * (mask.height() + mask.width());
  std::vector<double> sdf(mask.size());
  for (std::size_t i = 0; i < sdf.size(); ++i) {
    if (mask.flat(i)) {
      sdf[i] = -(std::min(std::sqrt(to_outside[i]), cap) - 0.5);
    } else {
      sdf[i] = std::min(std::sqrt(to_inside[i]), cap) - 0.5;
    }
  }
  return sdf;
}

PseudoLabelSet interpolate_masks(std::span<const FrameMask> anns_in, const Shape3& shape, const WeightConfig& wc) {
  wc.validate();
  const auto anns = sorted_unique(anns_in, shape, "interpolate_masks");
  std::vector<std::vector<double>> sdfs;
  std::vector<int> frames;
  for (const auto& a : anns) {
    if (a.mask.height() != shape.height || a.mask.width() != shape.width) {
      throw ValidationError(fmt::format("interpolate_masks: mask at frame {} is {}x{}, frame is {}x{}", a.frame,
                                        a.mask.height(), a.mask.width(), shape.height, shape.width));
    }
    if (a.mask.empty_mask()) throw ValidationError(fmt::format("interpolate_masks: empty mask at frame {}", a.frame));
    sdfs.push_back(signed_distance(a.mask));
    frames.push_back(a.frame);
  }
  const auto dist = distance_to_nearest(frames, shape.frames);

  PseudoLabelSet set = empty_set(shape);
  std::size_t seg = 0;
  for (int t = 0; t < shape.frames; ++t) {
    while (seg + 1 < anns.size() && anns[seg + 1].frame <= t) ++seg;
    Bitmap mask;
    if (t <= anns.front().frame) {
      mask = anns.front().mask;
    } else if (seg + 1 >= anns.size() || t == anns[seg].frame) {
      mask = anns[seg].mask;
    } else {
      const double alpha = static_cast<double>(t - anns[seg].frame) / (anns[seg + 1].frame - anns[seg].frame);
      const auto& sa = sdfs[seg];
      const auto& sb = sdfs[seg + 1];
      mask = Bitmap(shape.height, shape.width);
      for (std::size_t i = 0; i < mask.size(); ++i) {
        if ((1.0 - alpha) * sa[i] + alpha * sb[i] < 0.0) mask.set_flat(i);
      }
    }
    const bool real = dist[t] == 0;
    set.frames[t] = PseudoFrame{t, std::move(mask), wc.weight(dist[t]),
                                real ? Provenance::kReal : Provenance::kMaskInterp, AnnotationKind::kMask};
  }
  return set;
}

Box scribble_to_box(std::span<const Point> pixels) {
  if (pixels.empty()) throw ValidationError("scribble_to_box: empty scribble");
  Box b{pixels[0].x, pixels[0].y, pixels[0].x, pixels[0].y};
  for (const auto& p : pixels) {
    b.x_min = std::min(b.x_min, p.x);
    b.y_min = std::min(b.y_min, p.y);
    b.x_max = std::max(b.x_max, p.x);
    b.y_max = std::max(b.y_max, p.y);
  }
  return b;
}

const char* to_string(PseudoMode mode) {
  return mode == PseudoMode::kSuperpixel ? "superpixel" : "scribblebox";
}

namespace {

// Lower wins: real mask, real box, mask interpolation, box interpolation,
// then sparse-derived labels (scribbles before points).
int precedence(const PseudoFrame& f) {
  switch (f.provenance) {
    case Provenance::kReal: return f.origin == AnnotationKind::kMask ? 0 : 1;
    case Provenance::kMaskInterp: return 2;
    case Provenance::kBoxInterp: return 3;
    case Provenance::kSuperpixel:
    case Provenance::kScribbleBox: return f.origin == AnnotationKind::kScribble ? 4 : 5;
  }
  return 6;
}

// Sparse-derived frames are weighted at distance d + 1.
PseudoLabelSet sparse_channel(const std::vector<std::pair<int, std::vector<Point>>>& per_frame, AnnotationKind kind,
                              const Shape3& shape, const SuperpixelLabels* sp, const WeightConfig& wc,
                              PseudoMode mode) {
  std::vector<int> frames;
  for (const auto& [f, _] : per_frame) frames.push_back(f);
  std::sort(frames.begin(), frames.end());
  const auto dist = distance_to_nearest(frames, shape.frames);

  if (mode == PseudoMode::kScribbleBox) {
    std::vector<FrameBox> boxes;
    for (const auto& [f, pts] : per_frame) boxes.push_back({f, scribble_to_box(pts)});
    auto set = interpolate_boxes(boxes, shape, wc);
    for (auto& fr : set.frames) {
      fr->provenance = Provenance::kScribbleBox;
      fr->origin = kind;
      fr->weight = wc.weight(dist[fr->frame] + 1);
    }
    return set;
  }

  std::vector<VoxelCoord> pixels;
  for (const auto& [f, pts] : per_frame) {
    for (const auto& p : pts) pixels.push_back({f, p.x, p.y});
  }
  const auto expansion = expand_sparse(*sp, pixels);
  PseudoLabelSet set = empty_set(shape);
  for (int t = 0; t < shape.frames; ++t) {
    Bitmap m = expansion.mask.frame(t);
    if (m.empty_mask()) continue;
    set.frames[t] = PseudoFrame{t, std::move(m), wc.weight(dist[t] + 1), Provenance::kSuperpixel, kind};
  }
  return set;
}

}  // namespace

PseudoLabelSet build_pseudolabels(const AnnotationRecord& rec, const Shape3& shape, const SuperpixelLabels* sp,
                                  const WeightConfig& wc, PseudoMode mode) {
  wc.validate();
  if (rec.tag_only()) {
    throw ValidationError(fmt::format("video '{}': tag-only record has no pseudo-labels", rec.video_id));
  }
  validate_record(rec, shape);
  const bool needs_sp = rec.has_kind(AnnotationKind::kScribble) || rec.has_kind(AnnotationKind::kPoint);
  if (mode == PseudoMode::kSuperpixel && needs_sp) {
    if (sp == nullptr) {
      throw ConfigError(fmt::format("video '{}': superpixel mode needs a superpixel segmentation", rec.video_id));
    }
    if (sp->shape != shape) {
      throw ValidationError(fmt::format("video '{}': superpixels are {}x{}x{}, video is {}x{}x{}", rec.video_id,
                                        sp->shape.frames, sp->shape.height, sp->shape.width, shape.frames,
                                        shape.height, shape.width));
    }
  }

  std::vector<FrameBox> boxes;
  std::vector<FrameMask> masks;
  std::vector<std::pair<int, std::vector<Point>>> scribbles;
  std::vector<std::pair<int, std::vector<Point>>> points;
  for (const auto& e : rec.entries) {
    switch (e.kind) {
      case AnnotationKind::kBox: boxes.push_back({e.frame, std::get<Box>(e.payload)}); break;
      case AnnotationKind::kMask: masks.push_back({e.frame, std::get<Bitmap>(e.payload)}); break;
      case AnnotationKind::kScribble: scribbles.emplace_back(e.frame, std::get<Scribble>(e.payload)); break;
      case AnnotationKind::kPoint: points.emplace_back(e.frame, std::vector<Point>{std::get<Point>(e.payload)}); break;
    }
  }

  std::vector<PseudoLabelSet> channels;
  if (!boxes.empty()) channels.push_back(interpolate_boxes(boxes, shape, wc));
  if (!masks.empty()) channels.push_back(interpolate_masks(masks, shape, wc));
  if (!scribbles.empty()) channels.push_back(sparse_channel(scribbles, AnnotationKind::kScribble, shape, sp, wc, mode));
  if (!points.empty()) channels.push_back(sparse_channel(points, AnnotationKind::kPoint, shape, sp, wc, mode));

  PseudoLabelSet out = empty_set(shape);
  out.video_id = rec.video_id;
  for (auto& ch : channels) {
    for (auto& fr : ch.frames) {
      if (!fr) continue;
      auto& slot = out.frames[fr->frame];
      if (!slot || precedence(*fr) < precedence(*slot)) slot = std::move(fr);
    }
  }
  return out;
}

std::string serialize_pseudolabels(const PseudoLabelSet& set) {
  std::string text;
  for (const auto& fr : set.frames) {
    if (!fr) continue;
    ordered_json j;
    j["video_id"] = set.video_id;
    j["frame"] = fr->frame;
    j["provenance"] = to_string(fr->provenance);
    j["origin"] = to_string(fr->origin);
    j["weight"] = fr->weight;
    if (const auto* b = std::get_if<Box>(&fr->geometry)) {
      j["box"] = {b->x_min, b->y_min, b->x_max, b->y_max};
    } else {
      j["mask"] = {{"rle", encode_rle(std::get<Bitmap>(fr->geometry))}};
    }
    text += j.dump();
    text += '\n';
  }
  return text;
}

std::vector<PseudoLabelSet> parse_pseudolabels(std::istream& in, const ShapeLookup& shapes) {
  std::vector<PseudoLabelSet> out;
  std::map<std::string, std::size_t> index;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      const auto id = j.at("video_id").get<std::string>();
      auto it = index.find(id);
      if (it == index.end()) {
        const auto shape = shapes ? shapes(id) : std::nullopt;
        if (!shape) throw ValidationError(fmt::format("video '{}': unknown frame geometry", id));
        PseudoLabelSet set = empty_set(*shape);
        set.video_id = id;
        it = index.emplace(id, out.size()).first;
        out.push_back(std::move(set));
      }
      auto& set = out[it->second];
      PseudoFrame fr;
      fr.frame = j.at("frame").get<int>();
      if (fr.frame < 0 || fr.frame >= set.shape.frames) {
        throw ValidationError(fmt::format("video '{}': frame {} out of range", id, fr.frame));
      }
      const auto prov = provenance_from_string(j.at("provenance").get<std::string>());
      if (!prov) throw FormatError("unknown provenance");
      fr.provenance = *prov;
      const auto origin = j.at("origin").get<std::string>();
      bool known = false;
      for (auto k : {AnnotationKind::kPoint, AnnotationKind::kScribble, AnnotationKind::kBox, AnnotationKind::kMask}) {
        if (origin == to_string(k)) {
          fr.origin = k;
          known = true;
        }
      }
      if (!known) throw FormatError(fmt::format("unknown origin '{}'", origin));
      fr.weight = j.at("weight").get<double>();
      if (j.contains("box")) {
        const auto& b = j["box"];
        fr.geometry = Box{b.at(0).get<int>(), b.at(1).get<int>(), b.at(2).get<int>(), b.at(3).get<int>()};
      } else {
        fr.geometry = decode_rle(j.at("mask").at("rle").get<std::string>(), set.shape.height, set.shape.width);
      }
      if (set.frames[fr.frame]) throw ValidationError(fmt::format("video '{}': duplicate frame {}", id, fr.frame));
      set.frames[fr.frame] = std::move(fr);
    } catch (const json::exception& e) {
      throw FormatError(fmt::format("pseudo-labels line {}: {}", line_no, e.what()));
    }
  }
  return out;
}

}  // namespace omvid
