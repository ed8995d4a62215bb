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

#include "omvid/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <random>

#include <fmt/core.h>
#include <json.hpp>

#include "omvid/errors.hpp"
#include "omvid/io.hpp"
#include "omvid/parallel.hpp"

namespace omvid {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t a, std::uint64_t b) { return splitmix(a ^ splitmix(b)); }
std::uint64_t mix(std::uint64_t a, std::uint64_t b, std::uint64_t c) { return mix(mix(a, b), c); }

// Portable uniform and normal draws over mt19937_64.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  int range(int lo, int hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
    return lo + static_cast<int>(engine_() % span);
  }
  double gaussian() {
    if (spare_) {
      const double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = unit();
    while (u1 <= 0.0) u1 = unit();
    const double u2 = unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * M_PI * u2);
    return r * std::cos(2.0 * M_PI * u2);
  }

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_;
};

int interp(int a, int b, int t, int span) {
  if (span == 0) return a;
  const long long num = static_cast<long long>(b - a) * t;
  const long long q = (2 * std::llabs(num) + span) / (2LL * span);
  return a + static_cast<int>(num < 0 ? -q : q);
}

double lab_distance(const Lab& p, const Lab& q) {
  const double dl = p.l - q.l;
  const double da = p.a - q.a;
  const double db = p.b - q.b;
  return std::sqrt(dl * dl + da * da + db * db);
}

std::uint8_t clamp_byte(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

}  // namespace

const char* to_string(Motion m) {
  switch (m) {
    case Motion::kStatic: return "static";
    case Motion::kRight: return "right";
    case Motion::kLeft: return "left";
    case Motion::kDown: return "down";
    case Motion::kUp: return "up";
  }
  return "?";
}

void SceneParams::validate() const {
  if (frames < 4) throw ParameterError(fmt::format("scene needs at least 4 frames, got {}", frames));
  if (height < 1 || width < 1) throw ParameterError("scene frame size must be positive");
  if (min_size < 2 || min_size > max_size) {
    throw ParameterError(fmt::format("actor size range [{}, {}] is empty or below 2", min_size, max_size));
  }
  if (max_size >= std::min(height, width)) {
    throw ParameterError(fmt::format("actor size {} does not fit strictly inside a {}x{} frame", max_size, height,
                                     width));
  }
  if (size_drift < 0 || max_speed < 0.0 || texture < 0.0) {
    throw ParameterError("size drift, speed and texture must be non-negative");
  }
  if (!(min_contrast >= 0.0 && min_contrast <= 100.0)) {
    throw ParameterError(fmt::format("contrast {} outside [0, 100]", min_contrast));
  }
}

SyntheticScene generate_scene(std::uint64_t seed, const SceneParams& p, std::string video_id) {
  p.validate();
  Rng rng(splitmix(seed));
  SyntheticScene s;
  s.seed = seed;
  s.video_id = video_id.empty() ? fmt::format("scene_{}", seed) : std::move(video_id);
  s.shape = {p.frames, p.height, p.width};
  const int limit = std::min(p.height, p.width) - 1;

  const int w0 = rng.range(p.min_size, p.max_size);
  const int h0 = rng.range(p.min_size, p.max_size);
  const int w1 = std::clamp(w0 + rng.range(-p.size_drift, p.size_drift), 2, limit);
  const int h1 = std::clamp(h0 + rng.range(-p.size_drift, p.size_drift), 2, limit);
  const int x0 = rng.range(0, p.width - w0);
  const int y0 = rng.range(0, p.height - h0);
  const int span = p.frames - 1;
  const auto dx = std::lround((2.0 * rng.unit() - 1.0) * p.max_speed * span);
  const auto dy = std::lround((2.0 * rng.unit() - 1.0) * p.max_speed * span);
  const int x1 = std::clamp(static_cast<int>(x0 + dx), 0, p.width - w1);
  const int y1 = std::clamp(static_cast<int>(y0 + dy), 0, p.height - h1);
  for (int t = 0; t < p.frames; ++t) {
    s.boxes.push_back({interp(x0, x1, t, span), interp(y0, y1, t, span), interp(x0 + w0 - 1, x1 + w1 - 1, t, span),
                       interp(y0 + h0 - 1, y1 + h1 - 1, t, span)});
  }
  const double cx = (x1 + (w1 - 1) / 2.0) - (x0 + (w0 - 1) / 2.0);
  const double cy = (y1 + (h1 - 1) / 2.0) - (y0 + (h0 - 1) / 2.0);
  if (std::max(std::abs(cx), std::abs(cy)) < 1.0) {
    s.motion = Motion::kStatic;
  } else if (std::abs(cx) >= std::abs(cy)) {
    s.motion = cx > 0 ? Motion::kRight : Motion::kLeft;
  } else {
    s.motion = cy > 0 ? Motion::kDown : Motion::kUp;
  }

  const double margin = std::min(p.texture, 40.0);
  const int lo = static_cast<int>(margin);
  const int hi = 255 - lo;
  std::array<int, 3> bg{};
  std::array<int, 3> fg{};
  bool found = false;
  for (int attempt = 0; attempt < 1000 && !found; ++attempt) {
    for (int c = 0; c < 3; ++c) {
      bg[c] = rng.range(lo, hi);
      fg[c] = rng.range(lo, hi);
    }
    const auto lab_bg = srgb_to_lab(bg[0], bg[1], bg[2]);
    const auto lab_fg = srgb_to_lab(fg[0], fg[1], fg[2]);
    found = lab_distance(lab_bg, lab_fg) >= p.min_contrast;
  }
  if (!found) throw ParameterError(fmt::format("no actor colour reaches contrast {}", p.min_contrast));

  s.rgb.resize(s.shape.voxels() * 3);
  for (int t = 0; t < p.frames; ++t) {
    const Box& b = s.boxes[t];
    for (int y = 0; y < p.height; ++y) {
      for (int x = 0; x < p.width; ++x) {
        const bool inside = x >= b.x_min && x <= b.x_max && y >= b.y_min && y <= b.y_max;
        const auto& base = inside ? fg : bg;
        const double amp = inside ? p.texture / 2.0 : p.texture;
        const std::size_t i = s.shape.index(t, y, x) * 3;
        for (int c = 0; c < 3; ++c) s.rgb[i + c] = clamp_byte(base[c] + amp * (2.0 * rng.unit() - 1.0));
      }
    }
  }
  s.lab = volume_from_rgb(s.video_id, s.shape, s.rgb).voxels();
  return s;
}

std::vector<SyntheticScene> generate_scenes(int count, std::uint64_t seed, const SceneParams& params, double spread) {
  if (count < 0) throw ParameterError(fmt::format("scene count {} is negative", count));
  if (!(spread >= 0.0)) throw ParameterError(fmt::format("difficulty spread {} is negative", spread));
  std::vector<SyntheticScene> scenes(static_cast<std::size_t>(count));
  parallel_for(scenes.size(), [&](std::size_t i) {
    const double d = count > 1 ? static_cast<double>(i) / (count - 1) : 0.0;
    SceneParams p = params;
    p.texture = params.texture * (1.0 + spread * d);
    p.max_speed = params.max_speed * (1.0 + spread * d);
    scenes[i] = generate_scene(mix(seed, i), p, fmt::format("scene_{:04d}", i));
  });
  return scenes;
}

std::vector<Point> medial_scribble(const Bitmap& mask) {
  const int h = mask.height();
  const int w = mask.width();
  Bitmap outside(h + 2, w + 2);
  for (int y = 0; y < h + 2; ++y) {
    for (int x = 0; x < w + 2; ++x) {
      const bool in = y >= 1 && y <= h && x >= 1 && x <= w && mask.get(y - 1, x - 1);
      outside.set(y, x, !in);
    }
  }
  const auto dist = squared_distance_transform(outside);
  auto d2 = [&](int y, int x) { return dist[static_cast<std::size_t>(y + 1) * (w + 2) + (x + 1)]; };

  // A pixel is on the medial axis when it is a ridge of the distance map along
  // some line: neither neighbour is farther from the background and one is nearer.
  constexpr int kLines[4][2] = {{0, 1}, {1, 0}, {1, 1}, {1, -1}};
  std::vector<Point> out;
  double best = 0.0;
  Point deepest{};
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask.get(y, x)) continue;
      const double d = d2(y, x);
      if (d > best) {
        best = d;
        deepest = {x, y};
      }
      if (d < 4.0) continue;
      bool ridge = false;
      for (const auto& [dy, dx] : kLines) {
        const double a = d2(y - dy, x - dx);
        const double b = d2(y + dy, x + dx);
        if (a <= d && b <= d && (a < d || b < d)) ridge = true;
      }
      if (ridge) out.push_back({x, y});
    }
  }
  if (out.empty() && best > 0.0) out.push_back(deepest);
  return out;
}

double actor_cover_iou(const SyntheticScene& scene, const SuperpixelLabels& sp) {
  if (sp.shape != scene.shape) throw ValidationError("superpixels do not match the scene geometry");
  std::vector<std::size_t> total(sp.cluster_count(), 0);
  std::vector<std::size_t> inside(sp.cluster_count(), 0);
  std::size_t gt = 0;
  for (int t = 0; t < scene.shape.frames; ++t) {
    const Box& b = scene.boxes[t];
    for (int y = 0; y < scene.shape.height; ++y) {
      for (int x = 0; x < scene.shape.width; ++x) {
        const auto l = sp.at(t, y, x);
        ++total[l];
        if (x >= b.x_min && x <= b.x_max && y >= b.y_min && y <= b.y_max) {
          ++inside[l];
          ++gt;
        }
      }
    }
  }
  std::size_t covered = 0;
  std::size_t hit = 0;
  for (std::size_t l = 0; l < total.size(); ++l) {
    if (2 * inside[l] > total[l]) {
      covered += total[l];
      hit += inside[l];
    }
  }
  const std::size_t uni = covered + gt - hit;
  return uni == 0 ? 1.0 : static_cast<double>(hit) / static_cast<double>(uni);
}

namespace {

struct Overlap {
  std::size_t inter = 0;
  std::size_t uni = 0;
  void add(const Bitmap& a, const Bitmap& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      inter += (a.flat(i) && b.flat(i)) ? 1 : 0;
      uni += (a.flat(i) || b.flat(i)) ? 1 : 0;
    }
  }
  [[nodiscard]] double iou() const { return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni); }
};

Bitmap frame_of(const PseudoLabelSet& set, int t) {
  const auto& fr = set.frames[static_cast<std::size_t>(t)];
  return fr ? fr->rasterize(set.shape.height, set.shape.width) : Bitmap(set.shape.height, set.shape.width);
}

}  // namespace

double pseudo_label_iou(const SyntheticScene& scene, const PseudoLabelSet& set) {
  if (set.shape != scene.shape) throw ValidationError("pseudo-labels do not match the scene geometry");
  Overlap o;
  for (int t = 0; t < scene.shape.frames; ++t) o.add(frame_of(set, t), scene.mask(t));
  return o.iou();
}

std::vector<float> detector_map(const SyntheticScene& scene, double sigma, std::uint64_t seed) {
  Rng rng(splitmix(seed));
  std::vector<float> map(scene.shape.voxels());
  for (int t = 0; t < scene.shape.frames; ++t) {
    const Box& b = scene.boxes[t];
    for (int y = 0; y < scene.shape.height; ++y) {
      for (int x = 0; x < scene.shape.width; ++x) {
        const double gt = (x >= b.x_min && x <= b.x_max && y >= b.y_min && y <= b.y_max) ? 1.0 : 0.0;
        map[scene.shape.index(t, y, x)] = static_cast<float>(gt + sigma * rng.gaussian());
      }
    }
  }
  return map;
}

UncertaintyVolume map_uncertainty(const SyntheticScene& scene, const std::vector<float>& map) {
  UncertaintyVolume uv{scene.video_id, scene.shape, std::vector<float>(map.size())};
  for (std::size_t i = 0; i < map.size(); ++i) {
    const float d = map[i] - (map[i] >= 0.5F ? 1.0F : 0.0F);
    uv.values[i] = d * d;
  }
  return uv;
}

namespace {

// Thresholded 3x3 mean of one detector frame.
Bitmap predicted_mask(const Shape3& shape, const std::vector<float>& map, int t) {
  Bitmap m(shape.height, shape.width);
  for (int y = 0; y < shape.height; ++y) {
    for (int x = 0; x < shape.width; ++x) {
      double sum = 0.0;
      int n = 0;
      for (int v = std::max(0, y - 1); v <= std::min(shape.height - 1, y + 1); ++v) {
        for (int u = std::max(0, x - 1); u <= std::min(shape.width - 1, x + 1); ++u) {
          sum += map[shape.index(t, v, u)];
          ++n;
        }
      }
      m.set(y, x, sum / n >= 0.5);
    }
  }
  return m;
}

// Bounding box of the largest 4-connected component (lowest scan index wins ties).
std::optional<Box> largest_component(const Bitmap& m) {
  const int h = m.height();
  const int w = m.width();
  std::vector<int> seen(m.size(), 0);
  std::optional<Box> best;
  std::size_t best_size = 0;
  std::vector<int> stack;
  for (int start = 0; start < h * w; ++start) {
    if (!m.flat(start) || seen[start]) continue;
    Box b{w, h, -1, -1};
    std::size_t size = 0;
    stack.assign(1, start);
    seen[start] = 1;
    while (!stack.empty()) {
      const int i = stack.back();
      stack.pop_back();
      const int y = i / w;
      const int x = i % w;
      ++size;
      b = {std::min(b.x_min, x), std::min(b.y_min, y), std::max(b.x_max, x), std::max(b.y_max, y)};
      const int nb[4][2] = {{y - 1, x}, {y + 1, x}, {y, x - 1}, {y, x + 1}};
      for (const auto& [ny, nx] : nb) {
        if (ny < 0 || ny >= h || nx < 0 || nx >= w) continue;
        const int j = ny * w + nx;
        if (m.flat(j) && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
    if (size > best_size) {
      best_size = size;
      best = b;
    }
  }
  return best;
}

struct SceneEval {
  double target_iou = 0.0;
  double labeled_iou = 0.0;
  double annotated_iou = 0.0;
  bool spatial = false;
  std::vector<Detection> dets;
  std::vector<GroundTruth> gts;
  Tube det_tube;
  Tube gt_tube;
  bool has_det_tube = false;
};

SceneEval evaluate_scene(const SyntheticScene& scene, const std::vector<float>& map, const AnnotationRecord* rec,
                         const SuperpixelLabels* sp, const CampaignConfig& cfg) {
  SceneEval ev;
  const Shape3& shape = scene.shape;
  std::vector<Bitmap> predicted;
  for (int t = 0; t < shape.frames; ++t) predicted.push_back(predicted_mask(shape, map, t));

  if (rec != nullptr && !rec->tag_only()) {
    ev.spatial = true;
    const auto set = build_pseudolabels(*rec, shape, sp, cfg.weights, cfg.mode);
    ev.labeled_iou = pseudo_label_iou(scene, set);
    ev.target_iou = ev.labeled_iou;
    Overlap annotated;
    std::vector<int> frames;
    for (const auto& e : rec->entries) frames.push_back(e.frame);
    std::sort(frames.begin(), frames.end());
    frames.erase(std::unique(frames.begin(), frames.end()), frames.end());
    for (int f : frames) annotated.add(frame_of(set, f), scene.mask(f));
    ev.annotated_iou = annotated.iou();
  } else {
    Overlap o;
    for (int t = 0; t < shape.frames; ++t) o.add(predicted[t], scene.mask(t));
    ev.target_iou = o.iou();
  }

  if (rec == nullptr) return ev;
  ev.det_tube = {scene.video_id, scene.label(), 0.0, {}};
  ev.gt_tube = {scene.video_id, scene.label(), 1.0, {}};
  double conf_sum = 0.0;
  for (int t = 0; t < shape.frames; ++t) {
    ev.gts.push_back({scene.video_id, t, scene.boxes[t], scene.label()});
    ev.gt_tube.boxes[t] = scene.boxes[t];
    const auto box = largest_component(predicted[t]);
    if (!box) continue;
    double sum = 0.0;
    for (int y = box->y_min; y <= box->y_max; ++y) {
      for (int x = box->x_min; x <= box->x_max; ++x) sum += map[shape.index(t, y, x)];
    }
    const double conf = std::clamp(sum / static_cast<double>(box->area()), 0.0, 1.0);
    ev.dets.push_back({scene.video_id, t, *box, scene.label(), conf});
    ev.det_tube.boxes[t] = *box;
    conf_sum += conf;
  }
  if (!ev.det_tube.boxes.empty()) {
    ev.det_tube.confidence = conf_sum / static_cast<double>(ev.det_tube.boxes.size());
    ev.has_det_tube = true;
  }
  return ev;
}

std::vector<SuperpixelLabels> segment_all(const std::vector<SyntheticScene>& scenes, const SlicConfig& slic) {
  std::vector<SuperpixelLabels> out(scenes.size());
  parallel_for(scenes.size(), [&](std::size_t i) { out[i] = segment(scenes[i].volume(), slic); });
  return out;
}

}  // namespace

void CampaignConfig::validate() const {
  if (rounds < 0) throw ConfigError(fmt::format("round count {} is negative", rounds));
  if (!(noise >= 0.0) || !(noise_spread >= 0.0)) throw ConfigError("detector noise must be non-negative");
  budget.validate(0.0);
  costs.validate();
  weights.validate();
}

std::vector<RoundReport> run_campaign(const std::vector<SyntheticScene>& scenes, const CampaignConfig& cfg) {
  cfg.validate();
  std::vector<RoundReport> reports;
  if (cfg.rounds == 0) return reports;
  if (scenes.empty()) throw ValidationError("campaign needs at least one scene");
  const std::size_t n = scenes.size();
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < n; ++i) {
    if (!index.emplace(scenes[i].video_id, i).second) {
      throw ValidationError(fmt::format("duplicate scene id '{}'", scenes[i].video_id));
    }
  }
  for (const auto& s : scenes) cfg.slic.validate(s.shape);

  const bool needs_sp = cfg.mode == PseudoMode::kSuperpixel && cfg.budget.scribble_pct > 0.0;
  const auto superpixels = needs_sp ? segment_all(scenes, cfg.slic) : std::vector<SuperpixelLabels>{};

  DatasetSplit split;
  for (const auto& [id, _] : index) split.unlabeled.push_back(id);
  std::map<std::string, AnnotationRecord> records;
  double cumulative = 0.0;
  double mean_frames = 0.0;
  for (const auto& s : scenes) mean_frames += s.shape.frames;
  mean_frames /= static_cast<double>(n);

  for (int round = 1; round <= cfg.rounds; ++round) {
    RoundReport rep;
    rep.round_index = round;
    rep.policy = to_string(cfg.policy.kind);

    std::vector<std::vector<float>> maps(n);
    std::vector<UncertaintyVolume> unc(n);
    parallel_for(n, [&](std::size_t i) {
      const double d = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.0;
      const double sigma = cfg.noise * (1.0 + cfg.noise_spread * d);
      maps[i] = detector_map(scenes[i], sigma, mix(cfg.seed, static_cast<std::uint64_t>(round), i));
      unc[i] = map_uncertainty(scenes[i], maps[i]);
    });
    std::map<std::string, double> scores;
    std::map<std::string, std::vector<double>> frame_score_map;
    for (std::size_t i = 0; i < n; ++i) {
      scores[scenes[i].video_id] = video_uncertainty(unc[i]);
      frame_score_map[scenes[i].video_id] = frame_scores(unc[i]);
    }

    auto want = [&](double pct) { return static_cast<std::size_t>(std::llround(pct * static_cast<double>(n) / 100.0)); };
    BucketCounts counts{want(cfg.budget.box_pct), want(cfg.budget.scribble_pct), want(cfg.budget.tag_pct)};
    const std::size_t available = split.unlabeled.size();
    if (counts.total() > available) {
      rep.warnings.push_back(fmt::format("round {}: budget requests {} videos but only {} remain unlabeled; plan truncated",
                                         round, counts.total(), available));
      std::size_t left = available;
      counts.box = std::min(counts.box, left);
      left -= counts.box;
      counts.scribble = std::min(counts.scribble, left);
      left -= counts.scribble;
      counts.tag = std::min(counts.tag, left);
    }
    split.round_index = round;
    SelectionPolicy policy = cfg.policy;
    policy.seed = mix(cfg.policy.seed, static_cast<std::uint64_t>(round));
    auto plan = select(split, scores, counts, cfg.budget, frame_score_map, policy);
    rep.round_cost_hours = plan_cost(plan, cfg.costs, mean_frames, cfg.geometry);
    cumulative += rep.round_cost_hours;
    rep.cumulative_cost_hours = cumulative;

    for (const auto& e : plan.entries) {
      const auto& scene = scenes[index.at(e.video_id)];
      auto& rec = records[e.video_id];
      rec.video_id = e.video_id;
      rec.class_tag = scene.label();
      for (int f : e.frames) {
        if (e.bucket == Bucket::kBox && cfg.geometry == BoxGeometry::kBox) {
          rec.entries.push_back({f, AnnotationKind::kBox, scene.boxes[f]});
        } else if (e.bucket == Bucket::kBox) {
          rec.entries.push_back({f, AnnotationKind::kMask, scene.mask(f)});
        } else {
          rec.entries.push_back({f, AnnotationKind::kScribble, medial_scribble(scene.mask(f))});
        }
      }
      split.unlabeled.erase(std::find(split.unlabeled.begin(), split.unlabeled.end(), e.video_id));
      split.labeled.insert(std::lower_bound(split.labeled.begin(), split.labeled.end(), e.video_id), e.video_id);
    }

    std::vector<SceneEval> evals(n);
    parallel_for(n, [&](std::size_t i) {
      const auto it = records.find(scenes[i].video_id);
      evals[i] = evaluate_scene(scenes[i], maps[i], it == records.end() ? nullptr : &it->second,
                                needs_sp ? &superpixels[i] : nullptr, cfg);
    });

    std::vector<Detection> dets;
    std::vector<GroundTruth> gts;
    std::vector<Tube> det_tubes;
    std::vector<Tube> gt_tubes;
    double target_sum = 0.0;
    double labeled_sum = 0.0;
    double annotated_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& ev = evals[i];
      target_sum += ev.target_iou;
      if (ev.spatial) {
        ++rep.spatial_videos;
        labeled_sum += ev.labeled_iou;
        annotated_sum += ev.annotated_iou;
      }
      dets.insert(dets.end(), ev.dets.begin(), ev.dets.end());
      gts.insert(gts.end(), ev.gts.begin(), ev.gts.end());
      if (records.count(scenes[i].video_id) != 0) gt_tubes.push_back(ev.gt_tube);
      if (ev.has_det_tube) det_tubes.push_back(ev.det_tube);
    }
    rep.labeled_videos = split.labeled.size();
    rep.mean_pseudo_label_iou = target_sum / static_cast<double>(n);
    if (rep.spatial_videos > 0) {
      rep.labeled_pseudo_label_iou = labeled_sum / static_cast<double>(rep.spatial_videos);
      rep.annotated_frame_iou = annotated_sum / static_cast<double>(rep.spatial_videos);
    }
    rep.f_map_02 = frame_map(dets, gts, 0.2);
    rep.f_map_05 = frame_map(dets, gts, 0.5);
    rep.v_map_02 = video_map(det_tubes, gt_tubes, 0.2);
    rep.v_map_05 = video_map(det_tubes, gt_tubes, 0.5);
    reports.push_back(std::move(rep));
  }
  return reports;
}

std::vector<AblationLevel> default_ablation_levels() {
  return {{30.0, 1.5}, {50.0, 3.0}, {70.0, 4.5}, {90.0, 6.0}, {100.0, 7.5}, {100.0, 9.0}};
}

std::vector<AblationResult> run_ablation(const std::vector<SyntheticScene>& scenes,
                                         const std::vector<AblationLevel>& levels, const SlicConfig& slic,
                                         const WeightConfig& weights) {
  weights.validate();
  if (scenes.empty()) throw ValidationError("ablation needs at least one scene");
  for (const auto& s : scenes) slic.validate(s.shape);
  const auto superpixels = segment_all(scenes, slic);
  const int n = static_cast<int>(scenes.size());

  std::vector<AblationResult> out;
  for (const auto& level : levels) {
    if (!(level.video_pct > 0.0 && level.video_pct <= 100.0) || !(level.frame_pct > 0.0) ||
        level.frame_pct > level.video_pct) {
      throw ConfigError(fmt::format("ablation level {}% videos / {}% frames is not feasible", level.video_pct,
                                    level.frame_pct));
    }
    const int videos = std::clamp(static_cast<int>(std::lround(level.video_pct * n / 100.0)), 1, n);
    const auto chosen = uniform_frames(n, videos);
    std::vector<double> sp_iou(chosen.size());
    std::vector<double> box_iou_v(chosen.size());
    parallel_for(chosen.size(), [&](std::size_t j) {
      const auto& scene = scenes[static_cast<std::size_t>(chosen[j])];
      const int t = scene.shape.frames;
      const int k = std::clamp(static_cast<int>(std::lround(t * level.frame_pct / level.video_pct)), 1, t);
      AnnotationRecord rec{scene.video_id, scene.label(), {}};
      for (int f : uniform_frames(t, k)) {
        if (j % 2 == 0) {
          rec.entries.push_back({f, AnnotationKind::kMask, scene.mask(f)});
        } else {
          rec.entries.push_back({f, AnnotationKind::kScribble, medial_scribble(scene.mask(f))});
        }
      }
      const auto* sp = &superpixels[static_cast<std::size_t>(chosen[j])];
      sp_iou[j] = pseudo_label_iou(scene, build_pseudolabels(rec, scene.shape, sp, weights, PseudoMode::kSuperpixel));
      box_iou_v[j] =
          pseudo_label_iou(scene, build_pseudolabels(rec, scene.shape, sp, weights, PseudoMode::kScribbleBox));
    });
    const auto mean = [](const std::vector<double>& v) {
      return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    };
    out.push_back({level, mean(sp_iou), mean(box_iou_v)});
  }
  return out;
}

std::string serialize_reports(const std::vector<RoundReport>& reports) {
  ordered_json arr = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json j;
    j["round"] = r.round_index;
    j["policy"] = r.policy;
    j["round_cost_hours"] = r.round_cost_hours;
    j["cumulative_cost_hours"] = r.cumulative_cost_hours;
    j["labeled_videos"] = r.labeled_videos;
    j["spatial_videos"] = r.spatial_videos;
    j["mean_pseudo_label_iou"] = r.mean_pseudo_label_iou;
    j["labeled_pseudo_label_iou"] = r.labeled_pseudo_label_iou;
    j["annotated_frame_iou"] = r.annotated_frame_iou;
    j["f_map"] = {{"0.2", r.f_map_02}, {"0.5", r.f_map_05}};
    j["v_map"] = {{"0.2", r.v_map_02}, {"0.5", r.v_map_05}};
    j["warnings"] = r.warnings;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

std::vector<RoundReport> parse_reports(std::string_view text) {
  std::vector<RoundReport> out;
  try {
    for (const auto& j : json::parse(text)) {
      RoundReport r;
      r.round_index = j.at("round").get<int>();
      r.policy = j.at("policy").get<std::string>();
      r.round_cost_hours = j.at("round_cost_hours").get<double>();
      r.cumulative_cost_hours = j.at("cumulative_cost_hours").get<double>();
      r.labeled_videos = j.at("labeled_videos").get<std::size_t>();
      r.spatial_videos = j.at("spatial_videos").get<std::size_t>();
      r.mean_pseudo_label_iou = j.at("mean_pseudo_label_iou").get<double>();
      r.labeled_pseudo_label_iou = j.at("labeled_pseudo_label_iou").get<double>();
      r.annotated_frame_iou = j.at("annotated_frame_iou").get<double>();
      r.f_map_02 = j.at("f_map").at("0.2").get<double>();
      r.f_map_05 = j.at("f_map").at("0.5").get<double>();
      r.v_map_02 = j.at("v_map").at("0.2").get<double>();
      r.v_map_05 = j.at("v_map").at("0.5").get<double>();
      r.warnings = j.value("warnings", std::vector<std::string>{});
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("report: {}", e.what()));
  }
  return out;
}

std::string reports_csv(const std::vector<RoundReport>& reports) {
  std::string out =
      "round,policy,round_cost_hours,cumulative_cost_hours,labeled_videos,spatial_videos,mean_pseudo_label_iou,"
      "labeled_pseudo_label_iou,annotated_frame_iou,f_map_0.2,f_map_0.5,v_map_0.2,v_map_0.5\n";
  for (const auto& r : reports) {
    out += fmt::format("{},{},{:.6f},{:.6f},{},{},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f},{:.6f}\n", r.round_index,
                       r.policy, r.round_cost_hours, r.cumulative_cost_hours, r.labeled_videos, r.spatial_videos,
                       r.mean_pseudo_label_iou, r.labeled_pseudo_label_iou, r.annotated_frame_iou, r.f_map_02,
                       r.f_map_05, r.v_map_02, r.v_map_05);
  }
  return out;
}

}  // namespace omvid
