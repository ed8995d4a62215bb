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

#include "omvid/selection.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <random>

#include <Eigen/Dense>
#include <fmt/core.h>
#include <fmt/ranges.h>
#include <json.hpp>

#include "binary_io.hpp"
#include "omvid/errors.hpp"
#include "omvid/io.hpp"

namespace omvid {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void UncertaintyVolume::validate() const {
  if (!shape.valid() || values.size() != shape.voxels()) {
    throw ValidationError(fmt::format("uncertainty '{}': {} values for shape {}x{}x{}", video_id, values.size(),
                                      shape.frames, shape.height, shape.width));
  }
  for (float v : values) {
    if (!(v >= 0.0F)) throw ValidationError(fmt::format("uncertainty '{}': negative or NaN entry {}", video_id, v));
  }
}

double frame_uncertainty(std::span<const float> pixels) {
  double sum = 0.0;
  for (float v : pixels) {
    if (!(v >= 0.0F)) throw ValidationError(fmt::format("uncertainty entry {} is negative", v));
    sum += v;
  }
  return sum;
}

std::vector<double> frame_scores(const UncertaintyVolume& uv) {
  uv.validate();
  std::vector<double> out(static_cast<std::size_t>(uv.shape.frames));
  for (int t = 0; t < uv.shape.frames; ++t) out[t] = frame_uncertainty(uv.frame(t));
  return out;
}

double video_uncertainty(const UncertaintyVolume& uv) {
  const auto scores = frame_scores(uv);
  return std::accumulate(scores.begin(), scores.end(), 0.0) / static_cast<double>(scores.size());
}

std::vector<std::uint8_t> encode_uncertainty(const UncertaintyVolume& uv) {
  uv.validate();
  detail::LeWriter w;
  w.reserve(20 + uv.values.size() * 4);
  w.magic("UNC1");
  w.u32(static_cast<std::uint32_t>(uv.shape.frames));
  w.u32(static_cast<std::uint32_t>(uv.shape.height));
  w.u32(static_cast<std::uint32_t>(uv.shape.width));
  w.u32(0);
  for (float v : uv.values) w.f32(v);
  return w.take();
}

UncertaintyVolume decode_uncertainty(std::span<const std::uint8_t> bytes, std::string video_id) {
  detail::LeReader r(bytes, "UNC1");
  r.expect_magic("UNC1");
  UncertaintyVolume uv;
  uv.video_id = std::move(video_id);
  uv.shape.frames = static_cast<int>(r.u32());
  uv.shape.height = static_cast<int>(r.u32());
  uv.shape.width = static_cast<int>(r.u32());
  if (r.u32() != 0) throw FormatError("UNC1: cluster count field must be 0");
  if (!uv.shape.valid()) throw FormatError("UNC1: zero dimension in header");
  r.need(uv.shape.voxels() * 4, "payload");
  uv.values.resize(uv.shape.voxels());
  for (float& v : uv.values) v = r.f32();
  if (r.remaining() != 0) throw FormatError(fmt::format("UNC1: {} trailing bytes", r.remaining()));
  return uv;
}

void write_uncertainty(const UncertaintyVolume& uv, const fs::path& file) {
  write_file_bytes(file, encode_uncertainty(uv));
}

UncertaintyVolume read_uncertainty(const fs::path& file) {
  return decode_uncertainty(read_file_bytes(file), file.stem().string());
}

std::map<std::string, UncertaintyVolume> read_uncertainty_dir(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw FormatError(fmt::format("uncertainty directory '{}' does not exist", dir.string()));
  std::map<std::string, UncertaintyVolume> out;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".unc") continue;
    auto uv = read_uncertainty(entry.path());
    out.emplace(uv.video_id, std::move(uv));
  }
  return out;
}

const char* to_string(Bucket b) {
  switch (b) {
    case Bucket::kBox: return "box";
    case Bucket::kScribble: return "scribble";
    case Bucket::kTag: return "tag";
  }
  return "?";
}

const char* to_string(PolicyKind p) { return p == PolicyKind::kBucket ? "bucket" : "random"; }

void BudgetConfig::validate(double labeled_pct) const {
  for (auto [name, v] : {std::pair{"box", box_pct}, {"scribble", scribble_pct}, {"tag", tag_pct}}) {
    if (!(v >= 0.0 && v <= 100.0)) throw ConfigError(fmt::format("{} percentage {} outside [0, 100]", name, v));
  }
  if (frames_per_video_box < 1 || frames_per_video_scribble < 1) {
    throw ConfigError("frames per video must be at least 1");
  }
  if (min_frame_gap < 1) throw ConfigError(fmt::format("minimum frame gap {} < 1", min_frame_gap));
  const double requested = box_pct + scribble_pct + tag_pct;
  const double available = 100.0 - labeled_pct;
  if (requested > available + 1e-9) {
    throw BudgetError(fmt::format(
        "infeasible budget: box {}% + scribble {}% + tag {}% = {}% exceeds the {}% of videos still unlabeled", box_pct,
        scribble_pct, tag_pct, requested, available));
  }
}

BucketCounts bucket_counts(const DatasetSplit& split, const BudgetConfig& bc) {
  split.validate();
  const double total = static_cast<double>(split.total());
  if (total == 0) throw BudgetError("no videos to select from");
  bc.validate(100.0 * static_cast<double>(split.labeled.size()) / total);
  auto count = [&](double pct) { return static_cast<std::size_t>(std::llround(pct * total / 100.0)); };
  BucketCounts c{count(bc.box_pct), count(bc.scribble_pct), count(bc.tag_pct)};
  if (c.total() > split.unlabeled.size()) {
    throw BudgetError(fmt::format("budget requests {} videos but only {} are unlabeled", c.total(),
                                  split.unlabeled.size()));
  }
  return c;
}

std::vector<int> uniform_frames(int frames, int count) {
  count = std::min(count, frames);
  std::vector<int> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(static_cast<int>((2LL * i + 1) * frames / (2LL * count)));
  }
  return out;
}

std::vector<int> pick_frames(std::span<const double> scores, int count, int min_gap, bool* fallback) {
  const int frames = static_cast<int>(scores.size());
  count = std::min(count, frames);
  if (fallback) *fallback = false;
  std::vector<int> order(static_cast<std::size_t>(frames));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return scores[a] > scores[b]; });
  std::vector<int> chosen;
  for (int f : order) {
    if (static_cast<int>(chosen.size()) == count) break;
    const bool clear = std::all_of(chosen.begin(), chosen.end(), [&](int c) { return std::abs(c - f) >= min_gap; });
    if (clear) chosen.push_back(f);
  }
  if (static_cast<int>(chosen.size()) < count) {
    if (fallback) *fallback = true;
    return uniform_frames(frames, count);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

namespace {

// Portable uniform integer in [0, n): rejection sampling on raw mt19937_64
// output, so plans do not depend on the standard library's distributions.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  const std::uint64_t range = n;
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % range + 1) % range;
  std::uint64_t v = rng();
  while (v > limit) v = rng();
  return static_cast<std::size_t>(v % range);
}

const std::vector<double>& frames_for(const std::map<std::string, std::vector<double>>& frame_scores,
                                      const std::string& id) {
  const auto it = frame_scores.find(id);
  if (it == frame_scores.end() || it->second.empty()) {
    throw ValidationError(fmt::format("no frame scores for video '{}'", id));
  }
  return it->second;
}

}  // namespace

SelectionPlan select(const DatasetSplit& split, const std::map<std::string, double>& scores, const BudgetConfig& bc,
                     const std::map<std::string, std::vector<double>>& frame_scores, const SelectionPolicy& policy) {
  return select(split, scores, bucket_counts(split, bc), bc, frame_scores, policy);
}

SelectionPlan select(const DatasetSplit& split, const std::map<std::string, double>& scores,
                     const BucketCounts& counts, const BudgetConfig& bc,
                     const std::map<std::string, std::vector<double>>& frame_scores, const SelectionPolicy& policy) {
  split.validate();
  if (counts.total() > split.unlabeled.size()) {
    throw BudgetError(fmt::format("budget requests {} videos but only {} are unlabeled", counts.total(),
                                  split.unlabeled.size()));
  }
  std::vector<std::pair<std::string, double>> ranked;
  for (const auto& id : split.unlabeled) {
    const auto it = scores.find(id);
    if (it == scores.end()) {
      if (policy.kind == PolicyKind::kBucket) throw ValidationError(fmt::format("no score for video '{}'", id));
      ranked.emplace_back(id, 0.0);
    } else {
      ranked.emplace_back(id, it->second);
    }
  }
  if (policy.kind == PolicyKind::kBucket) {
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
  } else {
    std::sort(ranked.begin(), ranked.end());
    std::mt19937_64 rng(policy.seed);
    for (std::size_t i = ranked.size(); i > 1; --i) std::swap(ranked[i - 1], ranked[uniform_index(rng, i)]);
  }

  SelectionPlan plan;
  plan.round = split.round_index;
  plan.policy = to_string(policy.kind);
  std::size_t next = 0;
  auto take = [&](std::size_t n, Bucket bucket, int frames_per_video) {
    for (std::size_t i = 0; i < n; ++i, ++next) {
      PlanEntry e{ranked[next].first, ranked[next].second, bucket, {}, false};
      if (bucket != Bucket::kTag) {
        const auto& fs = frames_for(frame_scores, e.video_id);
        if (policy.kind == PolicyKind::kBucket) {
          e.frames = pick_frames(fs, frames_per_video, bc.min_frame_gap, &e.uniform_fallback);
        } else {
          e.frames = uniform_frames(static_cast<int>(fs.size()), frames_per_video);
          for (std::size_t k = 1; k < e.frames.size(); ++k) {
            if (e.frames[k] - e.frames[k - 1] < bc.min_frame_gap) e.uniform_fallback = true;
          }
        }
      }
      plan.entries.push_back(std::move(e));
    }
  };
  take(counts.box, Bucket::kBox, bc.frames_per_video_box);
  take(counts.scribble, Bucket::kScribble, bc.frames_per_video_scribble);
  take(counts.tag, Bucket::kTag, 0);
  return plan;
}

AnnotationMix plan_mix(const SelectionPlan& plan, double mean_frames_per_video, BoxGeometry geometry) {
  AnnotationMix mix;
  for (const auto& e : plan.entries) {
    mix.tags += 1.0;
    if (e.bucket == Bucket::kTag) continue;
    const double frames = e.frames.empty() ? mean_frames_per_video : static_cast<double>(e.frames.size());
    if (e.bucket == Bucket::kScribble) {
      mix.scribbles += frames;
    } else if (geometry == BoxGeometry::kMask) {
      mix.masks += frames;
    } else {
      mix.boxes += frames;
    }
  }
  return mix;
}

double mix_cost_hours(const AnnotationMix& mix, const CostTable& ct) {
  return (mix.tags * ct.tag_s + mix.points * ct.point_s + mix.scribbles * ct.scribble_s + mix.boxes * ct.box_s +
          mix.masks * ct.mask_s) /
         3600.0;
}

double plan_cost(const SelectionPlan& plan, const CostTable& ct, double mean_frames_per_video, BoxGeometry geometry) {
  ct.validate();
  return mix_cost_hours(plan_mix(plan, mean_frames_per_video, geometry), ct);
}

const char* to_string(CostItem item) {
  switch (item) {
    case CostItem::kTag: return "tag_s";
    case CostItem::kPoint: return "point_s";
    case CostItem::kScribble: return "scribble_s";
    case CostItem::kBox: return "box_s";
    case CostItem::kMask: return "mask_s";
  }
  return "?";
}

namespace {

constexpr std::array<CostItem, 5> kAllItems{CostItem::kTag, CostItem::kPoint, CostItem::kScribble, CostItem::kBox,
                                            CostItem::kMask};

double item_count(const AnnotationMix& mix, CostItem item) {
  switch (item) {
    case CostItem::kTag: return mix.tags;
    case CostItem::kPoint: return mix.points;
    case CostItem::kScribble: return mix.scribbles;
    case CostItem::kBox: return mix.boxes;
    case CostItem::kMask: return mix.masks;
  }
  return 0.0;
}

double& item_cost(CostTable& ct, CostItem item) {
  switch (item) {
    case CostItem::kTag: return ct.tag_s;
    case CostItem::kPoint: return ct.point_s;
    case CostItem::kScribble: return ct.scribble_s;
    case CostItem::kBox: return ct.box_s;
    case CostItem::kMask: return ct.mask_s;
  }
  return ct.tag_s;
}

}  // namespace

CostFit fit_cost_table(std::span<const CostObservation> observations, const CostTable& base,
                       std::optional<std::vector<CostItem>> free_items) {
  if (observations.empty()) throw CalibrationError("cost calibration needs at least one observation");
  std::vector<CostItem> free;
  if (free_items) {
    free = *free_items;
  } else {
    for (auto item : kAllItems) {
      const bool used = std::any_of(observations.begin(), observations.end(),
                                    [&](const CostObservation& o) { return item_count(o.mix, item) != 0.0; });
      if (used) free.push_back(item);
    }
  }
  if (free.empty()) throw CalibrationError("cost calibration has no free unit costs");

  const auto m = static_cast<Eigen::Index>(observations.size());
  const auto n = static_cast<Eigen::Index>(free.size());
  Eigen::MatrixXd a(m, n);
  Eigen::VectorXd rhs(m);
  CostTable fixed = base;
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& obs = observations[static_cast<std::size_t>(i)];
    // Hours paid by the costs held fixed are moved to the right-hand side.
    double known = 0.0;
    for (auto item : kAllItems) {
      if (std::find(free.begin(), free.end(), item) == free.end()) {
        known += item_count(obs.mix, item) * item_cost(fixed, item) / 3600.0;
      }
    }
    rhs(i) = obs.hours - known;
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = item_count(obs.mix, free[static_cast<std::size_t>(j)]) / 3600.0;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < n) {
    // Costs with a component in the null space cannot be told apart.
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const Eigen::MatrixXd null = svd.matrixV().rightCols(n - qr.rank());
    std::vector<std::string> names;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (null.row(j).norm() > 1e-9) names.emplace_back(to_string(free[static_cast<std::size_t>(j)]));
    }
    throw CalibrationError(fmt::format("cost calibration is rank deficient ({} observations, {} free costs); "
                                       "unidentifiable: {}",
                                       m, n, fmt::join(names, ", ")));
  }
  const Eigen::VectorXd x = qr.solve(rhs);

  CostFit fit;
  fit.table = base;
  fit.fitted = free;
  for (Eigen::Index j = 0; j < n; ++j) item_cost(fit.table, free[static_cast<std::size_t>(j)]) = x(j);
  for (const auto& obs : observations) fit.residuals_hours.push_back(obs.hours - mix_cost_hours(obs.mix, fit.table));
  return fit;
}

std::string serialize_plan(const SelectionPlan& plan) {
  ordered_json j;
  j["round"] = plan.round;
  j["policy"] = plan.policy;
  j["entries"] = ordered_json::array();
  for (const auto& e : plan.entries) {
    ordered_json je;
    je["video_id"] = e.video_id;
    je["score"] = e.score;
    je["bucket"] = to_string(e.bucket);
    je["frames"] = e.frames;
    je["uniform_fallback"] = e.uniform_fallback;
    j["entries"].push_back(std::move(je));
  }
  j["projected_cost_hours"] = plan.projected_cost_hours;
  return j.dump(2) + "\n";
}

SelectionPlan parse_plan(std::string_view text) {
  SelectionPlan plan;
  try {
    const auto j = json::parse(text);
    plan.round = j.value("round", 1);
    plan.policy = j.value("policy", std::string("bucket"));
    plan.projected_cost_hours = j.value("projected_cost_hours", 0.0);
    if (!j.is_object()) throw FormatError("plan: top level must be an object");
    for (const auto& je : j.value("entries", json::array())) {
      PlanEntry e;
      e.video_id = je.at("video_id").get<std::string>();
      e.score = je.value("score", 0.0);
      const auto bucket = je.at("bucket").get<std::string>();
      if (bucket == "box") {
        e.bucket = Bucket::kBox;
      } else if (bucket == "scribble") {
        e.bucket = Bucket::kScribble;
      } else if (bucket == "tag") {
        e.bucket = Bucket::kTag;
      } else {
        throw FormatError(fmt::format("plan: unknown bucket '{}'", bucket));
      }
      e.frames = je.value("frames", std::vector<int>{});
      e.uniform_fallback = je.value("uniform_fallback", false);
      if (e.bucket == Bucket::kTag && !e.frames.empty()) {
        throw ValidationError(fmt::format("plan: tag entry '{}' lists frames", e.video_id));
      }
      plan.entries.push_back(std::move(e));
    }
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("plan: {}", e.what()));
  }
  return plan;
}

SelectionPlan read_plan(const fs::path& file) {
  const auto bytes = read_file_bytes(file);
  return parse_plan(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

CostTable parse_cost_table(std::string_view text) {
  CostTable ct;
  try {
    const auto j = json::parse(text);
    ct.tag_s = j.value("tag_s", ct.tag_s);
    ct.point_s = j.value("point_s", ct.point_s);
    ct.scribble_s = j.value("scribble_s", ct.scribble_s);
    ct.box_s = j.value("box_s", ct.box_s);
    ct.mask_s = j.value("mask_s", ct.mask_s);
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("cost table: {}", e.what()));
  }
  ct.validate();
  return ct;
}

std::string serialize_cost_table(const CostTable& ct) {
  ordered_json j;
  j["tag_s"] = ct.tag_s;
  j["point_s"] = ct.point_s;
  j["scribble_s"] = ct.scribble_s;
  j["box_s"] = ct.box_s;
  j["mask_s"] = ct.mask_s;
  return j.dump(2) + "\n";
}

}  // namespace omvid
