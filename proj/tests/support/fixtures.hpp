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

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "omvid/types.hpp"

namespace omvid::testing {

// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / fmt::format("omvid-{:016x}", (std::uint64_t{rd()} << 32) | rd());
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const std::filesystem::path& path() const { return path_; }
  [[nodiscard]] std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

// Left half one colour, right half another, constant over time.
inline std::vector<std::uint8_t> halves_rgb(const Shape3& s) {
  std::vector<std::uint8_t> rgb(s.voxels() * 3);
  for (int t = 0; t < s.frames; ++t) {
    for (int y = 0; y < s.height; ++y) {
      for (int x = 0; x < s.width; ++x) {
        const auto i = s.index(t, y, x) * 3;
        const bool left = x < s.width / 2;
        rgb[i] = left ? 200 : 20;
        rgb[i + 1] = left ? 30 : 180;
        rgb[i + 2] = left ? 40 : 60;
      }
    }
  }
  return rgb;
}

inline std::vector<std::uint8_t> random_rgb(std::mt19937_64& rng, const Shape3& s) {
  std::vector<std::uint8_t> rgb(s.voxels() * 3);
  for (auto& v : rgb) v = static_cast<std::uint8_t>(rng() & 0xFF);
  return rgb;
}

inline Bitmap random_bitmap(std::mt19937_64& rng, int h, int w, double density = 0.5) {
  std::bernoulli_distribution on(density);
  Bitmap m(h, w);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) m.set(y, x, on(rng));
  }
  return m;
}

// Random label volume in which every one of the k labels occurs.
inline SuperpixelLabels random_labels(std::mt19937_64& rng, const Shape3& s, std::uint32_t k) {
  SuperpixelLabels sp;
  sp.video_id = "rand";
  sp.shape = s;
  sp.labels.resize(s.voxels());
  std::uniform_int_distribution<std::uint32_t> pick(0, k - 1);
  for (auto& l : sp.labels) l = pick(rng);
  for (std::uint32_t i = 0; i < k && i < sp.labels.size(); ++i) sp.labels[i] = i;
  std::shuffle(sp.labels.begin(), sp.labels.end(), rng);
  std::uniform_real_distribution<float> f(-50.0F, 50.0F);
  sp.clusters.resize(k);
  for (auto& c : sp.clusters) {
    for (auto& p : c.position) p = f(rng);
    for (auto& v : c.feature) v = f(rng);
  }
  return sp;
}

inline AnnotationRecord random_record(std::mt19937_64& rng, const Shape3& s, const std::string& id) {
  AnnotationRecord rec;
  rec.video_id = id;
  rec.class_tag = static_cast<int>(rng() % 24);
  std::uniform_int_distribution<int> xs(0, s.width - 1);
  std::uniform_int_distribution<int> ys(0, s.height - 1);
  for (int f = 0; f < s.frames; ++f) {
    for (int k = 0; k < 4; ++k) {
      if (rng() % 3 != 0) continue;
      const auto kind = static_cast<AnnotationKind>(k);
      AnnotationEntry e{f, kind, {}};
      switch (kind) {
        case AnnotationKind::kPoint: e.payload = Point{xs(rng), ys(rng)}; break;
        case AnnotationKind::kScribble: {
          Scribble s1;
          const int n = 1 + static_cast<int>(rng() % 6);
          for (int i = 0; i < n; ++i) s1.push_back({xs(rng), ys(rng)});
          e.payload = s1;
          break;
        }
        case AnnotationKind::kBox: {
          int x0 = xs(rng), x1 = xs(rng), y0 = ys(rng), y1 = ys(rng);
          e.payload = Box{std::min(x0, x1), std::min(y0, y1), std::max(x0, x1), std::max(y0, y1)};
          break;
        }
        case AnnotationKind::kMask: e.payload = random_bitmap(rng, s.height, s.width, 0.3); break;
      }
      rec.entries.push_back(std::move(e));
    }
  }
  return rec;
}

}  // namespace omvid::testing
