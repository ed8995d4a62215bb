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

#include "omvid/superpixel3d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/core.h>

#include "omvid/errors.hpp"
#include "omvid/parallel.hpp"

namespace omvid {

namespace {

constexpr int kWeiszfeldSteps = 4;
constexpr double kStopFraction = 0.001;

// Centroid held in double but always float-representable, so the state the
// iteration measures is exactly the state a snapshot would serialize.
struct Centroid {
  std::array<double, 3> pos{};
  std::array<double, 9> feat{};
};

double round_f(double v) { return static_cast<double>(static_cast<float>(v)); }

template <std::size_t N>
double norm_diff(const std::array<float, N>& a, const std::array<double, N>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double d = static_cast<double>(a[i]) - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

struct Geometry {
  Shape3 shape;
  double rho;
  double spatial_weight;  // m / S
  double window_xy;
  double window_z;
};

double position_distance(const Geometry& g, int t, int y, int x, const std::array<double, 3>& c) {
  const double dx = x - c[0];
  const double dy = y - c[1];
  const double dz = g.rho * (t - c[2]);
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

bool in_window(const Geometry& g, int t, int y, int x, const std::array<double, 3>& c) {
  return std::abs(x - c[0]) <= g.window_xy && std::abs(y - c[1]) <= g.window_xy && std::abs(t - c[2]) <= g.window_z;
}

double voxel_cost(const Geometry& g, const FeatureVolume& fv, std::size_t idx, int t, int y, int x,
                  const Centroid& c) {
  return norm_diff(fv.color(idx), c.feat) + g.spatial_weight * position_distance(g, t, y, x, c.pos);
}

double total_energy(const Geometry& g, const FeatureVolume& fv, const std::vector<std::uint32_t>& labels,
                    const std::vector<Centroid>& centroids) {
  const Shape3& s = g.shape;
  double e = 0.0;
  std::size_t idx = 0;
  for (int t = 0; t < s.frames; ++t) {
    for (int y = 0; y < s.height; ++y) {
      for (int x = 0; x < s.width; ++x, ++idx) {
        e += voxel_cost(g, fv, idx, t, y, x, centroids[labels[idx]]);
      }
    }
  }
  return e;
}

Geometry make_geometry(const Shape3& shape, const SlicConfig& cfg) {
  return Geometry{shape, cfg.temporal_scale, cfg.compactness / cfg.interval, static_cast<double>(cfg.interval),
                  static_cast<double>(cfg.temporal_window())};
}

SuperpixelLabels snapshot(const std::string& id, const Shape3& shape, const std::vector<std::uint32_t>& labels,
                          const std::vector<Centroid>& centroids) {
  SuperpixelLabels sp;
  sp.video_id = id;
  sp.shape = shape;
  sp.labels = labels;
  sp.clusters.resize(centroids.size());
  for (std::size_t k = 0; k < centroids.size(); ++k) {
    for (int i = 0; i < 3; ++i) sp.clusters[k].position[i] = static_cast<float>(centroids[k].pos[i]);
    for (int i = 0; i < 9; ++i) sp.clusters[k].feature[i] = static_cast<float>(centroids[k].feat[i]);
  }
  return sp;
}

double gradient_at(const VideoVolume& v, int t, int y, int x) {
  const Shape3& s = v.shape();
  auto diff2 = [](const Lab& a, const Lab& b) {
    const double dl = a.l - b.l, da = a.a - b.a, db = a.b - b.b;
    return dl * dl + da * da + db * db;
  };
  const int xl = std::max(x - 1, 0), xr = std::min(x + 1, s.width - 1);
  const int yu = std::max(y - 1, 0), yd = std::min(y + 1, s.height - 1);
  return diff2(v.at(t, y, xr), v.at(t, y, xl)) + diff2(v.at(t, yd, x), v.at(t, yu, x));
}

// Cell [lo, hi) of a regular grid; returns the integer centre.
int cell_center(double lo, double hi) { return static_cast<int>(std::floor((lo + hi - 1.0) / 2.0)); }

std::vector<Centroid> seed_clusters(const VideoVolume& v, const FeatureVolume& fv, const SlicConfig& cfg) {
  const Shape3& s = v.shape();
  const double sz = cfg.temporal_scale * cfg.interval;
  const int nz = static_cast<int>(std::ceil(s.frames / sz));
  const int ny = (s.height + cfg.interval - 1) / cfg.interval;
  const int nx = (s.width + cfg.interval - 1) / cfg.interval;
  std::vector<Centroid> out;
  out.reserve(static_cast<std::size_t>(nz) * ny * nx);
  for (int kz = 0; kz < nz; ++kz) {
    const int t = std::clamp(cell_center(kz * sz, std::min((kz + 1) * sz, static_cast<double>(s.frames))), 0,
                             s.frames - 1);
    for (int ky = 0; ky < ny; ++ky) {
      const int cy = cell_center(ky * cfg.interval, std::min((ky + 1) * cfg.interval, s.height));
      for (int kx = 0; kx < nx; ++kx) {
        const int cx = cell_center(kx * cfg.interval, std::min((kx + 1) * cfg.interval, s.width));
        // Move the seed off edges: lowest gradient in its 3x3 neighbourhood.
        int bx = cx, by = cy;
        double best = gradient_at(v, t, cy, cx);
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int x = cx + dx, y = cy + dy;
            if (x < 0 || y < 0 || x >= s.width || y >= s.height) continue;
            const double g = gradient_at(v, t, y, x);
            if (g < best) {
              best = g;
              bx = x;
              by = y;
            }
          }
        }
        Centroid c;
        c.pos = {static_cast<double>(bx), static_cast<double>(by), static_cast<double>(t)};
        const auto& col = fv.color(s.index(t, by, bx));
        for (int i = 0; i < 9; ++i) c.feat[i] = col[i];
        out.push_back(c);
      }
    }
  }
  return out;
}

// Assigns every voxel to the nearest cluster whose window contains it.
// Returns the number of voxels whose label changed.
std::size_t assign(const Geometry& g, const FeatureVolume& fv, const std::vector<Centroid>& centroids,
                   std::vector<std::uint32_t>& labels, bool first) {
  const Shape3& s = g.shape;
  std::vector<std::size_t> changed(static_cast<std::size_t>(s.frames), 0);
  bool empty_window = false;
  parallel_for(static_cast<std::size_t>(s.frames), [&](std::size_t ti) {
    const int t = static_cast<int>(ti);
    std::vector<std::uint32_t> candidates;
    for (std::size_t k = 0; k < centroids.size(); ++k) {
      if (std::abs(t - centroids[k].pos[2]) <= g.window_z) candidates.push_back(static_cast<std::uint32_t>(k));
    }
    std::size_t idx = s.index(t, 0, 0);
    for (int y = 0; y < s.height; ++y) {
      for (int x = 0; x < s.width; ++x, ++idx) {
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t best_k = std::numeric_limits<std::uint32_t>::max();
        for (auto k : candidates) {
          const auto& c = centroids[k];
          if (!in_window(g, t, y, x, c.pos)) continue;
          const double d = voxel_cost(g, fv, idx, t, y, x, c);
          if (d < best) {
            best = d;
            best_k = k;
          }
        }
        if (best_k == std::numeric_limits<std::uint32_t>::max()) {
          empty_window = true;
          continue;
        }
        if (first || labels[idx] != best_k) ++changed[ti];
        labels[idx] = best_k;
      }
    }
  });
  if (empty_window) {
    throw ConfigError("superpixel search window is empty for some voxel; check interval and temporal scale");
  }
  return std::accumulate(changed.begin(), changed.end(), std::size_t{0});
}

template <std::size_t N>
double cluster_cost(const std::vector<std::array<double, N>>& pts, const std::array<double, N>& c) {
  double s = 0.0;
  for (const auto& p : pts) {
    double d2 = 0.0;
    for (std::size_t i = 0; i < N; ++i) d2 += (p[i] - c[i]) * (p[i] - c[i]);
    s += std::sqrt(d2);
  }
  return s;
}

template <std::size_t N>
std::array<double, N> rounded(std::array<double, N> a) {
  for (auto& v : a) v = round_f(v);
  return a;
}

// Minimizes sum ||p - c|| over c: mean, then Weiszfeld steps for the
// geometric median. A candidate replaces the incumbent only if it lowers the
// cost and passes `feasible`.
template <std::size_t N, class Canon, class Feasible>
std::array<double, N> refine_center(const std::vector<std::array<double, N>>& pts, const std::array<double, N>& old,
                                    Canon canon, Feasible feasible) {
  std::array<double, N> best = old;
  double best_cost = cluster_cost(pts, old);
  auto offer = [&](const std::array<double, N>& cand) {
    const auto r = canon(cand);
    if (!feasible(r)) return;
    const double c = cluster_cost(pts, r);
    if (c < best_cost) {
      best_cost = c;
      best = r;
    }
  };
  std::array<double, N> mean{};
  for (const auto& p : pts) {
    for (std::size_t i = 0; i < N; ++i) mean[i] += p[i];
  }
  for (auto& v : mean) v /= static_cast<double>(pts.size());
  offer(mean);
  std::array<double, N> cur = best;
  for (int step = 0; step < kWeiszfeldSteps; ++step) {
    std::array<double, N> num{};
    double den = 0.0;
    for (const auto& p : pts) {
      double d2 = 0.0;
      for (std::size_t i = 0; i < N; ++i) d2 += (p[i] - cur[i]) * (p[i] - cur[i]);
      if (d2 <= 0.0) continue;
      const double w = 1.0 / std::sqrt(d2);
      for (std::size_t i = 0; i < N; ++i) num[i] += w * p[i];
      den += w;
    }
    if (den <= 0.0) break;
    for (std::size_t i = 0; i < N; ++i) cur[i] = num[i] / den;
    offer(cur);
    cur = canon(cur);
  }
  return best;
}

void update(const Geometry& g, const FeatureVolume& fv, const std::vector<std::uint32_t>& labels,
            std::vector<Centroid>& centroids) {
  const Shape3& s = g.shape;
  const std::size_t k = centroids.size();
  // Bucket voxel indices by label, in voxel order.
  std::vector<std::size_t> offsets(k + 1, 0);
  for (auto l : labels) ++offsets[l + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<std::size_t> members(labels.size());
  {
    auto fill = offsets;
    for (std::size_t i = 0; i < labels.size(); ++i) members[fill[labels[i]]++] = i;
  }
  const std::size_t plane = s.pixels_per_frame();
  parallel_for(k, [&](std::size_t c) {
    const std::size_t begin = offsets[c], end = offsets[c + 1];
    if (begin == end) return;
    std::vector<std::array<double, 9>> feats;
    std::vector<std::array<double, 3>> pos;  // z scaled by rho
    std::vector<std::array<int, 3>> raw;
    feats.reserve(end - begin);
    pos.reserve(end - begin);
    raw.reserve(end - begin);
    for (std::size_t m = begin; m < end; ++m) {
      const std::size_t idx = members[m];
      const int t = static_cast<int>(idx / plane);
      const int y = static_cast<int>((idx % plane) / s.width);
      const int x = static_cast<int>(idx % s.width);
      const auto& col = fv.color(idx);
      std::array<double, 9> f{};
      for (int i = 0; i < 9; ++i) f[i] = col[i];
      feats.push_back(f);
      pos.push_back({static_cast<double>(x), static_cast<double>(y), g.rho * t});
      raw.push_back({x, y, t});
    }
    auto& cen = centroids[c];
    cen.feat = refine_center<9>(feats, cen.feat, [](const auto& f) { return rounded(f); },
                                [](const auto&) { return true; });
    // Position search runs in rho-scaled space; the stored z is unscaled. A
    // centre is only accepted if every member stays inside its search window.
    const std::array<double, 3> old_scaled{cen.pos[0], cen.pos[1], g.rho * cen.pos[2]};
    const auto unscale = [&](const std::array<double, 3>& p) {
      return std::array<double, 3>{p[0], p[1], round_f(p[2] / g.rho)};
    };
    const auto canon = [&](const std::array<double, 3>& p) {
      const auto u = unscale(rounded(p));
      return std::array<double, 3>{u[0], u[1], g.rho * u[2]};
    };
    const auto best = refine_center<3>(pos, old_scaled, canon, [&](const std::array<double, 3>& cand) {
      const auto u = unscale(cand);
      return std::all_of(raw.begin(), raw.end(), [&](const auto& r) { return in_window(g, r[2], r[1], r[0], u); });
    });
    if (best != old_scaled) cen.pos = unscale(best);
  });
}

}  // namespace

void SlicConfig::validate(const Shape3& shape) const {
  if (interval <= 0) throw ConfigError(fmt::format("interval S = {} must be positive", interval));
  if (!(compactness > 0.0)) throw ConfigError(fmt::format("compactness m = {} must be positive", compactness));
  if (max_iters <= 0) throw ConfigError(fmt::format("max_iters = {} must be positive", max_iters));
  if (!(temporal_scale > 0.0) || !std::isfinite(temporal_scale)) {
    throw ConfigError(fmt::format("temporal scale = {} must be a positive finite number", temporal_scale));
  }
  if (min_region < 1) throw ConfigError(fmt::format("min_region = {} must be >= 1", min_region));
  if (interval > std::min(shape.height, shape.width)) {
    throw ConfigError(fmt::format("interval S = {} exceeds min(H, W) = {}", interval,
                                  std::min(shape.height, shape.width)));
  }
}

std::size_t SlicConfig::initial_clusters(const Shape3& shape) const {
  const auto nz = static_cast<std::size_t>(std::ceil(shape.frames / (temporal_scale * interval)));
  const auto ny = static_cast<std::size_t>((shape.height + interval - 1) / interval);
  const auto nx = static_cast<std::size_t>((shape.width + interval - 1) / interval);
  return nz * ny * nx;
}

int SlicConfig::temporal_window() const { return static_cast<int>(std::ceil(temporal_scale * interval)); }

FeatureVolume extract_features(const VideoVolume& video) {
  const Shape3& s = video.shape();
  std::vector<std::array<float, 9>> colors(s.voxels());
  std::size_t idx = 0;
  for (int t = 0; t < s.frames; ++t) {
    const int prev = std::max(t - 1, 0);
    const int next = std::min(t + 1, s.frames - 1);
    for (int y = 0; y < s.height; ++y) {
      for (int x = 0; x < s.width; ++x, ++idx) {
        const Lab& a = video.at(prev, y, x);
        const Lab& b = video.at(t, y, x);
        const Lab& c = video.at(next, y, x);
        colors[idx] = {a.l, a.a, a.b, b.l, b.a, b.b, c.l, c.a, c.b};
      }
    }
  }
  return FeatureVolume(s, std::move(colors));
}

double energy(const FeatureVolume& features, const SuperpixelLabels& sp, const SlicConfig& cfg) {
  if (sp.shape != features.shape()) {
    throw InvariantError(fmt::format("superpixels '{}' do not cover the video volume", sp.video_id));
  }
  sp.validate();
  std::vector<Centroid> centroids(sp.clusters.size());
  for (std::size_t k = 0; k < centroids.size(); ++k) {
    for (int i = 0; i < 3; ++i) centroids[k].pos[i] = sp.clusters[k].position[i];
    for (int i = 0; i < 9; ++i) centroids[k].feat[i] = sp.clusters[k].feature[i];
  }
  return total_energy(make_geometry(sp.shape, cfg), features, sp.labels, centroids);
}

double energy(const VideoVolume& video, const SuperpixelLabels& sp, const SlicConfig& cfg) {
  return energy(extract_features(video), sp, cfg);
}

std::vector<std::uint32_t> enforce_connectivity(const Shape3& s, const std::vector<std::uint32_t>& labels,
                                                int min_region) {
  const std::size_t n = labels.size();
  constexpr auto kUnset = std::numeric_limits<std::uint32_t>::max();
  std::vector<std::uint32_t> comp(n, kUnset);
  std::vector<std::size_t> comp_size;
  std::vector<std::uint32_t> comp_label;
  std::vector<std::size_t> stack;
  const std::size_t plane = s.pixels_per_frame();

  auto for_neighbors = [&](std::size_t idx, auto&& fn) {
    const int t = static_cast<int>(idx / plane);
    const int y = static_cast<int>((idx % plane) / s.width);
    const int x = static_cast<int>(idx % s.width);
    if (x > 0) fn(idx - 1);
    if (x + 1 < s.width) fn(idx + 1);
    if (y > 0) fn(idx - s.width);
    if (y + 1 < s.height) fn(idx + s.width);
    if (t > 0) fn(idx - plane);
    if (t + 1 < s.frames) fn(idx + plane);
  };

  for (std::size_t seed = 0; seed < n; ++seed) {
    if (comp[seed] != kUnset) continue;
    const auto id = static_cast<std::uint32_t>(comp_size.size());
    const auto label = labels[seed];
    std::size_t size = 0;
    comp[seed] = id;
    stack.push_back(seed);
    while (!stack.empty()) {
      const auto cur = stack.back();
      stack.pop_back();
      ++size;
      for_neighbors(cur, [&](std::size_t nb) {
        if (comp[nb] == kUnset && labels[nb] == label) {
          comp[nb] = id;
          stack.push_back(nb);
        }
      });
    }
    comp_size.push_back(size);
    comp_label.push_back(label);
  }

  const std::size_t nc = comp_size.size();
  std::vector<std::vector<std::uint32_t>> adjacent(nc);
  for (std::size_t idx = 0; idx < n; ++idx) {
    for_neighbors(idx, [&](std::size_t nb) {
      if (comp[nb] != comp[idx]) adjacent[comp[idx]].push_back(comp[nb]);
    });
  }
  for (auto& a : adjacent) {
    std::sort(a.begin(), a.end());
    a.erase(std::unique(a.begin(), a.end()), a.end());
  }

  // The largest component of each label survives if it is big enough.
  std::vector<std::uint32_t> largest(*std::max_element(labels.begin(), labels.end()) + 1, kUnset);
  for (std::uint32_t c = 0; c < nc; ++c) {
    auto& l = largest[comp_label[c]];
    if (l == kUnset || comp_size[c] > comp_size[l]) l = c;
  }
  std::vector<std::uint32_t> parent(nc);
  std::iota(parent.begin(), parent.end(), 0U);
  std::vector<std::size_t> group_size = comp_size;
  auto find = [&](std::uint32_t c) {
    while (parent[c] != c) {
      parent[c] = parent[parent[c]];
      c = parent[c];
    }
    return c;
  };
  for (std::uint32_t c = 0; c < nc; ++c) {
    const bool kept = largest[comp_label[c]] == c && comp_size[c] >= static_cast<std::size_t>(min_region);
    if (kept) continue;
    const auto root = find(c);
    std::uint32_t target = kUnset;
    for (auto nb : adjacent[c]) {
      const auto r = find(nb);
      if (r == root) continue;
      if (target == kUnset || group_size[r] > group_size[target] || (group_size[r] == group_size[target] && r < target)) {
        target = r;
      }
    }
    if (target == kUnset) continue;
    parent[root] = target;
    group_size[target] += group_size[root];
  }

  std::vector<std::uint32_t> dense(nc, kUnset);
  std::uint32_t next = 0;
  std::vector<std::uint32_t> out(n);
  for (std::size_t idx = 0; idx < n; ++idx) {
    const auto r = find(comp[idx]);
    if (dense[r] == kUnset) dense[r] = next++;
    out[idx] = dense[r];
  }
  return out;
}

SuperpixelLabels segment(const VideoVolume& video, const SlicConfig& cfg, SegmentReport* report) {
  const Shape3& s = video.shape();
  cfg.validate(s);
  const FeatureVolume fv = extract_features(video);
  const Geometry g = make_geometry(s, cfg);
  std::vector<Centroid> centroids = seed_clusters(video, fv, cfg);
  for (auto& c : centroids) {
    for (auto& v : c.feat) v = round_f(v);
  }
  std::vector<std::uint32_t> labels(s.voxels(), 0);
  if (report) {
    report->initial_clusters = centroids.size();
    report->energy_trace.clear();
    report->snapshots.clear();
  }
  auto record = [&] {
    if (!report) return;
    report->energy_trace.push_back(total_energy(g, fv, labels, centroids));
    if (report->keep_snapshots) report->snapshots.push_back(snapshot(video.video_id(), s, labels, centroids));
  };

  int iter = 0;
  for (; iter < cfg.max_iters; ++iter) {
    const std::size_t changed = assign(g, fv, centroids, labels, iter == 0);
    record();
    update(g, fv, labels, centroids);
    record();
    if (static_cast<double>(changed) < kStopFraction * static_cast<double>(s.voxels())) {
      ++iter;
      break;
    }
  }
  if (report) report->iterations = iter;

  SuperpixelLabels out;
  out.video_id = video.video_id();
  out.shape = s;
  out.labels = enforce_connectivity(s, labels, cfg.min_region);
  const std::size_t k = *std::max_element(out.labels.begin(), out.labels.end()) + 1;
  std::vector<std::array<double, 12>> sums(k, std::array<double, 12>{});
  std::vector<std::size_t> counts(k, 0);
  std::size_t idx = 0;
  for (int t = 0; t < s.frames; ++t) {
    for (int y = 0; y < s.height; ++y) {
      for (int x = 0; x < s.width; ++x, ++idx) {
        auto& acc = sums[out.labels[idx]];
        acc[0] += x;
        acc[1] += y;
        acc[2] += t;
        const auto& col = fv.color(idx);
        for (int i = 0; i < 9; ++i) acc[3 + i] += col[i];
        ++counts[out.labels[idx]];
      }
    }
  }
  out.clusters.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    const double inv = 1.0 / static_cast<double>(counts[c]);
    for (int i = 0; i < 3; ++i) out.clusters[c].position[i] = static_cast<float>(sums[c][i] * inv);
    for (int i = 0; i < 9; ++i) out.clusters[c].feature[i] = static_cast<float>(sums[c][3 + i] * inv);
  }
  return out;
}

}  // namespace omvid
