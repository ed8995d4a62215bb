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

#include "omvid/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include <fmt/core.h>

#include "omvid/errors.hpp"

namespace omvid {

double box_iou(const Box& a, const Box& b) {
  const long long iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min) + 1;
  const long long ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min) + 1;
  const long long inter = iw > 0 && ih > 0 ? iw * ih : 0;
  const long long uni = static_cast<long long>(a.area()) + static_cast<long long>(b.area()) - inter;
  return uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0;
}

double tube_iou(const Tube& a, const Tube& b) {
  std::set<int> frames;
  for (const auto& [f, _] : a.boxes) frames.insert(f);
  for (const auto& [f, _] : b.boxes) frames.insert(f);
  if (frames.empty()) return 0.0;
  double sum = 0.0;
  for (int f : frames) {
    const auto ia = a.boxes.find(f);
    const auto ib = b.boxes.find(f);
    if (ia != a.boxes.end() && ib != b.boxes.end()) sum += box_iou(ia->second, ib->second);
  }
  return sum / static_cast<double>(frames.size());
}

double average_precision(const std::vector<bool>& hits, std::size_t positives) {
  if (positives == 0) return 0.0;
  const std::size_t n = hits.size();
  std::vector<double> precision(n);
  std::vector<double> recall(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    tp += hits[i] ? 1 : 0;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(positives);
  }
  for (std::size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ap += (recall[i] - prev_recall) * precision[i];
    prev_recall = recall[i];
  }
  return ap;
}

namespace {

void check_tau(double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw ParameterError(fmt::format("IoU threshold {} outside (0, 1]", tau));
}

void check_confidence(double c) {
  if (!(c >= 0.0 && c <= 1.0)) throw ValidationError(fmt::format("detection confidence {} outside [0, 1]", c));
}

template <typename Det>
std::vector<std::size_t> by_confidence(std::span<const Det> dets, int label) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (dets[i].label == label) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return dets[a].confidence > dets[b].confidence; });
  return order;
}

// Shared AP loop: `iou(det, gt)` returns the IoU when the pair is comparable
// and a negative value otherwise.
template <typename Det, typename Gt, typename Iou>
double mean_ap(std::span<const Det> dets, std::span<const Gt> gts, double tau, Iou iou) {
  check_tau(tau);
  for (const auto& d : dets) check_confidence(d.confidence);
  std::set<int> labels;
  for (const auto& g : gts) labels.insert(g.label);
  if (labels.empty()) return 0.0;
  double total = 0.0;
  for (int label : labels) {
    std::vector<std::size_t> gt_idx;
    for (std::size_t j = 0; j < gts.size(); ++j) {
      if (gts[j].label == label) gt_idx.push_back(j);
    }
    std::vector<char> matched(gt_idx.size(), 0);
    std::vector<bool> hits;
    for (std::size_t i : by_confidence(dets, label)) {
      double best = -1.0;
      std::size_t best_k = 0;
      for (std::size_t k = 0; k < gt_idx.size(); ++k) {
        if (matched[k]) continue;
        const double v = iou(dets[i], gts[gt_idx[k]]);
        if (v > best) {
          best = v;
          best_k = k;
        }
      }
      const bool hit = best >= tau;
      if (hit) matched[best_k] = 1;
      hits.push_back(hit);
    }
    total += average_precision(hits, gt_idx.size());
  }
  return total / static_cast<double>(labels.size());
}

}  // namespace

double frame_map(std::span<const Detection> dets, std::span<const GroundTruth> gts, double tau) {
  return mean_ap(dets, gts, tau, [](const Detection& d, const GroundTruth& g) {
    return d.video_id == g.video_id && d.frame == g.frame ? box_iou(d.box, g.box) : -1.0;
  });
}

double video_map(std::span<const Tube> dets, std::span<const Tube> gts, double tau) {
  return mean_ap(dets, gts, tau,
                 [](const Tube& d, const Tube& g) { return d.video_id == g.video_id ? tube_iou(d, g) : -1.0; });
}

}  // namespace omvid
