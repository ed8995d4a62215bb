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

#include "omvid/objective.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <fmt/core.h>

#include "omvid/errors.hpp"

namespace omvid {

void PredictionMap::validate() const {
  for (const auto& f : frames) {
    if (f.values.size() != static_cast<std::size_t>(f.height) * f.width) {
      throw ValidationError("prediction frame size does not match its dimensions");
    }
    for (double v : f.values) {
      if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(fmt::format("prediction probability {} outside [0, 1]", v));
    }
  }
  double sum = 0.0;
  for (double p : class_probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(fmt::format("class probability {} outside [0, 1]", p));
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw ValidationError(fmt::format("class probabilities sum to {}", sum));
}

namespace {

void check_shapes(const FrameMap& pred, const Bitmap& target) {
  if (pred.height != target.height() || pred.width != target.width() || pred.values.size() != target.size()) {
    throw ValidationError(fmt::format("prediction is {}x{}, target is {}x{}", pred.height, pred.width,
                                      target.height(), target.width()));
  }
  if (target.size() == 0) throw ValidationError("empty frame");
}

}  // namespace

double frame_loss(const FrameMap& pred, const Bitmap& target) {
  check_shapes(pred, target);
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    const double p = std::clamp(pred.values[i], kProbEpsilon, 1.0 - kProbEpsilon);
    sum += target.flat(i) ? -std::log(p) : -std::log(1.0 - p);
  }
  return sum / static_cast<double>(pred.values.size());
}

FrameMap frame_loss_gradient(const FrameMap& pred, const Bitmap& target) {
  check_shapes(pred, target);
  FrameMap grad(pred.height, pred.width);
  const double n = static_cast<double>(pred.values.size());
  for (std::size_t i = 0; i < pred.values.size(); ++i) {
    const double p = pred.values[i];
    if (p <= kProbEpsilon || p >= 1.0 - kProbEpsilon) continue;
    const double t = target.flat(i) ? 1.0 : 0.0;
    grad.values[i] = (p - t) / (p * (1.0 - p) * n);
  }
  return grad;
}

double weighted_detection_loss(std::span<const double> losses, std::span<const double> weights) {
  if (losses.size() != weights.size()) {
    throw ValidationError(fmt::format("{} frame losses but {} weights", losses.size(), weights.size()));
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < losses.size(); ++i) {
    if (!(weights[i] >= 0.0 && weights[i] <= 1.0)) {
      throw ValidationError(fmt::format("frame weight {} outside [0, 1]", weights[i]));
    }
    sum += weights[i] * losses[i];
  }
  return sum;
}

double classification_loss(std::span<const double> class_probs, int label) {
  if (label < 0 || static_cast<std::size_t>(label) >= class_probs.size()) {
    throw ValidationError(fmt::format("class {} outside [0, {})", label, class_probs.size()));
  }
  return -std::log(std::clamp(class_probs[label], kProbEpsilon, 1.0 - kProbEpsilon));
}

LossBreakdown total_loss(const LossTerms& terms, const LossGates& gates) {
  auto gated = [](bool gate, const std::optional<double>& term, const char* name) {
    if (!gate) return 0.0;
    if (!term) throw ValidationError(fmt::format("gate for the {} loss is set but the sample has no {} term", name, name));
    return *term;
  };
  LossBreakdown out;
  out.gates = gates;
  out.cls = terms.cls;
  out.box = gated(gates.box, terms.box, "box");
  out.pixel = gated(gates.pixel, terms.pixel, "pixel");
  out.scribble = gated(gates.scribble, terms.scribble, "scribble");
  out.point = gated(gates.point, terms.point, "point");
  out.slic = terms.slic;
  out.total = out.cls + out.box + out.pixel + out.scribble + out.point + out.slic;
  return out;
}

double normalized_slic(double energy, std::size_t voxels) {
  if (voxels == 0) throw ValidationError("normalized_slic: zero voxels");
  return energy / static_cast<double>(voxels);
}

LossGates gates_for(const PseudoLabelSet& labels) {
  LossGates g;
  for (const auto& f : labels.frames) {
    if (!f) continue;
    switch (f->origin) {
      case AnnotationKind::kBox: g.box = true; break;
      case AnnotationKind::kMask: g.pixel = true; break;
      case AnnotationKind::kScribble: g.scribble = true; break;
      case AnnotationKind::kPoint: g.point = true; break;
    }
  }
  return g;
}

LossTerms detection_losses(const PredictionMap& pred, const PseudoLabelSet& labels) {
  if (pred.frames.size() != labels.frames.size()) {
    throw ValidationError(fmt::format("prediction has {} frames, pseudo-labels have {}", pred.frames.size(),
                                      labels.frames.size()));
  }
  LossTerms terms;
  auto add = [](std::optional<double>& slot, double v) { slot = slot.value_or(0.0) + v; };
  for (std::size_t i = 0; i < labels.frames.size(); ++i) {
    const auto& f = labels.frames[i];
    if (!f) continue;
    const auto target = f->rasterize(labels.shape.height, labels.shape.width);
    const double w = weighted_detection_loss(std::array{frame_loss(pred.frames[i], target)}, std::array{f->weight});
    switch (f->origin) {
      case AnnotationKind::kBox: add(terms.box, w); break;
      case AnnotationKind::kMask: add(terms.pixel, w); break;
      case AnnotationKind::kScribble: add(terms.scribble, w); break;
      case AnnotationKind::kPoint: add(terms.point, w); break;
    }
  }
  return terms;
}

LossBreakdown sample_loss(const PredictionMap& pred, const PseudoLabelSet* labels, int class_label,
                          double slic_term) {
  LossTerms terms;
  LossGates gates;
  if (labels != nullptr) {
    terms = detection_losses(pred, *labels);
    gates = gates_for(*labels);
  }
  terms.cls = classification_loss(pred.class_probs, class_label);
  terms.slic = slic_term;
  return total_loss(terms, gates);
}

}  // namespace omvid
