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

#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "omvid/errors.hpp"
#include "omvid/objective.hpp"

namespace omvid {
namespace {

FrameMap random_map(std::mt19937_64& rng, int h, int w, double lo = 0.02, double hi = 0.98) {
  std::uniform_real_distribution<double> u(lo, hi);
  FrameMap m(h, w);
  for (auto& v : m.values) v = u(rng);
  return m;
}

TEST(FrameLossTest, PerfectAndMaxEntropy) {
  std::mt19937_64 rng(1);
  const auto target = testing::random_bitmap(rng, 5, 7);
  FrameMap perfect(5, 7);
  for (std::size_t i = 0; i < perfect.values.size(); ++i) perfect.values[i] = target.flat(i) ? 1.0 : 0.0;
  EXPECT_LE(frame_loss(perfect, target), -std::log(1.0 - kProbEpsilon) + 1e-15);
  EXPECT_NEAR(frame_loss(FrameMap(5, 7, 0.5), target), std::log(2.0), 1e-12);
}

TEST(FrameLossTest, MatchesHandSummedBce) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 50; ++i) {
    const auto p = random_map(rng, 3, 3, 0.0, 1.0);
    const auto t = testing::random_bitmap(rng, 3, 3);
    double want = 0.0;
    for (int y = 0; y < 3; ++y) {
      for (int x = 0; x < 3; ++x) {
        double q = p.values[static_cast<std::size_t>(y) * 3 + x];
        q = q < 1e-7 ? 1e-7 : (q > 1 - 1e-7 ? 1 - 1e-7 : q);
        want += t.get(y, x) ? -std::log(q) : -std::log(1 - q);
      }
    }
    EXPECT_NEAR(frame_loss(p, t), want / 9.0, 1e-9);
  }
}

TEST(FrameLossTest, ShapeMismatch) {
  EXPECT_THROW((void)frame_loss(FrameMap(2, 2), Bitmap(2, 3)), ValidationError);
  EXPECT_THROW((void)frame_loss_gradient(FrameMap(2, 2), Bitmap(3, 2)), ValidationError);
}

TEST(FrameLossTest, MinimizedAtTargetMean) {
  std::mt19937_64 rng(3);
  const auto t = testing::random_bitmap(rng, 10, 10, 0.37);
  const double mean = static_cast<double>(t.count()) / 100.0;
  double best = 1e9, arg = -1;
  for (int k = 1; k < 100; ++k) {
    const double c = k / 100.0;
    const double l = frame_loss(FrameMap(10, 10, c), t);
    if (l < best) {
      best = l;
      arg = c;
    }
  }
  EXPECT_NEAR(arg, mean, 0.005 + 1e-12);
}

TEST(GradientTest, ClosedForm) {
  Bitmap one(1, 1);
  one.set(0, 0);
  EXPECT_NEAR(frame_loss_gradient(FrameMap(1, 1, 0.5), one).values[0], -2.0, 1e-12);
  std::mt19937_64 rng(4);
  const auto t = testing::random_bitmap(rng, 4, 4);
  FrameMap p(4, 4);
  for (std::size_t i = 0; i < p.values.size(); ++i) p.values[i] = t.flat(i) ? 1.0 : 0.0;
  for (double g : frame_loss_gradient(p, t).values) EXPECT_EQ(g, 0.0);
}

TEST(GradientTest, MatchesFiniteDifferences) {
  std::mt19937_64 rng(5);
  const double h = 1e-5;
  for (int i = 0; i < 100; ++i) {
    const auto p = random_map(rng, 4, 4);
    const auto t = testing::random_bitmap(rng, 4, 4);
    const auto g = frame_loss_gradient(p, t);
    for (std::size_t k = 0; k < p.values.size(); ++k) {
      auto up = p, down = p;
      up.values[k] += h;
      down.values[k] -= h;
      const double fd = (frame_loss(up, t) - frame_loss(down, t)) / (2 * h);
      ASSERT_NEAR(g.values[k], fd, 1e-4 * std::abs(fd)) << "case " << i << " pixel " << k;
    }
  }
}

TEST(WeightedLossTest, Examples) {
  EXPECT_DOUBLE_EQ(weighted_detection_loss(std::vector<double>{2, 4}, std::vector<double>{1, 0.5}), 4.0);
  EXPECT_EQ(weighted_detection_loss(std::vector<double>{2, 4}, std::vector<double>{0, 0}), 0.0);
  EXPECT_EQ(weighted_detection_loss(std::vector<double>{3.25}, std::vector<double>{1}), 3.25);
  EXPECT_THROW((void)weighted_detection_loss(std::vector<double>{1}, std::vector<double>{1, 1}), ValidationError);
  EXPECT_THROW((void)weighted_detection_loss(std::vector<double>{1}, std::vector<double>{1.5}), ValidationError);
}

TEST(WeightedLossTest, LinearInWeights) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 50; ++i) {
    std::vector<double> l(8), w(8), aw(8);
    const double a = u(rng);
    for (int k = 0; k < 8; ++k) {
      l[k] = 5 * u(rng);
      w[k] = u(rng);
      aw[k] = a * w[k];
    }
    EXPECT_NEAR(weighted_detection_loss(l, aw), a * weighted_detection_loss(l, w), 1e-12);
  }
}

TEST(ClassificationLossTest, Examples) {
  EXPECT_NEAR(classification_loss(std::vector<double>{0, 1, 0}, 1), 0.0, 1e-6);
  EXPECT_NEAR(classification_loss(std::vector<double>(4, 0.25), 2), std::log(4.0), 1e-12);
  EXPECT_NEAR(classification_loss(std::vector<double>{0.25, 0.5, 0.125, 0.125}, 0), std::log(4.0), 1e-12);
  EXPECT_THROW((void)classification_loss(std::vector<double>(4, 0.25), 4), ValidationError);
  EXPECT_THROW((void)classification_loss(std::vector<double>(4, 0.25), -1), ValidationError);
}

TEST(TotalLossTest, Gating) {
  LossTerms terms;
  terms.cls = 1.0;
  terms.box = 2.0;
  terms.slic = 0.5;
  EXPECT_DOUBLE_EQ(total_loss(terms, {}).total, 1.5);
  EXPECT_DOUBLE_EQ(total_loss(terms, LossGates{true, false, false, false}).total, 3.5);
  EXPECT_THROW((void)total_loss(terms, LossGates{false, true, false, false}), ValidationError);

  auto other = terms;
  other.box = 1e6;
  EXPECT_EQ(total_loss(terms, {}).total, total_loss(other, {}).total);
}

TEST(TotalLossTest, BoxAndScribbleSample) {
  const Shape3 s{3, 4, 4};
  PseudoLabelSet labels{"v", s, {}};
  labels.frames.resize(3);
  labels.frames[0] = PseudoFrame{0, Box{0, 0, 1, 1}, 1.0, Provenance::kReal, AnnotationKind::kBox};
  labels.frames[2] = PseudoFrame{2, Bitmap::from_box(4, 4, {2, 2, 3, 3}), 0.9, Provenance::kSuperpixel,
                                 AnnotationKind::kScribble};
  PredictionMap pred;
  pred.frames.assign(3, FrameMap(4, 4, 0.5));
  pred.class_probs = {0.5, 0.5};
  const auto g = gates_for(labels);
  EXPECT_TRUE(g.box);
  EXPECT_TRUE(g.scribble);
  EXPECT_FALSE(g.pixel);
  const auto b = sample_loss(pred, &labels, 0, 0.25);
  EXPECT_NEAR(b.box, std::log(2.0), 1e-12);
  EXPECT_NEAR(b.scribble, 0.9 * std::log(2.0), 1e-12);
  EXPECT_NEAR(b.total, std::log(2.0) + 1.9 * std::log(2.0) + 0.25, 1e-12);

  const auto tag = sample_loss(pred, nullptr, 1, 0.0);
  EXPECT_NEAR(tag.total, std::log(2.0), 1e-12);
  EXPECT_GE(tag.box, 0.0);
}

TEST(PredictionMapTest, Validation) {
  PredictionMap p;
  p.frames.assign(1, FrameMap(2, 2, 0.3));
  p.class_probs = {0.3, 0.7};
  EXPECT_NO_THROW(p.validate());
  p.class_probs = {0.3, 0.6};
  EXPECT_THROW(p.validate(), ValidationError);
  p.class_probs = {0.3, 0.7};
  p.frames[0].values[1] = 1.2;
  EXPECT_THROW(p.validate(), ValidationError);
}

TEST(NormalizedSlicTest, DividesByVoxels) {
  EXPECT_DOUBLE_EQ(normalized_slic(120.0, 40), 3.0);
  EXPECT_THROW((void)normalized_slic(1.0, 0), ValidationError);
}

}  // namespace
}  // namespace omvid
