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

#include <set>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "omvid/errors.hpp"
#include "omvid/selection.hpp"

namespace omvid {
namespace {

DatasetSplit pool(int n, int labeled = 0) {
  DatasetSplit s;
  for (int i = 0; i < labeled; ++i) s.labeled.push_back(fmt::format("l{:02d}", i));
  for (int i = 0; i < n; ++i) s.unlabeled.push_back(fmt::format("u{:02d}", i));
  return s;
}

BudgetConfig budget(double b, double s, double t) {
  BudgetConfig bc;
  bc.box_pct = b;
  bc.scribble_pct = s;
  bc.tag_pct = t;
  bc.min_frame_gap = 2;
  return bc;
}

std::map<std::string, std::vector<double>> flat_frames(const DatasetSplit& s, int frames) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& id : s.unlabeled) out[id] = std::vector<double>(static_cast<std::size_t>(frames), 1.0);
  return out;
}

TEST(UncertaintyTest, FrameAndVideoScores) {
  EXPECT_EQ(frame_uncertainty(std::vector<float>(4, 0.0F)), 0.0);
  EXPECT_NEAR(frame_uncertainty(std::vector<float>{0.1F, 0.2F, 0.3F, 0.4F}), 1.0, 1e-6);
  UncertaintyVolume uv{"v", {2, 1, 2}, {0.5F, 0.5F, 1.0F, 2.0F}};
  EXPECT_NEAR(video_uncertainty(uv), 2.0, 1e-12);
  EXPECT_THROW((void)frame_uncertainty(std::vector<float>{0.1F, -0.1F}), ValidationError);
}

TEST(UncertaintyTest, ContainerRoundTrip) {
  std::mt19937_64 rng(3);
  UncertaintyVolume uv{"clip", {3, 4, 5}, std::vector<float>(60)};
  for (auto& v : uv.values) v = static_cast<float>(rng() % 1000) / 7.0F;
  testing::TempDir dir;
  write_uncertainty(uv, dir / "clip.unc");
  const auto back = read_uncertainty(dir / "clip.unc");
  EXPECT_EQ(back.video_id, "clip");
  EXPECT_EQ(back.shape, uv.shape);
  EXPECT_EQ(back.values, uv.values);
  const auto all = read_uncertainty_dir(dir.path());
  ASSERT_EQ(all.size(), 1U);
  EXPECT_EQ(all.begin()->first, "clip");

  auto bytes = encode_uncertainty(uv);
  bytes.pop_back();
  EXPECT_THROW((void)decode_uncertainty(bytes), FormatError);
  bytes.push_back(0);
  bytes.push_back(0);
  EXPECT_THROW((void)decode_uncertainty(bytes), FormatError);
}

TEST(BudgetTest, Validation) {
  EXPECT_NO_THROW(budget(20, 30, 50).validate(0));
  EXPECT_THROW(budget(20, 30, 50).validate(10), BudgetError);
  EXPECT_THROW(budget(-1, 0, 0).validate(0), ConfigError);
  auto bc = budget(10, 0, 0);
  bc.frames_per_video_box = 0;
  EXPECT_THROW(bc.validate(0), ConfigError);
  try {
    budget(60, 30, 20).validate(0);
    FAIL();
  } catch (const BudgetError& e) {
    EXPECT_NE(std::string(e.what()).find("110"), std::string::npos) << e.what();
  }
}

TEST(SelectTest, BucketArithmeticAndOrder) {
  const auto split = pool(10);
  std::map<std::string, double> scores;
  for (int i = 0; i < 10; ++i) scores[split.unlabeled[i]] = i;
  const auto plan = select(split, scores, budget(20, 30, 50), flat_frames(split, 10), {});
  ASSERT_EQ(plan.entries.size(), 10U);
  std::map<Bucket, int> n;
  for (const auto& e : plan.entries) ++n[e.bucket];
  EXPECT_EQ(n[Bucket::kBox], 2);
  EXPECT_EQ(n[Bucket::kScribble], 3);
  EXPECT_EQ(n[Bucket::kTag], 5);
  for (std::size_t i = 1; i < plan.entries.size(); ++i) EXPECT_GE(plan.entries[i - 1].score, plan.entries[i].score);
  EXPECT_EQ(plan.entries[0].video_id, "u09");
  EXPECT_EQ(plan.entries[0].bucket, Bucket::kBox);
  EXPECT_EQ(plan.entries[0].frames.size(), 2U);
  EXPECT_TRUE(plan.entries.back().frames.empty());
}

TEST(SelectTest, TiesGoToSmallerId) {
  DatasetSplit split{{}, {"zeta", "alpha", "mid"}, 1};
  const std::map<std::string, double> scores{{"zeta", 1.0}, {"alpha", 1.0}, {"mid", 0.5}};
  const auto plan = select(split, scores, budget(34, 0, 0), flat_frames(split, 4), {});
  ASSERT_EQ(plan.entries.size(), 1U);
  EXPECT_EQ(plan.entries[0].video_id, "alpha");
}

TEST(SelectTest, MissingScoreIsAnError) {
  const auto split = pool(3);
  EXPECT_THROW((void)select(split, {{"u00", 1.0}}, budget(100, 0, 0), flat_frames(split, 4), {}), ValidationError);
}

TEST(SelectTest, OverBudget) {
  const auto split = pool(4, 6);
  std::map<std::string, double> scores;
  for (const auto& id : split.unlabeled) scores[id] = 1.0;
  EXPECT_THROW((void)select(split, scores, budget(50, 0, 0), flat_frames(split, 4), {}), BudgetError);
}

TEST(SelectTest, RandomIsSeeded) {
  const auto split = pool(30);
  std::map<std::string, double> scores;
  for (const auto& id : split.unlabeled) scores[id] = 0.0;
  const SelectionPolicy p{PolicyKind::kRandom, 42};
  const auto a = select(split, scores, budget(20, 20, 20), flat_frames(split, 16), p);
  const auto b = select(split, scores, budget(20, 20, 20), flat_frames(split, 16), p);
  EXPECT_EQ(a, b);
  const auto c = select(split, scores, budget(20, 20, 20), flat_frames(split, 16), {PolicyKind::kRandom, 43});
  EXPECT_NE(a, c);
  EXPECT_EQ(a.policy, "random");
  std::set<std::string> ids;
  for (const auto& e : a.entries) ids.insert(e.video_id);
  EXPECT_EQ(ids.size(), 18U);
  for (const auto& e : a.entries) {
    if (e.bucket != Bucket::kTag) {
      EXPECT_EQ(e.frames, uniform_frames(16, 2));
    }
  }
}

TEST(FramesTest, GreedyWithGap) {
  const std::vector<double> s{0, 9, 8, 0, 0, 7, 0, 0};
  bool fb = true;
  EXPECT_EQ(pick_frames(s, 2, 3, &fb), (std::vector<int>{1, 5}));
  EXPECT_FALSE(fb);
  EXPECT_EQ(pick_frames(s, 3, 2, &fb), (std::vector<int>{1, 3, 5}));
  EXPECT_FALSE(fb);
  const auto crowded = pick_frames(s, 3, 3, &fb);
  EXPECT_TRUE(fb);
  EXPECT_EQ(crowded, uniform_frames(8, 3));
}

TEST(FramesTest, UniformSpacing) {
  EXPECT_EQ(uniform_frames(10, 2), (std::vector<int>{2, 7}));
  EXPECT_EQ(uniform_frames(5, 5), (std::vector<int>{0, 1, 2, 3, 4}));
  EXPECT_EQ(uniform_frames(7, 1), (std::vector<int>{3}));
}

TEST(CostTest, EmptyPlanIsFree) {
  EXPECT_EQ(plan_cost(SelectionPlan{}, CostTable{}, 100.0), 0.0);
}

TEST(CostTest, MixCounting) {
  SelectionPlan plan;
  plan.entries = {{"a", 1, Bucket::kBox, {0, 5}, false},
                  {"b", 1, Bucket::kScribble, {}, false},
                  {"c", 1, Bucket::kTag, {}, false}};
  const auto mix = plan_mix(plan, 10.0);
  EXPECT_EQ(mix.tags, 3.0);
  EXPECT_EQ(mix.boxes, 2.0);
  EXPECT_EQ(mix.scribbles, 10.0);
  EXPECT_EQ(plan_mix(plan, 10.0, BoxGeometry::kMask).masks, 2.0);
  const CostTable ct;
  EXPECT_NEAR(plan_cost(plan, ct, 10.0), (3 * 1.0 + 2 * 35.0 + 10 * 11.0) / 3600.0, 1e-12);
}

TEST(FitTest, SingleBoxObservation) {
  const double frames = 12345.0, hours = 17.5;
  const std::vector<CostObservation> obs{{AnnotationMix{0, 0, 0, frames, 0}, hours}};
  const auto fit = fit_cost_table(obs);
  EXPECT_DOUBLE_EQ(fit.table.box_s, 3600.0 * hours / frames);
  ASSERT_EQ(fit.fitted, std::vector<CostItem>{CostItem::kBox});
  EXPECT_NEAR(fit.residuals_hours[0], 0.0, 1e-9);
}

TEST(FitTest, RankDeficiency) {
  const std::vector<CostObservation> obs{{AnnotationMix{10, 0, 0, 10, 0}, 1.0}, {AnnotationMix{20, 0, 0, 20, 0}, 2.0}};
  try {
    (void)fit_cost_table(obs);
    FAIL();
  } catch (const CalibrationError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("tag"), std::string::npos) << what;
    EXPECT_NE(what.find("box"), std::string::npos) << what;
  }
}

TEST(FitTest, RecoversKnownCosts) {
  std::mt19937_64 rng(9);
  CostTable truth{1.5, 2.5, 12.0, 30.0, 80.0};
  std::vector<CostObservation> obs;
  for (int i = 0; i < 12; ++i) {
    AnnotationMix m{static_cast<double>(rng() % 1000), static_cast<double>(rng() % 1000),
                    static_cast<double>(rng() % 1000), static_cast<double>(rng() % 1000),
                    static_cast<double>(rng() % 1000)};
    obs.push_back({m, mix_cost_hours(m, truth)});
  }
  const auto fit = fit_cost_table(obs);
  EXPECT_NEAR(fit.table.tag_s, truth.tag_s, 1e-6);
  EXPECT_NEAR(fit.table.point_s, truth.point_s, 1e-6);
  EXPECT_NEAR(fit.table.scribble_s, truth.scribble_s, 1e-6);
  EXPECT_NEAR(fit.table.box_s, truth.box_s, 1e-6);
  EXPECT_NEAR(fit.table.mask_s, truth.mask_s, 1e-6);
}

// Whole-video dense annotation of pct% of a dataset: n tags plus pct% of the frames.
CostObservation dense_profile(double pct, double videos, double frames, double hours, bool masks) {
  AnnotationMix m;
  m.tags = videos;
  (masks ? m.masks : m.boxes) = pct / 100.0 * videos * frames;
  return {m, hours};
}

TEST(FitTest, ReportedBoxAnchorsAreLinear) {
  std::vector<CostObservation> obs;
  for (auto [pct, h] : {std::pair{1.1, 52.0}, {2.8, 132.0}, {5.0, 235.0}, {100.0, 4686.0}}) {
    obs.push_back(dense_profile(pct, 2284, 187, h, false));
  }
  const auto fit = fit_cost_table(obs, CostTable{}, std::vector<CostItem>{CostItem::kBox});
  const double twenty = mix_cost_hours(dense_profile(20, 2284, 187, 0, false).mix, fit.table);
  EXPECT_NEAR(twenty, 938.0, 1.0);
  for (double r : fit.residuals_hours) EXPECT_LE(std::abs(r), 1.0);
}

TEST(FitTest, ReportedMaskAnchors) {
  std::vector<CostObservation> obs;
  for (auto [pct, h] : {std::pair{30.0, 146.0}, {20.0, 97.0}, {6.0, 30.0}, {100.0, 487.0}}) {
    obs.push_back(dense_profile(pct, 666, 40, h, true));
  }
  const auto fit = fit_cost_table(obs, CostTable{}, std::vector<CostItem>{CostItem::kMask});
  const double fifteen = mix_cost_hours(dense_profile(15, 666, 40, 0, true).mix, fit.table);
  EXPECT_NEAR(fifteen, 74.0, 1.0);
  for (double r : fit.residuals_hours) EXPECT_LE(std::abs(r), 1.0);
}

TEST(PlanTest, JsonRoundTrip) {
  SelectionPlan plan;
  plan.round = 3;
  plan.policy = "random";
  plan.projected_cost_hours = 12.25;
  plan.entries = {{"a", 0.5, Bucket::kBox, {1, 9}, true}, {"b", 0.25, Bucket::kTag, {}, false}};
  EXPECT_EQ(parse_plan(serialize_plan(plan)), plan);
  EXPECT_TRUE(parse_plan("{}").entries.empty());
  EXPECT_THROW((void)parse_plan("[1]"), FormatError);
  EXPECT_THROW((void)parse_plan(R"({"entries":[{"video_id":"x","bucket":"tag","frames":[1]}]})"), ValidationError);
}

TEST(PlanTest, CostTableJson) {
  const CostTable ct{2, 3, 13, 40, 90};
  EXPECT_EQ(parse_cost_table(serialize_cost_table(ct)), ct);
  EXPECT_EQ(parse_cost_table(R"({"box_s": 50})").box_s, 50.0);
  EXPECT_EQ(parse_cost_table(R"({"box_s": 50})").mask_s, CostTable{}.mask_s);
}

}  // namespace
}  // namespace omvid
