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

#include "omvid/campaign.hpp"
#include "omvid/errors.hpp"

namespace omvid {
namespace {

TEST(SceneTest, DeterministicPerSeed) {
  const SceneParams p;
  const auto a = generate_scene(77, p, "a");
  const auto b = generate_scene(77, p, "a");
  EXPECT_EQ(a.rgb, b.rgb);
  EXPECT_EQ(a.boxes, b.boxes);
  EXPECT_EQ(a.motion, b.motion);
  EXPECT_NE(generate_scene(78, p, "a").rgb, a.rgb);
}

TEST(SceneTest, StaticActorKeepsItsBox) {
  SceneParams p;
  p.max_speed = 0.0;
  p.size_drift = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = generate_scene(seed, p);
    for (const auto& b : s.boxes) EXPECT_EQ(b, s.boxes.front());
    EXPECT_EQ(s.motion, Motion::kStatic);
  }
}

TEST(SceneTest, ActorInsideFrameAndMaskIsTheBox) {
  const SceneParams p;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s = generate_scene(seed, p);
    ASSERT_EQ(s.boxes.size(), static_cast<std::size_t>(p.frames));
    for (int t = 0; t < p.frames; ++t) {
      const Box& b = s.boxes[t];
      EXPECT_TRUE(b.well_formed());
      EXPECT_GE(b.x_min, 0);
      EXPECT_GE(b.y_min, 0);
      EXPECT_LT(b.x_max, p.width);
      EXPECT_LT(b.y_max, p.height);
      const Bitmap m = s.mask(t);
      EXPECT_EQ(m.count(), static_cast<std::size_t>(b.area()));
      EXPECT_EQ(m.bounds(), b);
    }
  }
}

TEST(SceneTest, ActorContrastsBackground) {
  const SceneParams p;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = generate_scene(seed, p);
    const Box& b = s.boxes[0];
    double in[3] = {0, 0, 0}, out[3] = {0, 0, 0};
    std::size_t n_in = 0, n_out = 0;
    for (int y = 0; y < p.height; ++y) {
      for (int x = 0; x < p.width; ++x) {
        const Lab& c = s.lab[s.shape.index(0, y, x)];
        const bool inside = x >= b.x_min && x <= b.x_max && y >= b.y_min && y <= b.y_max;
        double* acc = inside ? in : out;
        acc[0] += c.l;
        acc[1] += c.a;
        acc[2] += c.b;
        ++(inside ? n_in : n_out);
      }
    }
    double d = 0;
    for (int k = 0; k < 3; ++k) d += std::pow(in[k] / n_in - out[k] / n_out, 2);
    EXPECT_GE(std::sqrt(d), p.min_contrast - 5.0) << seed;
  }
}

TEST(SceneTest, InfeasibleGeometry) {
  SceneParams p;
  p.frames = 3;
  EXPECT_THROW(p.validate(), ParameterError);
  p = SceneParams{};
  p.max_size = 40;
  EXPECT_THROW((void)generate_scene(1, p), ParameterError);
}

TEST(ScribbleTest, MedialAxisLiesInsideTheMask) {
  const Bitmap m = Bitmap::from_box(20, 20, {3, 4, 14, 10});
  const auto pts = medial_scribble(m);
  ASSERT_GE(pts.size(), 4U);
  bool centre_row = false;
  for (const auto& p : pts) {
    // at least two pixels from the background
    EXPECT_GE(p.x, 4);
    EXPECT_LE(p.x, 13);
    EXPECT_GE(p.y, 5);
    EXPECT_LE(p.y, 9);
    centre_row = centre_row || (p.y == 7 && p.x == 8);
  }
  EXPECT_TRUE(centre_row);
  const Bitmap thin = Bitmap::from_box(5, 5, {2, 2, 2, 2});
  EXPECT_EQ(medial_scribble(thin), (std::vector<Point>{{2, 2}}));
}

TEST(DetectorTest, ZeroNoiseIsTheMask) {
  const auto s = generate_scene(3, SceneParams{});
  const auto map = detector_map(s, 0.0, 1);
  for (int t = 0; t < s.shape.frames; ++t) {
    const Bitmap m = s.mask(t);
    for (std::size_t i = 0; i < m.size(); ++i) {
      ASSERT_EQ(map[static_cast<std::size_t>(t) * m.size() + i], m.flat(i) ? 1.0F : 0.0F);
    }
  }
  const auto uv = map_uncertainty(s, map);
  EXPECT_EQ(video_uncertainty(uv), 0.0);
  const auto noisy = map_uncertainty(s, detector_map(s, 0.5, 1));
  EXPECT_GT(video_uncertainty(noisy), 0.0);
}

CampaignConfig small_config() {
  CampaignConfig cfg;
  cfg.rounds = 2;
  cfg.seed = 5;
  return cfg;
}

TEST(CampaignTest, ZeroRoundsIsEmpty) {
  auto cfg = small_config();
  cfg.rounds = 0;
  EXPECT_TRUE(run_campaign(generate_scenes(4, 1, SceneParams{}), cfg).empty());
}

TEST(CampaignTest, FullBoxRoundIsExactOnAnnotatedFrames) {
  auto cfg = small_config();
  cfg.rounds = 1;
  cfg.budget = BudgetConfig{.box_pct = 100.0, .scribble_pct = 0.0, .tag_pct = 0.0};
  const auto reports = run_campaign(generate_scenes(6, 2, SceneParams{}), cfg);
  ASSERT_EQ(reports.size(), 1U);
  EXPECT_EQ(reports[0].labeled_videos, 6U);
  EXPECT_EQ(reports[0].spatial_videos, 6U);
  EXPECT_GE(reports[0].annotated_frame_iou, 0.95);
}

TEST(CampaignTest, DeterministicAndCostAccumulates) {
  const auto scenes = generate_scenes(10, 9, SceneParams{});
  const auto a = run_campaign(scenes, small_config());
  const auto b = run_campaign(scenes, small_config());
  ASSERT_EQ(a.size(), 2U);
  EXPECT_EQ(a, b);
  double sum = 0;
  for (const auto& r : a) {
    sum += r.round_cost_hours;
    EXPECT_EQ(r.cumulative_cost_hours, sum);
    EXPECT_GE(r.mean_pseudo_label_iou, 0.0);
    EXPECT_LE(r.mean_pseudo_label_iou, 1.0);
    for (double m : {r.f_map_02, r.f_map_05, r.v_map_02, r.v_map_05}) {
      EXPECT_GE(m, 0.0);
      EXPECT_LE(m, 1.0);
    }
  }
  EXPECT_GT(a[1].labeled_videos, a[0].labeled_videos);
}

TEST(CampaignTest, ExhaustedPoolTruncatesWithWarning) {
  auto cfg = small_config();
  cfg.rounds = 3;
  cfg.budget = BudgetConfig{.box_pct = 40.0, .scribble_pct = 0.0, .tag_pct = 0.0};
  const auto r = run_campaign(generate_scenes(5, 4, SceneParams{}), cfg);
  ASSERT_EQ(r.size(), 3U);
  EXPECT_EQ(r[2].labeled_videos, 5U);
  EXPECT_FALSE(r[2].warnings.empty());
}

TEST(CampaignTest, DuplicateIdsRejected) {
  auto scenes = generate_scenes(3, 1, SceneParams{});
  scenes[1].video_id = scenes[0].video_id;
  EXPECT_THROW((void)run_campaign(scenes, small_config()), ValidationError);
}

TEST(CampaignTest, ReportsRoundTrip) {
  const auto r = run_campaign(generate_scenes(6, 3, SceneParams{}), small_config());
  EXPECT_EQ(parse_reports(serialize_reports(r)), r);
  const auto csv = reports_csv(r);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 3);
}

TEST(AblationTest, SuperpixelBeatsScribbleBoxOnAverage) {
  const auto scenes = generate_scenes(8, 21, SceneParams{});
  const CampaignConfig cfg;
  const auto res = run_ablation(scenes, default_ablation_levels(), cfg.slic, cfg.weights);
  ASSERT_EQ(res.size(), default_ablation_levels().size());
  double sp = 0, box = 0;
  for (const auto& r : res) {
    sp += r.superpixel_iou;
    box += r.scribble_box_iou;
  }
  EXPECT_GE(sp, box);
}

}  // namespace
}  // namespace omvid
