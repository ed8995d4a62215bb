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

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"
#include "fixtures.hpp"
#include "omvid/io.hpp"
#include "omvid/pseudolabel.hpp"
#include "omvid/selection.hpp"

namespace omvid {
namespace {

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

TEST(CliTest, EmptyPlanCostsNothing) {
  testing::TempDir dir;
  write_text_file(dir / "empty.json", "{}");
  const auto r = run_cli({"cost", "--plan", (dir / "empty.json").string(), "--costs", "default"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "0.0 hours\n");
  EXPECT_EQ(r.err.rfind("config {", 0), 0U) << r.err;
}

TEST(CliTest, InfeasibleBudgetIsAConfigurationError) {
  testing::TempDir dir;
  write_text_file(dir / "split.json", serialize_split({{}, {"a", "b"}, 1}));
  std::filesystem::create_directories(dir / "unc");
  const auto r = run_cli({"select", "--split", (dir / "split.json").string(), "--uncertainty",
                          (dir / "unc").string(), "--box-pct", "60", "--scribble-pct", "60"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("infeasible budget"), std::string::npos) << r.err;
}

TEST(CliTest, ExitCodes) {
  EXPECT_EQ(run_cli({"cost", "--bogus"}).code, 2);
  EXPECT_EQ(run_cli({}).code, 2);
  EXPECT_EQ(run_cli({"simulate", "--help"}).code, 0);
  testing::TempDir dir;
  write_text_file(dir / "bad.json", "{not json");
  EXPECT_EQ(run_cli({"cost", "--plan", (dir / "bad.json").string()}).code, 1);
  EXPECT_EQ(run_cli({"cost", "--plan", (dir / "missing.json").string()}).code, 1);
}

TEST(CliTest, SuperpixelThenPseudolabelOnHalves) {
  testing::TempDir dir;
  const Shape3 s{4, 8, 8};
  write_video_frames(dir / "halves", s, testing::halves_rgb(s));
  const auto spv = (dir / "halves.spv").string();
  auto r = run_cli({"superpixel", "--video", (dir / "halves").string(), "--interval", "4", "--compactness", "10",
                    "--min-region", "1", "--out", spv});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto sp = read_labels(spv);
  EXPECT_EQ(sp.shape, s);
  for (int t = 0; t < s.frames; ++t) {
    for (int y = 0; y < s.height; ++y) {
      EXPECT_NE(sp.at(t, y, 0), sp.at(t, y, 7));
      EXPECT_NE(sp.at(t, y, 3), sp.at(t, y, 4));
    }
  }

  write_text_file(dir / "ann.jsonl",
                  R"({"video_id":"halves","class":1,"entries":[{"frame":1,"kind":"scribble","data":[[1,1],[2,2]]}]})"
                  "\n");
  r = run_cli({"pseudolabel", "--annotations", (dir / "ann.jsonl").string(), "--superpixels", spv, "--mode",
               "superpixel", "--out", (dir / "out.plj").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream in(dir / "out.plj");
  const auto sets = parse_pseudolabels(in, [&](const std::string&) -> std::optional<Shape3> { return s; });
  ASSERT_EQ(sets.size(), 1U);
  ASSERT_TRUE(sets[0].frames[1]);
  const auto mask = std::get<Bitmap>(sets[0].frames[1]->geometry);
  EXPECT_TRUE(mask.get(1, 1));
  EXPECT_TRUE(mask.get(2, 2));
  for (int y = 0; y < 8; ++y) {
    for (int x = 4; x < 8; ++x) EXPECT_FALSE(mask.get(y, x));
  }
  const std::uint32_t l = sp.at(1, 1, 1);
  for (int y = 0; y < 8; ++y) {
    for (int x = 0; x < 8; ++x) EXPECT_EQ(mask.get(y, x), sp.at(1, y, x) == l || sp.at(1, y, x) == sp.at(1, 2, 2));
  }
}

TEST(CliTest, SelectThenCost) {
  testing::TempDir dir;
  write_text_file(dir / "split.json", serialize_split({{}, {"a", "b", "c", "d"}, 1}));
  std::filesystem::create_directories(dir / "unc");
  for (int i = 0; i < 4; ++i) {
    UncertaintyVolume uv{std::string(1, static_cast<char>('a' + i)), {10, 2, 2}, std::vector<float>(40, 0.1F * (i + 1))};
    write_uncertainty(uv, dir / "unc" / (uv.video_id + ".unc"));
  }
  const auto plan = (dir / "plan.json").string();
  auto r = run_cli({"select", "--split", (dir / "split.json").string(), "--uncertainty", (dir / "unc").string(),
                    "--box-pct", "25", "--scribble-pct", "25", "--tag-pct", "50", "--min-gap", "2", "--out", plan});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto p = read_plan(plan);
  ASSERT_EQ(p.entries.size(), 4U);
  EXPECT_EQ(p.entries[0].video_id, "d");
  EXPECT_EQ(p.entries[0].bucket, Bucket::kBox);
  EXPECT_EQ(p.entries[1].bucket, Bucket::kScribble);
  r = run_cli({"cost", "--plan", plan});
  ASSERT_EQ(r.code, 0) << r.err;
  const double hours = (4 * 1.0 + 2 * 35.0 + 2 * 11.0) / 3600.0;
  EXPECT_EQ(r.out, fmt::format("{:.1f} hours\n", hours));
  r = run_cli({"cost", "--plan", plan, "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(nlohmann::json::parse(r.out).at("hours").get<double>(), hours, 1e-12);
}

TEST(CliTest, CostFit) {
  testing::TempDir dir;
  write_text_file(dir / "obs.json", R"({"observations":[{"mix":{"boxes":1000},"hours":10}],"free":["box_s"]})");
  const auto r = run_cli({"cost", "--fit", (dir / "obs.json").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j.at("table").at("box_s").get<double>(), 36.0, 1e-9);
}

TEST(CliTest, EvalPerfectDetections) {
  testing::TempDir dir;
  write_text_file(dir / "gt.json", R"([{"video_id":"v","frame":0,"box":[0,0,9,9],"class":1}])");
  write_text_file(dir / "det.json", R"([{"video_id":"v","frame":0,"box":[0,0,9,9],"class":1,"confidence":0.7}])");
  const auto r = run_cli({"eval", "--detections", (dir / "det.json").string(), "--ground-truth",
                          (dir / "gt.json").string(), "--level", "frame"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("map").at("0.5").get<double>(), 1.0);
  EXPECT_EQ(j.at("map").at("0.2").get<double>(), 1.0);
}

TEST(CliTest, SimulateIsByteReproducible) {
  testing::TempDir dir;
  const std::vector<std::string> common{"simulate", "--scenes", "6", "--rounds", "2", "--emit-csv"};
  auto a = common;
  a.insert(a.end(), {(dir / "a.csv").string(), "--out", (dir / "a.json").string()});
  auto b = common;
  b.insert(b.end(), {(dir / "b.csv").string(), "--out", (dir / "b.json").string()});
  b.insert(b.begin(), {"--threads", "1"});
  ASSERT_EQ(run_cli(a).code, 0);
  ASSERT_EQ(run_cli(b).code, 0);
  EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "b.json"));
  EXPECT_EQ(slurp(dir / "a.csv"), slurp(dir / "b.csv"));
  EXPECT_FALSE(slurp(dir / "a.json").empty());
}

}  // namespace
}  // namespace omvid
