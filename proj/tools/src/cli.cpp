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

#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "omvid/campaign.hpp"
#include "omvid/errors.hpp"
#include "omvid/io.hpp"
#include "omvid/metrics.hpp"
#include "omvid/parallel.hpp"
#include "omvid/pseudolabel.hpp"
#include "omvid/selection.hpp"
#include "omvid/superpixel3d.hpp"

namespace omvid::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

enum class Level { kError, kWarn, kInfo, kDebug };

class Log {
 public:
  Log(std::ostream& err, Level level) : err_(err), level_(level) {}

  void config(const std::string& text) { err_ << "config " << text << '\n'; }
  void warn(const std::string& msg) { emit(Level::kWarn, "warning", msg); }
  void info(const std::string& msg) { emit(Level::kInfo, "info", msg); }
  void debug(const std::string& msg) { emit(Level::kDebug, "debug", msg); }

 private:
  void emit(Level l, const char* tag, const std::string& msg) {
    if (l <= level_) err_ << tag << ": " << msg << '\n';
  }
  std::ostream& err_;
  Level level_;
};

struct Context {
  std::ostream& out;
  Log& log;
  std::uint64_t seed = 0;
};

std::string read_text(const fs::path& file) {
  const auto bytes = read_file_bytes(file);
  return {reinterpret_cast<const char*>(bytes.data()), bytes.size()};
}

void emit(const Context& ctx, const std::string& path, const std::string& text) {
  if (path.empty()) {
    ctx.out << text;
  } else {
    write_text_file(path, text);
  }
}

CostTable load_costs(const std::string& source, Log& log) {
  CostTable ct = source == "default" ? CostTable{} : parse_cost_table(read_text(source));
  ct.validate();
  for (const auto& w : ct.ordering_warnings()) log.warn(w);
  return ct;
}

BoxGeometry geometry_of(const std::string& s) { return s == "mask" ? BoxGeometry::kMask : BoxGeometry::kBox; }
PseudoMode mode_of(const std::string& s) { return s == "scribblebox" ? PseudoMode::kScribbleBox : PseudoMode::kSuperpixel; }
PolicyKind policy_of(const std::string& s) { return s == "random" ? PolicyKind::kRandom : PolicyKind::kBucket; }

// ---------------------------------------------------------------- superpixel

struct SuperpixelArgs {
  std::string video;
  SlicConfig slic;
  std::string out;
};

void add_superpixel(CLI::App& app, SuperpixelArgs& a) {
  auto* sub = app.add_subcommand("superpixel", "Segment a frame directory into spatio-temporal superpixels (SPV1).");
  sub->add_option("--video", a.video, "Directory of frame_%06d.png frames; its name is the video id")->required();
  sub->add_option("--interval", a.slic.interval, "Grid interval S in voxels");
  sub->add_option("--compactness", a.slic.compactness, "Compactness weight m");
  sub->add_option("--iters", a.slic.max_iters, "Maximum assignment/update iterations");
  sub->add_option("--temporal-scale", a.slic.temporal_scale, "Temporal scale of positions");
  sub->add_option("--min-region", a.slic.min_region, "Smallest region kept by connectivity enforcement");
  sub->add_option("--out", a.out, "Output SPV1 label volume")->required();
}

int run_superpixel(const Context& ctx, const SuperpixelArgs& a) {
  const auto video = load_video(a.video);
  a.slic.validate(video.shape());
  SegmentReport report;
  const auto sp = segment(video, a.slic, &report);
  write_labels(sp, a.out);
  ctx.log.info(fmt::format("{}: {} superpixels from {} seeds after {} iterations", sp.video_id, sp.cluster_count(),
                           report.initial_clusters, report.iterations));
  return 0;
}

// --------------------------------------------------------------- pseudolabel

struct PseudolabelArgs {
  std::string annotations;
  std::string superpixels;
  std::string videos;
  std::vector<int> shape;
  std::string mode = "superpixel";
  double decay = 0.9;
  double floor = 0.1;
  std::string out;
};

void add_pseudolabel(CLI::App& app, PseudolabelArgs& a) {
  auto* sub = app.add_subcommand("pseudolabel", "Turn sparse annotations into weighted per-frame pseudo-labels.");
  sub->add_option("--annotations", a.annotations, "Annotation JSON-lines file")->required();
  sub->add_option("--superpixels", a.superpixels, "SPV1 file named <video_id>.spv, or a directory of them");
  sub->add_option("--videos", a.videos, "Root of <video_id>/ frame directories (frame geometry lookup)");
  sub->add_option("--shape", a.shape, "Frame geometry T H W used when no other source knows the video")
      ->expected(3);
  sub->add_option("--mode", a.mode, "Sparse-label expansion")->check(CLI::IsMember({"superpixel", "scribblebox"}));
  sub->add_option("--decay", a.decay, "Per-frame weight decay");
  sub->add_option("--floor", a.floor, "Minimum frame weight");
  sub->add_option("--out", a.out, "Output JSON-lines file (default: standard output)");
}

int run_pseudolabel(const Context& ctx, const PseudolabelArgs& a) {
  const WeightConfig wc{a.decay, a.floor};
  wc.validate();
  std::map<std::string, SuperpixelLabels> sps;
  if (!a.superpixels.empty()) {
    const fs::path p = a.superpixels;
    if (fs::is_directory(p)) {
      std::vector<fs::path> files;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.path().extension() == ".spv") files.push_back(e.path());
      }
      std::sort(files.begin(), files.end());
      for (const auto& f : files) {
        auto sp = read_labels(f);
        sps.emplace(sp.video_id, std::move(sp));
      }
    } else {
      auto sp = read_labels(p);
      sps.emplace(sp.video_id, std::move(sp));
    }
  }
  std::optional<Shape3> fallback;
  if (!a.shape.empty()) {
    fallback = Shape3{a.shape[0], a.shape[1], a.shape[2]};
    if (!fallback->valid()) throw ConfigError(fmt::format("--shape {} {} {} has a zero dimension", a.shape[0], a.shape[1], a.shape[2]));
  }
  const ShapeLookup lookup = [&](const std::string& id) -> std::optional<Shape3> {
    if (const auto it = sps.find(id); it != sps.end()) return it->second.shape;
    if (!a.videos.empty() && fs::is_directory(fs::path(a.videos) / id)) return load_video(fs::path(a.videos) / id).shape();
    return fallback;
  };
  const auto records = parse_annotations(fs::path(a.annotations), lookup);
  std::string text;
  for (const auto& rec : records) {
    if (rec.tag_only()) {
      ctx.log.info(fmt::format("{}: tag only, no pseudo-labels", rec.video_id));
      continue;
    }
    const auto it = sps.find(rec.video_id);
    const auto set = build_pseudolabels(rec, *lookup(rec.video_id), it == sps.end() ? nullptr : &it->second, wc,
                                        mode_of(a.mode));
    ctx.log.info(fmt::format("{}: {} labeled frames", rec.video_id, set.labeled_frames()));
    text += serialize_pseudolabels(set);
  }
  emit(ctx, a.out, text);
  return 0;
}

// -------------------------------------------------------------------- select

struct SelectArgs {
  std::string split;
  std::string uncertainty;
  BudgetConfig budget;
  std::string policy = "bucket";
  std::string costs = "default";
  std::string geometry = "box";
  std::string out;
};

void add_select(CLI::App& app, SelectArgs& a) {
  auto* sub = app.add_subcommand("select", "Choose the next videos to annotate and the annotation kind for each.");
  sub->add_option("--split", a.split, "Split JSON {\"round\", \"labeled\", \"unlabeled\"}")->required();
  sub->add_option("--uncertainty", a.uncertainty, "Directory of <video_id>.unc UNC1 volumes")->required();
  sub->add_option("--box-pct", a.budget.box_pct, "Percent of all videos to send for boxes");
  sub->add_option("--scribble-pct", a.budget.scribble_pct, "Percent of all videos to send for scribbles");
  sub->add_option("--tag-pct", a.budget.tag_pct, "Percent of all videos to send for tags");
  sub->add_option("--box-frames", a.budget.frames_per_video_box, "Frames annotated per box video");
  sub->add_option("--scribble-frames", a.budget.frames_per_video_scribble, "Frames annotated per scribble video");
  sub->add_option("--min-gap", a.budget.min_frame_gap, "Minimum distance between chosen frames");
  sub->add_option("--policy", a.policy, "Selection policy")->check(CLI::IsMember({"bucket", "random"}));
  sub->add_option("--costs", a.costs, "Cost table JSON, or 'default'");
  sub->add_option("--geometry", a.geometry, "Whether box videos are charged as boxes or masks")
      ->check(CLI::IsMember({"box", "mask"}));
  sub->add_option("--out", a.out, "Output plan JSON (default: standard output)");
}

int run_select(const Context& ctx, const SelectArgs& a) {
  const auto split = read_split(a.split);
  const auto counts = bucket_counts(split, a.budget);
  const auto ct = load_costs(a.costs, ctx.log);
  const auto volumes = read_uncertainty_dir(a.uncertainty);

  std::map<std::string, double> scores;
  std::map<std::string, std::vector<double>> frames;
  double total_frames = 0.0;
  std::size_t known = 0;
  for (const auto* ids : {&split.labeled, &split.unlabeled}) {
    for (const auto& id : *ids) {
      const auto it = volumes.find(id);
      if (it == volumes.end()) continue;
      frames[id] = frame_scores(it->second);
      scores[id] = video_uncertainty(it->second);
      total_frames += it->second.shape.frames;
      ++known;
    }
  }
  const double mean_frames = known > 0 ? total_frames / static_cast<double>(known) : 0.0;
  auto plan = select(split, scores, counts, a.budget, frames, {policy_of(a.policy), ctx.seed});
  plan.projected_cost_hours = plan_cost(plan, ct, mean_frames, geometry_of(a.geometry));
  for (const auto& e : plan.entries) {
    if (e.uniform_fallback) ctx.log.warn(fmt::format("{}: frames spaced uniformly, minimum gap not attainable", e.video_id));
  }
  ctx.log.info(fmt::format("{} box, {} scribble, {} tag videos; projected {:.3f} hours", counts.box, counts.scribble,
                           counts.tag, plan.projected_cost_hours));
  emit(ctx, a.out, serialize_plan(plan));
  return 0;
}

// ---------------------------------------------------------------------- cost

struct CostArgs {
  std::string plan;
  std::string fit;
  std::string costs = "default";
  double mean_frames = 0.0;
  std::string geometry = "box";
  bool as_json = false;
  std::string out;
};

void add_cost(CLI::App& app, CostArgs& a) {
  auto* sub = app.add_subcommand("cost", "Annotation man-hours of a plan, or fit unit costs to observed totals.");
  auto* plan = sub->add_option("--plan", a.plan, "Plan JSON to price");
  auto* fit = sub->add_option("--fit", a.fit,
                              "Observation JSON {\"observations\": [{\"mix\": {\"tags\", \"points\", \"scribbles\", "
                              "\"boxes\", \"masks\"}, \"hours\"}], \"free\": [\"box_s\", ...]}");
  plan->excludes(fit);
  sub->add_option("--costs", a.costs, "Cost table JSON, or 'default' (also the base for --fit)");
  sub->add_option("--mean-frames", a.mean_frames, "Frames charged for whole-video box/scribble entries");
  sub->add_option("--geometry", a.geometry, "Whether box entries are charged as boxes or masks")
      ->check(CLI::IsMember({"box", "mask"}));
  sub->add_flag("--json", a.as_json, "Print JSON instead of a one-line summary");
  sub->add_option("--out", a.out, "Output file (default: standard output)");
}

std::optional<CostItem> cost_item(const std::string& name) {
  for (auto item : {CostItem::kTag, CostItem::kPoint, CostItem::kScribble, CostItem::kBox, CostItem::kMask}) {
    if (name == to_string(item)) return item;
  }
  return std::nullopt;
}

int run_cost(const Context& ctx, const CostArgs& a) {
  if (a.plan.empty() == a.fit.empty()) throw ConfigError("cost needs exactly one of --plan or --fit");
  const auto ct = load_costs(a.costs, ctx.log);
  if (!a.plan.empty()) {
    if (a.mean_frames < 0.0) throw ConfigError("--mean-frames must be non-negative");
    const auto plan = read_plan(a.plan);
    const auto geometry = geometry_of(a.geometry);
    const auto mix = plan_mix(plan, a.mean_frames, geometry);
    const double hours = plan_cost(plan, ct, a.mean_frames, geometry);
    if (a.as_json) {
      ordered_json j;
      j["hours"] = hours;
      j["mix"] = {{"tags", mix.tags}, {"points", mix.points}, {"scribbles", mix.scribbles}, {"boxes", mix.boxes},
                  {"masks", mix.masks}};
      emit(ctx, a.out, j.dump(2) + "\n");
    } else {
      emit(ctx, a.out, fmt::format("{:.1f} hours\n", hours));
    }
    return 0;
  }

  std::vector<CostObservation> obs;
  std::optional<std::vector<CostItem>> free;
  try {
    const auto j = json::parse(read_text(a.fit));
    for (const auto& o : j.at("observations")) {
      const auto& m = o.at("mix");
      obs.push_back({{m.value("tags", 0.0), m.value("points", 0.0), m.value("scribbles", 0.0), m.value("boxes", 0.0),
                      m.value("masks", 0.0)},
                     o.at("hours").get<double>()});
    }
    if (j.contains("free")) {
      free.emplace();
      for (const auto& name : j["free"]) {
        const auto item = cost_item(name.get<std::string>());
        if (!item) throw FormatError(fmt::format("unknown cost item '{}'", name.get<std::string>()));
        free->push_back(*item);
      }
    }
  } catch (const json::exception& e) {
    throw FormatError(fmt::format("{}: {}", a.fit, e.what()));
  }
  const auto fit = fit_cost_table(obs, ct, free);
  ordered_json j;
  j["table"] = ordered_json::parse(serialize_cost_table(fit.table));
  j["fitted"] = ordered_json::array();
  for (auto item : fit.fitted) j["fitted"].push_back(to_string(item));
  j["residuals_hours"] = fit.residuals_hours;
  emit(ctx, a.out, j.dump(2) + "\n");
  return 0;
}

// ------------------------------------------------------------------ simulate

struct SimulateArgs {
  int scenes = 12;
  int rounds = 3;
  std::string policy = "bucket";
  double noise = 0.4;
  double noise_spread = 3.0;
  double difficulty_spread = 1.0;
  BudgetConfig budget{.box_pct = 10.0, .scribble_pct = 20.0, .tag_pct = 0.0};
  SceneParams scene;
  std::string mode = "superpixel";
  std::string geometry = "box";
  std::string costs = "default";
  std::string out;
  std::string csv;
};

void add_simulate(CLI::App& app, SimulateArgs& a) {
  auto* sub = app.add_subcommand("simulate", "Run a multi-round annotation campaign on synthetic videos.");
  sub->add_option("--scenes", a.scenes, "Number of synthetic videos");
  sub->add_option("--rounds", a.rounds, "Selection rounds");
  sub->add_option("--policy", a.policy, "Selection policy")->check(CLI::IsMember({"bucket", "random"}));
  sub->add_option("--noise", a.noise, "Detector noise of the first video");
  sub->add_option("--noise-spread", a.noise_spread, "Relative noise increase towards the last video");
  sub->add_option("--difficulty-spread", a.difficulty_spread, "Relative texture/speed increase towards the last video");
  sub->add_option("--box-pct", a.budget.box_pct, "Percent of videos sent for boxes each round");
  sub->add_option("--scribble-pct", a.budget.scribble_pct, "Percent of videos sent for scribbles each round");
  sub->add_option("--tag-pct", a.budget.tag_pct, "Percent of videos sent for tags each round");
  sub->add_option("--box-frames", a.budget.frames_per_video_box, "Frames annotated per box video");
  sub->add_option("--scribble-frames", a.budget.frames_per_video_scribble, "Frames annotated per scribble video");
  sub->add_option("--min-gap", a.budget.min_frame_gap, "Minimum distance between chosen frames");
  sub->add_option("--frames", a.scene.frames, "Frames per video");
  sub->add_option("--height", a.scene.height, "Frame height");
  sub->add_option("--width", a.scene.width, "Frame width");
  sub->add_option("--mode", a.mode, "Scribble expansion")->check(CLI::IsMember({"superpixel", "scribblebox"}));
  sub->add_option("--geometry", a.geometry, "Box videos receive boxes or masks")->check(CLI::IsMember({"box", "mask"}));
  sub->add_option("--costs", a.costs, "Cost table JSON, or 'default'");
  sub->add_option("--out", a.out, "Report JSON (default: standard output)");
  sub->add_option("--emit-csv", a.csv, "Also write a cost-vs-metric CSV table");
}

int run_simulate(const Context& ctx, const SimulateArgs& a) {
  CampaignConfig cfg;
  cfg.rounds = a.rounds;
  cfg.seed = ctx.seed;
  cfg.budget = a.budget;
  cfg.policy = {policy_of(a.policy), ctx.seed};
  cfg.noise = a.noise;
  cfg.noise_spread = a.noise_spread;
  cfg.costs = load_costs(a.costs, ctx.log);
  cfg.geometry = geometry_of(a.geometry);
  cfg.mode = mode_of(a.mode);
  cfg.validate();
  if (a.scenes < 1) throw ConfigError(fmt::format("--scenes {} must be at least 1", a.scenes));
  const auto scenes = generate_scenes(a.scenes, ctx.seed, a.scene, a.difficulty_spread);
  const auto reports = run_campaign(scenes, cfg);
  for (const auto& r : reports) {
    for (const auto& w : r.warnings) ctx.log.warn(w);
    ctx.log.info(fmt::format("round {}: {:.3f} hours, mean pseudo-label IoU {:.4f}, f-mAP@0.5 {:.4f}", r.round_index,
                             r.cumulative_cost_hours, r.mean_pseudo_label_iou, r.f_map_05));
  }
  emit(ctx, a.out, serialize_reports(reports));
  if (!a.csv.empty()) write_text_file(a.csv, reports_csv(reports));
  return 0;
}

// ---------------------------------------------------------------------- eval

struct EvalArgs {
  std::string detections;
  std::string ground_truth;
  std::string level = "frame";
  std::vector<double> iou{0.2, 0.5};
  std::string out;
};

void add_eval(CLI::App& app, EvalArgs& a) {
  auto* sub = app.add_subcommand(
      "eval",
      "Frame or video mAP of detections.\n"
      "frame level: [{\"video_id\", \"frame\", \"box\": [x0,y0,x1,y1], \"class\", \"confidence\"}]\n"
      "video level: [{\"video_id\", \"class\", \"confidence\", \"boxes\": [{\"frame\", \"box\"}]}]\n"
      "Ground truth uses the same layout; its confidences are ignored.");
  sub->add_option("--detections", a.detections, "Detection JSON")->required();
  sub->add_option("--ground-truth", a.ground_truth, "Ground-truth JSON")->required();
  sub->add_option("--level", a.level, "Frame boxes or video tubes")->check(CLI::IsMember({"frame", "video"}));
  sub->add_option("--iou", a.iou, "IoU thresholds");
  sub->add_option("--out", a.out, "Output JSON (default: standard output)");
}

Box parse_box(const json& j) {
  Box b{j.at(0).get<int>(), j.at(1).get<int>(), j.at(2).get<int>(), j.at(3).get<int>()};
  if (j.size() != 4 || !b.well_formed()) throw ValidationError(fmt::format("malformed box {}", j.dump()));
  return b;
}

std::vector<Detection> parse_frame_dets(const json& arr) {
  std::vector<Detection> out;
  for (const auto& j : arr) {
    out.push_back({j.value("video_id", std::string()), j.at("frame").get<int>(), parse_box(j.at("box")),
                   j.at("class").get<int>(), j.value("confidence", 1.0)});
  }
  return out;
}

std::vector<Tube> parse_tubes(const json& arr) {
  std::vector<Tube> out;
  for (const auto& j : arr) {
    Tube t{j.value("video_id", std::string()), j.at("class").get<int>(), j.value("confidence", 1.0), {}};
    for (const auto& b : j.at("boxes")) {
      const int f = b.at("frame").get<int>();
      if (!t.boxes.emplace(f, parse_box(b.at("box"))).second) {
        throw ValidationError(fmt::format("tube in '{}' repeats frame {}", t.video_id, f));
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

int run_eval(const Context& ctx, const EvalArgs& a) {
  ordered_json result;
  result["level"] = a.level;
  ordered_json maps = ordered_json::object();
  try {
    const auto dj = json::parse(read_text(a.detections));
    const auto gj = json::parse(read_text(a.ground_truth));
    if (a.level == "frame") {
      const auto dets = parse_frame_dets(dj);
      std::vector<GroundTruth> gts;
      for (const auto& d : parse_frame_dets(gj)) gts.push_back({d.video_id, d.frame, d.box, d.label});
      for (double tau : a.iou) maps[fmt::format("{}", tau)] = frame_map(dets, gts, tau);
    } else {
      const auto dets = parse_tubes(dj);
      const auto gts = parse_tubes(gj);
      for (double tau : a.iou) maps[fmt::format("{}", tau)] = video_map(dets, gts, tau);
    }
  } catch (const json::exception& e) {
    throw FormatError(e.what());
  }
  result["map"] = std::move(maps);
  emit(ctx, a.out, result.dump(2) + "\n");
  return 0;
}

// Every option of the chosen subcommand with its resolved value.
ordered_json resolved_config(const CLI::App& sub, unsigned threads, const std::string& level, std::uint64_t seed) {
  ordered_json j;
  j["subcommand"] = sub.get_name();
  j["threads"] = threads;
  j["log_level"] = level;
  j["seed"] = seed;
  for (const auto* opt : sub.get_options()) {
    if (opt->get_lnames().empty() || opt->get_lnames().front() == "help") continue;
    const auto& name = opt->get_lnames().front();
    if (opt->count() > 0) {
      const auto& r = opt->results();
      j[name] = r.size() == 1 ? ordered_json(r.front()) : ordered_json(r);
    } else {
      j[name] = opt->get_default_str();
    }
  }
  return j;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Annotation-efficient video action detection toolkit.", "omvid"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  unsigned threads = 0;
  std::string level = "info";
  std::uint64_t seed = 0;
  app.add_option("--threads", threads, "Worker threads (0 = available parallelism)");
  app.add_option("--log-level", level, "Diagnostics verbosity")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}));
  app.add_option("--seed", seed, "Seed for every random choice");

  SuperpixelArgs superpixel;
  PseudolabelArgs pseudolabel;
  SelectArgs select_args;
  CostArgs cost;
  SimulateArgs simulate;
  EvalArgs eval;
  add_superpixel(app, superpixel);
  add_pseudolabel(app, pseudolabel);
  add_select(app, select_args);
  add_cost(app, cost);
  add_simulate(app, simulate);
  add_eval(app, eval);
  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  const std::map<std::string, Level> levels{
      {"error", Level::kError}, {"warn", Level::kWarn}, {"info", Level::kInfo}, {"debug", Level::kDebug}};
  Log log(err, levels.at(level));
  const CLI::App* sub = app.get_subcommands().front();
  log.config(resolved_config(*sub, threads, level, seed).dump());
  set_thread_count(threads);
  Context ctx{out, log, seed};

  try {
    const auto& name = sub->get_name();
    if (name == "superpixel") return run_superpixel(ctx, superpixel);
    if (name == "pseudolabel") return run_pseudolabel(ctx, pseudolabel);
    if (name == "select") return run_select(ctx, select_args);
    if (name == "cost") return run_cost(ctx, cost);
    if (name == "simulate") return run_simulate(ctx, simulate);
    return run_eval(ctx, eval);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace omvid::cli
