/*
 * Copyright 2026 The lanegraph Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef LANEGRAPH_HARNESS_CLI_HPP_
#define LANEGRAPH_HARNESS_CLI_HPP_

// Command-line front end. run_cli() is the whole program; main() only
// forwards to it so tests can drive it in-process.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lanegraph/harness/evaluate.hpp"
#include "lanegraph/harness/ground_truth.hpp"
#include "lanegraph/harness/render.hpp"
#include "lanegraph/harness/scene.hpp"
#include "lanegraph/harness/synth.hpp"

namespace lanegraph {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitIo = 2,
  kExitUsage = 64,
};

inline constexpr const char* kPolylineFormat = "lanegraph.polylines";

/// Reads metric annotations (see docs/FORMATS.md) into raw scenes plus the
/// camera and ROI they were recorded with.
struct PolylineFile {
  CameraModel camera;
  RoiSpec roi;
  std::vector<RawScene> scenes;
};

inline PolylineFile polylines_from_json(const Json& j) {
  if (!j.is_object() || j.value("format", std::string()) != kPolylineFormat) {
    throw ValidationError(std::string("not a polyline file (expected format \"") + kPolylineFormat + "\")");
  }
  if (j.value("version", 0) != kFormatVersion) throw ValidationError("unsupported polyline format version");
  PolylineFile f;
  if (j.contains("camera")) f.camera = camera_from_json(j["camera"]);
  if (j.contains("roi")) f.roi = roi_from_json(j["roi"]);
  for (const Json& s : detail::require_array(j, "scenes", "polyline file")) {
    RawScene raw;
    raw.id = detail::field<std::string>(s, "id", "polyline scene");
    const std::string where = "polyline scene \"" + raw.id + "\"";
    raw.traffic_side = s.value("traffic_side", std::string("right")) == "left" ? TrafficSide::kLeft
                                                                               : TrafficSide::kRight;
    for (const Json& line : detail::require_array(s, "centerlines", where)) {
      if (!line.is_array()) throw ValidationError(where + ": a centerline is a list of [x, z] points");
      Polyline pts;
      for (const Json& p : line) pts.push_back(detail::point_from_json(p, where));
      raw.centerlines.push_back(std::move(pts));
    }
    if (s.contains("connections")) {
      for (const Json& e : detail::require_array(s, "connections", where)) {
        if (!e.is_array() || e.size() != 2 || !e[0].is_number_unsigned() || !e[1].is_number_unsigned()) {
          throw ValidationError(where + ": connections are [from, to] index pairs");
        }
        raw.connections.emplace_back(e[0].get<std::size_t>(), e[1].get<std::size_t>());
      }
    }
    if (s.contains("boxes")) {
      for (const Json& b : detail::require_array(s, "boxes", where)) {
        RawBox box;
        box.center = detail::point_from_json(b.value("center", Json()), where + " box");
        box.long_side = detail::field<double>(b, "long", where + " box");
        box.short_side = detail::field<double>(b, "short", where + " box");
        box.heading = detail::field<double>(b, "heading", where + " box");
        const std::string label = detail::field<std::string>(b, "label", where + " box");
        box.label = kNumObjectClasses;
        for (std::size_t c = 0; c < kNumObjectClasses; ++c)
          if (kObjectClassNames[c] == label) box.label = c;
        if (box.label == kNumObjectClasses) throw ValidationError(where + ": unknown class \"" + label + "\"");
        raw.boxes.push_back(box);
      }
    }
    f.scenes.push_back(std::move(raw));
  }
  return f;
}

namespace detail {

// Prints every error diagnostic; true when the set is clean.
inline bool check_scenes(const std::vector<SceneRecord>& scenes, bool ground_truth, const std::string& label,
                         std::ostream& err) {
  bool ok = true;
  ValidateOptions opts;
  opts.ground_truth = ground_truth;
  for (const auto& s : scenes) {
    for (const auto& d : validate(s.graph, opts)) {
      if (d.severity != Severity::kError) continue;
      err << label << " scene " << s.id << ": " << d.message << "\n";
      ok = false;
    }
  }
  return ok;
}

inline std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

struct EvalArgs {
  std::string gt, pred, report;
  std::size_t samples = kDefaultSamples;
  bool per_scene = false;
  std::string aggregation = "counts";
  bool no_miou = false;
  unsigned workers = 0;
  double det = 0.5, assoc = 0.5;
};

inline int run_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const auto gt = read_scenes(a.gt);
  const auto pred = read_scenes(a.pred);
  if (!check_scenes(gt, true, "ground truth", err) || !check_scenes(pred, false, "prediction", err)) {
    return kExitValidation;
  }
  EvalConfig cfg;
  cfg.samples = a.samples;
  cfg.per_scene = a.per_scene;
  cfg.aggregation = a.aggregation == "scene_mean" ? Aggregation::kSceneMean : Aggregation::kCounts;
  cfg.miou = !a.no_miou;
  cfg.workers = a.workers;
  cfg.detection_threshold = a.det;
  cfg.association_threshold = a.assoc;
  const MetricReport r = evaluate(gt, pred, cfg);
  write_json_file(a.report, report_to_json(r));
  out << "scenes " << r.scene_count << "  m_pre " << fixed(r.lane.m_pre) << "  m_rec " << fixed(r.lane.m_rec)
      << "  detect " << fixed(r.detection_ratio) << "  c_pre " << fixed(r.connectivity.precision) << "  c_rec "
      << fixed(r.connectivity.recall) << "  c_iou " << fixed(r.connectivity.iou);
  if (r.miou) out << "  miou " << fixed(r.miou->mean);
  out << "\n";
  return kExitOk;
}

inline int run_fit(const std::string& in, int degree, const std::string& path, std::ostream& out,
                   std::ostream& err) {
  if (degree < 1) throw ValidationError("--degree must be at least 1");
  const PolylineFile f = polylines_from_json(read_json_file(in));
  std::vector<SceneRecord> scenes;
  for (const RawScene& raw : f.scenes) {
    scenes.push_back(build_ground_truth(raw, f.camera, f.roi, degree));
    for (const auto& note : scenes.back().diagnostics) err << "scene " << raw.id << ": " << note << "\n";
  }
  if (!check_scenes(scenes, true, "fitted", err)) return kExitValidation;
  write_scenes(path, scenes);
  out << "fitted " << scenes.size() << " scenes\n";
  return kExitOk;
}

inline int run_merge(const std::string& in, const std::string& path, std::ostream& out, std::ostream& err) {
  auto scenes = read_scenes(in);
  if (!check_scenes(scenes, false, "input", err)) return kExitValidation;
  std::size_t junctions = 0;
  for (auto& s : scenes) {
    junctions += find_junctions(s.graph).size();
    s.graph = merge_junctions(s.graph);
  }
  write_scenes(path, scenes);
  out << "merged " << junctions << " junctions in " << scenes.size() << " scenes\n";
  return kExitOk;
}

inline int run_render(const std::string& scene_path, const std::string& pred_path, const std::string& id,
                      const std::string& path, std::ostream& out) {
  const auto scenes = read_scenes(scene_path);
  if (scenes.empty()) throw ValidationError(scene_path + " holds no scenes");
  auto pick = [&id](const std::vector<SceneRecord>& set, const std::string& what) -> const SceneRecord& {
    if (id.empty()) return set.front();
    for (const auto& s : set)
      if (s.id == id) return s;
    throw ValidationError(what + " has no scene \"" + id + "\"");
  };
  const SceneRecord& scene = pick(scenes, scene_path);
  std::optional<SceneRecord> pred;
  if (!pred_path.empty()) {
    const auto preds = read_scenes(pred_path);
    if (id.empty()) {
      for (const auto& s : preds)
        if (s.id == scene.id) pred = s;
      if (!pred) throw ValidationError(pred_path + " has no scene \"" + scene.id + "\"");
    } else {
      pred = pick(preds, pred_path);
    }
  }
  write_svg(path, scene, pred);
  out << "rendered " << scene.id << "\n";
  return kExitOk;
}

inline int run_synth(std::uint64_t seed, std::size_t count, const std::string& config, const std::string& gt_path,
                     const std::string& pred_path, std::ostream& out) {
  const SynthConfig cfg = config.empty() ? SynthConfig{} : synth_config_from_json(read_json_file(config));
  const auto [gt, pred] = synth_dataset(seed, count, cfg);
  write_scenes(gt_path, gt);
  write_scenes(pred_path, pred);
  out << "wrote " << gt.size() << " scenes\n";
  return kExitOk;
}

}  // namespace detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"Lane graph evaluation tools", "lanegraph"};
  app.require_subcommand(1);

  detail::EvalArgs ev;
  auto* eval = app.add_subcommand("eval", "Score predictions against ground truth");
  eval->add_option("--gt", ev.gt, "Ground-truth scene file")->required();
  eval->add_option("--pred", ev.pred, "Prediction scene file")->required();
  eval->add_option("--report", ev.report, "Report output (JSON)")->required();
  eval->add_option("--samples", ev.samples, "Points sampled per curve")->check(CLI::PositiveNumber);
  eval->add_flag("--per-scene", ev.per_scene, "Include per-scene metrics in the report");
  eval->add_option("--aggregation", ev.aggregation, "counts or scene_mean")
      ->check(CLI::IsMember({"counts", "scene_mean"}));
  eval->add_flag("--no-miou", ev.no_miou, "Skip the rasterized object mIOU");
  eval->add_option("--workers", ev.workers, "Worker threads (default: LANEGRAPH_WORKERS or all cores)");
  eval->add_option("--det-threshold", ev.det, "Centerline detection probability threshold")
      ->check(CLI::Range(0.0, 1.0));
  eval->add_option("--assoc-threshold", ev.assoc, "Edge association probability threshold")
      ->check(CLI::Range(0.0, 1.0));

  std::string fit_in, fit_out;
  int degree = kDefaultControlPoints - 1;
  auto* fit = app.add_subcommand("fit", "Build ground-truth scenes from metric polylines");
  fit->add_option("--in", fit_in, "Polyline file")->required();
  fit->add_option("--degree", degree, "Bezier degree");
  fit->add_option("--out", fit_out, "Scene output")->required();

  std::string merge_in, merge_out;
  auto* merge = app.add_subcommand("merge", "Snap connected endpoints together");
  merge->add_option("--in", merge_in, "Scene file")->required();
  merge->add_option("--out", merge_out, "Scene output")->required();

  std::string render_scene, render_pred, render_id, render_out;
  auto* render = app.add_subcommand("render", "Draw a scene as SVG");
  render->add_option("--scene", render_scene, "Scene file")->required();
  render->add_option("--pred", render_pred, "Prediction file to overlay");
  render->add_option("--id", render_id, "Scene id (default: first scene)");
  render->add_option("--out", render_out, "SVG output")->required();

  std::uint64_t seed = 0;
  std::size_t count = 1;
  std::string synth_config, synth_gt, synth_pred;
  auto* synth = app.add_subcommand("synth", "Generate synthetic ground truth and predictions");
  synth->add_option("--seed", seed, "Random seed")->required();
  synth->add_option("--scenes", count, "Number of scenes");
  synth->add_option("--config", synth_config, "Generator config (JSON)");
  synth->add_option("--out-gt", synth_gt, "Ground-truth output")->required();
  synth->add_option("--out-pred", synth_pred, "Prediction output")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "lanegraph: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*eval) return detail::run_eval(ev, out, err);
    if (*fit) return detail::run_fit(fit_in, degree, fit_out, out, err);
    if (*merge) return detail::run_merge(merge_in, merge_out, out, err);
    if (*render) return detail::run_render(render_scene, render_pred, render_id, render_out, out);
    return detail::run_synth(seed, count, synth_config, synth_gt, synth_pred, out);
  } catch (const IoError& e) {
    err << "lanegraph: " << e.what() << "\n";
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "lanegraph: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::domain_error& e) {
    err << "lanegraph: " << e.what() << "\n";
    return kExitValidation;
  } catch (const FitError& e) {
    err << "lanegraph: " << e.what() << "\n";
    return kExitValidation;
  }
}

}  // namespace lanegraph

#endif  // LANEGRAPH_HARNESS_CLI_HPP_
