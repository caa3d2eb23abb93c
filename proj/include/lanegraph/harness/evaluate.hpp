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

#ifndef LANEGRAPH_HARNESS_EVALUATE_HPP_
#define LANEGRAPH_HARNESS_EVALUATE_HPP_

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "lanegraph/assignment.hpp"
#include "lanegraph/harness/scene.hpp"
#include "lanegraph/metrics.hpp"
#include "lanegraph/objects.hpp"

namespace lanegraph {

inline constexpr const char* kReportFormat = "lanegraph.report";

enum class Aggregation {
  kCounts,     // sum counts over scenes, then divide
  kSceneMean,  // average per-scene ratios over non-vacuous scenes
};

struct EvalConfig {
  std::size_t samples = kDefaultSamples;
  std::vector<double> lane_thresholds = lanegraph::lane_thresholds();
  std::vector<double> object_thresholds = object_iou_thresholds();
  double detection_threshold = 0.5;
  double association_threshold = 0.5;
  Aggregation aggregation = Aggregation::kCounts;
  bool miou = true;
  bool per_scene = false;  // keep per-scene results in the report
  /// Worker threads; 0 reads LANEGRAPH_WORKERS, then falls back to the
  /// hardware concurrency. Not part of the report.
  unsigned workers = 0;

  bool same_metrics(const EvalConfig& o) const {
    return samples == o.samples && lane_thresholds == o.lane_thresholds &&
           object_thresholds == o.object_thresholds && detection_threshold == o.detection_threshold &&
           association_threshold == o.association_threshold && aggregation == o.aggregation &&
           miou == o.miou && per_scene == o.per_scene;
  }
};

struct SceneMetrics {
  std::string id;
  LanePRCurve lane;
  std::size_t matched_targets = 0;
  std::size_t targets = 0;
  double detection_ratio = 1.0;
  ConnectivityResult connectivity;
  std::vector<PRPoint> objects;
  std::optional<MiouResult> miou;

  friend bool operator==(const SceneMetrics&, const SceneMetrics&) = default;
};

struct MetricReport {
  EvalConfig config;
  std::size_t scene_count = 0;
  std::size_t vacuous_lane_scenes = 0;
  std::size_t vacuous_connectivity_scenes = 0;
  std::size_t vacuous_object_scenes = 0;
  LanePRCurve lane;
  std::size_t matched_targets = 0;
  std::size_t targets = 0;
  double detection_ratio = 1.0;
  ConnectivityResult connectivity;
  std::vector<PRPoint> objects;
  std::optional<MiouResult> miou;
  std::vector<SceneMetrics> per_scene;

  friend bool operator==(const MetricReport& a, const MetricReport& b) {
    return a.config.same_metrics(b.config) && a.scene_count == b.scene_count &&
           a.vacuous_lane_scenes == b.vacuous_lane_scenes &&
           a.vacuous_connectivity_scenes == b.vacuous_connectivity_scenes &&
           a.vacuous_object_scenes == b.vacuous_object_scenes && a.lane == b.lane &&
           a.matched_targets == b.matched_targets && a.targets == b.targets &&
           a.detection_ratio == b.detection_ratio && a.connectivity == b.connectivity &&
           a.objects == b.objects && a.miou == b.miou && a.per_scene == b.per_scene;
  }
};

namespace detail {

inline std::vector<PRPoint> pr_curve(const LaneDistances& d, std::span<const double> thresholds) {
  std::vector<PRPoint> pts;
  for (double t : thresholds) pts.push_back(pr_at(d, t));
  return pts;
}

inline ClassGrid semantic_labels(const std::vector<OrientedBox>& boxes, const RoiSpec& roi) {
  return grid_argmax(rasterize_instances(boxes, grid_height(roi), grid_width(roi), kNumObjectChannels));
}

inline unsigned worker_count(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("LANEGRAPH_WORKERS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

// Per-threshold sum of counts, recomputing the ratios.
inline std::vector<PRPoint> sum_points(const std::vector<std::vector<PRPoint>>& curves,
                                       std::span<const double> thresholds) {
  std::vector<PRPoint> out;
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    std::size_t tp = 0, fp = 0, fn = 0, tpt = 0;
    for (const auto& c : curves) {
      tp += c[k].tp;
      fp += c[k].fp;
      fn += c[k].fn;
      tpt += c[k].tp_target;
    }
    out.push_back(PRPoint::from_counts(thresholds[k], tp, fp, fn, tpt));
  }
  return out;
}

// Replaces the ratios in `summed` with means over the scenes where each side
// is defined.
inline void average_points(std::vector<PRPoint>& summed, const std::vector<std::vector<PRPoint>>& curves) {
  for (std::size_t k = 0; k < summed.size(); ++k) {
    double sp = 0.0, sr = 0.0;
    std::size_t np = 0, nr = 0;
    for (const auto& c : curves) {
      if (c[k].tp + c[k].fp > 0) {
        sp += c[k].precision;
        ++np;
      }
      if (c[k].tp_target + c[k].fn > 0) {
        sr += c[k].recall;
        ++nr;
      }
    }
    summed[k].precision = np == 0 ? 1.0 : sp / static_cast<double>(np);
    summed[k].recall = nr == 0 ? 1.0 : sr / static_cast<double>(nr);
  }
}

inline double mean_or_one(double sum, std::size_t n) { return n == 0 ? 1.0 : sum / static_cast<double>(n); }

}  // namespace detail

/// Metrics for one aligned ground-truth / prediction pair.
inline SceneMetrics evaluate_scene(const SceneRecord& gt, const SceneRecord& pred, const EvalConfig& cfg) {
  SceneMetrics m;
  m.id = gt.id;
  const LaneGraph est = activate(pred.graph, cfg.detection_threshold, cfg.association_threshold);
  const LaneGraph& tgt = gt.graph;
  const MatchMap match = match_min_l1(est.centerlines, tgt.centerlines);

  m.lane = summarize_curve(
      detail::pr_curve(lane_distances(est.centerlines, tgt.centerlines, match, cfg.samples), cfg.lane_thresholds));
  m.matched_targets = matched_target_count(match);
  m.targets = tgt.size();
  m.detection_ratio = detection_ratio(match, tgt.size());
  m.connectivity = connectivity(est.incidence, tgt.incidence, match);
  m.objects = object_pr(pred.objects, gt.objects, cfg.object_thresholds);
  if (cfg.miou) {
    m.miou = miou(detail::semantic_labels(pred.objects, gt.roi), detail::semantic_labels(gt.objects, gt.roi),
                  kNumObjectChannels, kNumObjectChannels - 1);
  }
  return m;
}

/// Folds per-scene metrics (in the given order) into a report.
inline MetricReport aggregate(std::vector<SceneMetrics> scenes, const EvalConfig& cfg) {
  MetricReport r;
  r.config = cfg;
  r.scene_count = scenes.size();

  std::vector<std::vector<PRPoint>> lane_curves, object_curves;
  std::size_t ctp = 0, cfp = 0, cfn = 0, cpos = 0;
  std::vector<std::size_t> inter(kNumObjectChannels, 0), uni(kNumObjectChannels, 0);
  double det_sum = 0.0, cp_sum = 0.0, cr_sum = 0.0, ci_sum = 0.0, miou_sum = 0.0;
  std::size_t det_n = 0, cp_n = 0, cr_n = 0, ci_n = 0, miou_n = 0;

  for (const SceneMetrics& s : scenes) {
    lane_curves.push_back(s.lane.points);
    object_curves.push_back(s.objects);
    if (s.lane.vacuous) ++r.vacuous_lane_scenes;
    if (s.connectivity.vacuous_precision && s.connectivity.vacuous_recall) ++r.vacuous_connectivity_scenes;
    if (std::all_of(s.objects.begin(), s.objects.end(), [](const PRPoint& p) { return p.vacuous; })) {
      ++r.vacuous_object_scenes;
    }
    r.matched_targets += s.matched_targets;
    r.targets += s.targets;
    if (s.targets > 0) {
      det_sum += s.detection_ratio;
      ++det_n;
    }
    ctp += s.connectivity.tp;
    cfp += s.connectivity.fp;
    cfn += s.connectivity.fn;
    cpos += s.connectivity.gt_positive;
    if (!s.connectivity.vacuous_precision) {
      cp_sum += s.connectivity.precision;
      ++cp_n;
    }
    if (!s.connectivity.vacuous_recall) {
      cr_sum += s.connectivity.recall;
      ++cr_n;
    }
    if (s.connectivity.tp + s.connectivity.fp + s.connectivity.fn > 0) {
      ci_sum += s.connectivity.iou;
      ++ci_n;
    }
    if (s.miou) {
      for (std::size_t c = 0; c < kNumObjectChannels; ++c) {
        inter[c] += s.miou->intersection[c];
        uni[c] += s.miou->uni[c];
      }
      if (!s.miou->vacuous) {
        miou_sum += s.miou->mean;
        ++miou_n;
      }
    }
  }

  std::vector<PRPoint> lane_points = detail::sum_points(lane_curves, cfg.lane_thresholds);
  r.objects = detail::sum_points(object_curves, cfg.object_thresholds);
  r.detection_ratio = safe_ratio(static_cast<double>(r.matched_targets), static_cast<double>(r.targets));
  r.connectivity = ConnectivityResult::from_counts(ctp, cfp, cfn, cpos);
  if (cfg.miou) r.miou = MiouResult::from_counts(inter, uni, kNumObjectChannels - 1);

  if (cfg.aggregation == Aggregation::kSceneMean) {
    detail::average_points(lane_points, lane_curves);
    detail::average_points(r.objects, object_curves);
    r.detection_ratio = detail::mean_or_one(det_sum, det_n);
    r.connectivity.precision = detail::mean_or_one(cp_sum, cp_n);
    r.connectivity.recall = detail::mean_or_one(cr_sum, cr_n);
    r.connectivity.iou = detail::mean_or_one(ci_sum, ci_n);
    if (r.miou) r.miou->mean = detail::mean_or_one(miou_sum, miou_n);
  }
  r.lane = summarize_curve(std::move(lane_points));
  if (cfg.per_scene) r.per_scene = std::move(scenes);
  return r;
}

/**
 * @brief Evaluates id-aligned scene sets.
 *
 * Scenes are paired by id and folded in id order, so the report does not
 * depend on file order. Scenes are evaluated on a worker pool.
 */
inline MetricReport evaluate(const std::vector<SceneRecord>& gt_set, const std::vector<SceneRecord>& pred_set,
                             const EvalConfig& cfg = {}) {
  std::map<std::string, const SceneRecord*> gt_by_id, pred_by_id;
  for (const auto& s : gt_set) {
    if (!gt_by_id.emplace(s.id, &s).second) throw DomainError("duplicate ground-truth scene id \"" + s.id + "\"");
  }
  for (const auto& s : pred_set) {
    if (!pred_by_id.emplace(s.id, &s).second) throw DomainError("duplicate prediction scene id \"" + s.id + "\"");
  }
  std::string unmatched;
  for (const auto& [id, s] : gt_by_id)
    if (!pred_by_id.contains(id)) unmatched += " " + id + " (no prediction)";
  for (const auto& [id, s] : pred_by_id)
    if (!gt_by_id.contains(id)) unmatched += " " + id + " (no ground truth)";
  if (!unmatched.empty()) throw DomainError("scene ids do not align:" + unmatched);

  std::vector<std::pair<const SceneRecord*, const SceneRecord*>> jobs;
  for (const auto& [id, g] : gt_by_id) jobs.emplace_back(g, pred_by_id.at(id));

  std::vector<SceneMetrics> results(jobs.size());
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < jobs.size(); k = next++) {
      try {
        results[k] = evaluate_scene(*jobs[k].first, *jobs[k].second, cfg);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  const unsigned n = std::min<std::size_t>(detail::worker_count(cfg.workers), std::max<std::size_t>(1, jobs.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < n; ++t) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return aggregate(std::move(results), cfg);
}

namespace detail {

inline Json point_to_json(const PRPoint& p) {
  return Json{{"threshold", p.threshold}, {"tp", p.tp},
              {"fp", p.fp},               {"fn", p.fn},
              {"tp_target", p.tp_target}, {"precision", p.precision},
              {"recall", p.recall},       {"vacuous", p.vacuous}};
}

inline PRPoint point_from_json(const Json& j) {
  const std::string w = "pr point";
  PRPoint p;
  p.threshold = field<double>(j, "threshold", w);
  p.tp = field<std::size_t>(j, "tp", w);
  p.fp = field<std::size_t>(j, "fp", w);
  p.fn = field<std::size_t>(j, "fn", w);
  p.tp_target = field<std::size_t>(j, "tp_target", w);
  p.precision = field<double>(j, "precision", w);
  p.recall = field<double>(j, "recall", w);
  p.vacuous = field<bool>(j, "vacuous", w);
  return p;
}

inline Json points_to_json(const std::vector<PRPoint>& pts) {
  Json a = Json::array();
  for (const auto& p : pts) a.push_back(point_to_json(p));
  return a;
}

inline std::vector<PRPoint> points_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("pr curve: expected an array");
  std::vector<PRPoint> out;
  for (const Json& p : j) out.push_back(point_from_json(p));
  return out;
}

inline Json lane_to_json(const LanePRCurve& c) {
  return Json{{"m_pre", c.m_pre}, {"m_rec", c.m_rec}, {"vacuous", c.vacuous}, {"pr_curve", points_to_json(c.points)}};
}

inline LanePRCurve lane_from_json(const Json& j) {
  LanePRCurve c;
  c.m_pre = field<double>(j, "m_pre", "lane");
  c.m_rec = field<double>(j, "m_rec", "lane");
  c.vacuous = field<bool>(j, "vacuous", "lane");
  c.points = points_from_json(j.at("pr_curve"));
  return c;
}

inline Json connectivity_to_json(const ConnectivityResult& c) {
  return Json{{"tp", c.tp},
              {"fp", c.fp},
              {"fn", c.fn},
              {"gt_positive", c.gt_positive},
              {"precision", c.precision},
              {"recall", c.recall},
              {"iou", c.iou},
              {"vacuous_precision", c.vacuous_precision},
              {"vacuous_recall", c.vacuous_recall}};
}

inline ConnectivityResult connectivity_from_json(const Json& j) {
  const std::string w = "connectivity";
  ConnectivityResult c;
  c.tp = field<std::size_t>(j, "tp", w);
  c.fp = field<std::size_t>(j, "fp", w);
  c.fn = field<std::size_t>(j, "fn", w);
  c.gt_positive = field<std::size_t>(j, "gt_positive", w);
  c.precision = field<double>(j, "precision", w);
  c.recall = field<double>(j, "recall", w);
  c.iou = field<double>(j, "iou", w);
  c.vacuous_precision = field<bool>(j, "vacuous_precision", w);
  c.vacuous_recall = field<bool>(j, "vacuous_recall", w);
  return c;
}

inline Json miou_to_json(const std::optional<MiouResult>& m) {
  if (!m) return nullptr;
  Json names = Json::array();
  for (auto n : kObjectClassNames) names.push_back(std::string(n));
  names.push_back("background");
  Json per = Json::array();
  for (const auto& v : m->per_class) per.push_back(v ? Json(*v) : Json(nullptr));
  return Json{{"classes", std::move(names)}, {"intersection", m->intersection}, {"union", m->uni},
              {"per_class", std::move(per)}, {"mean", m->mean},                 {"vacuous", m->vacuous}};
}

inline std::optional<MiouResult> miou_from_json(const Json& j) {
  if (j.is_null()) return std::nullopt;
  const std::string w = "miou";
  MiouResult m;
  m.intersection = field<std::vector<std::size_t>>(j, "intersection", w);
  m.uni = field<std::vector<std::size_t>>(j, "union", w);
  for (const Json& v : j.at("per_class")) {
    m.per_class.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
  }
  m.mean = field<double>(j, "mean", w);
  m.vacuous = field<bool>(j, "vacuous", w);
  return m;
}

inline Json detection_to_json(std::size_t matched, std::size_t targets, double ratio) {
  return Json{{"matched", matched}, {"targets", targets}, {"ratio", ratio}};
}

inline Json scene_metrics_to_json(const SceneMetrics& s) {
  return Json{{"id", s.id},
              {"lane", lane_to_json(s.lane)},
              {"detection", detection_to_json(s.matched_targets, s.targets, s.detection_ratio)},
              {"connectivity", connectivity_to_json(s.connectivity)},
              {"objects", points_to_json(s.objects)},
              {"miou", miou_to_json(s.miou)}};
}

inline SceneMetrics scene_metrics_from_json(const Json& j) {
  SceneMetrics s;
  s.id = field<std::string>(j, "id", "scene metrics");
  s.lane = lane_from_json(j.at("lane"));
  s.matched_targets = field<std::size_t>(j.at("detection"), "matched", "detection");
  s.targets = field<std::size_t>(j.at("detection"), "targets", "detection");
  s.detection_ratio = field<double>(j.at("detection"), "ratio", "detection");
  s.connectivity = connectivity_from_json(j.at("connectivity"));
  s.objects = points_from_json(j.at("objects"));
  s.miou = miou_from_json(j.at("miou"));
  return s;
}

}  // namespace detail

inline Json report_to_json(const MetricReport& r) {
  const EvalConfig& c = r.config;
  Json config{{"samples", c.samples},
              {"aggregation", c.aggregation == Aggregation::kCounts ? "counts" : "scene_mean"},
              {"detection_threshold", c.detection_threshold},
              {"association_threshold", c.association_threshold},
              {"lane_thresholds", c.lane_thresholds},
              {"object_iou_thresholds", c.object_thresholds},
              {"miou", c.miou},
              {"per_scene", c.per_scene}};
  Json per = Json::array();
  for (const auto& s : r.per_scene) per.push_back(detail::scene_metrics_to_json(s));
  return Json{{"format", kReportFormat},
              {"version", kFormatVersion},
              {"config", std::move(config)},
              {"scenes", r.scene_count},
              {"vacuous_scenes",
               {{"lane", r.vacuous_lane_scenes},
                {"connectivity", r.vacuous_connectivity_scenes},
                {"objects", r.vacuous_object_scenes}}},
              {"lane", detail::lane_to_json(r.lane)},
              {"detection", detail::detection_to_json(r.matched_targets, r.targets, r.detection_ratio)},
              {"connectivity", detail::connectivity_to_json(r.connectivity)},
              {"objects", detail::points_to_json(r.objects)},
              {"miou", detail::miou_to_json(r.miou)},
              {"per_scene", std::move(per)}};
}

inline MetricReport report_from_json(const Json& j) {
  if (!j.is_object() || j.value("format", std::string()) != kReportFormat) {
    throw ValidationError(std::string("not a metric report (expected format \"") + kReportFormat + "\")");
  }
  try {
    MetricReport r;
    const Json& c = j.at("config");
    r.config.samples = c.at("samples").get<std::size_t>();
    const std::string agg = c.at("aggregation").get<std::string>();
    if (agg != "counts" && agg != "scene_mean") throw ValidationError("unknown aggregation \"" + agg + "\"");
    r.config.aggregation = agg == "counts" ? Aggregation::kCounts : Aggregation::kSceneMean;
    r.config.detection_threshold = c.at("detection_threshold").get<double>();
    r.config.association_threshold = c.at("association_threshold").get<double>();
    r.config.lane_thresholds = c.at("lane_thresholds").get<std::vector<double>>();
    r.config.object_thresholds = c.at("object_iou_thresholds").get<std::vector<double>>();
    r.config.miou = c.at("miou").get<bool>();
    r.config.per_scene = c.at("per_scene").get<bool>();
    r.scene_count = j.at("scenes").get<std::size_t>();
    r.vacuous_lane_scenes = j.at("vacuous_scenes").at("lane").get<std::size_t>();
    r.vacuous_connectivity_scenes = j.at("vacuous_scenes").at("connectivity").get<std::size_t>();
    r.vacuous_object_scenes = j.at("vacuous_scenes").at("objects").get<std::size_t>();
    r.lane = detail::lane_from_json(j.at("lane"));
    r.matched_targets = j.at("detection").at("matched").get<std::size_t>();
    r.targets = j.at("detection").at("targets").get<std::size_t>();
    r.detection_ratio = j.at("detection").at("ratio").get<double>();
    r.connectivity = detail::connectivity_from_json(j.at("connectivity"));
    r.objects = detail::points_from_json(j.at("objects"));
    r.miou = detail::miou_from_json(j.at("miou"));
    for (const Json& s : j.at("per_scene")) r.per_scene.push_back(detail::scene_metrics_from_json(s));
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("metric report: ") + e.what());
  }
}

}  // namespace lanegraph

#endif  // LANEGRAPH_HARNESS_EVALUATE_HPP_
