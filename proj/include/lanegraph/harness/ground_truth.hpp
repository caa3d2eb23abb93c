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

#ifndef LANEGRAPH_HARNESS_GROUND_TRUTH_HPP_
#define LANEGRAPH_HARNESS_GROUND_TRUTH_HPP_

#include <algorithm>
#include <cstddef>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lanegraph/bev_geometry.hpp"
#include "lanegraph/curve.hpp"
#include "lanegraph/harness/scene.hpp"
#include "lanegraph/lane_graph.hpp"
#include "lanegraph/objects.hpp"

namespace lanegraph {

/// Annotated box in meters, heading measured from the +x axis.
struct RawBox {
  Vec2 center;
  double long_side = 0.0;
  double short_side = 0.0;
  double heading = 0.0;
  std::size_t label = 0;
};

/// One scene as annotated: metric polylines, their declared end-to-start
/// connections and metric boxes.
struct RawScene {
  std::string id;
  TrafficSide traffic_side = TrafficSide::kRight;
  std::vector<Polyline> centerlines;
  std::vector<EdgeKey> connections;
  std::vector<RawBox> boxes;
};

namespace detail {

/// Fits a piece at up to `degree`, elevating short pieces so every curve has
/// the same number of control points.
inline BezierCurve fit_piece(const Polyline& pts, int degree) {
  const int usable = std::min<int>(degree, static_cast<int>(pts.size()) - 1);
  BezierCurve c = fit_bezier(pts, usable);
  while (static_cast<int>(c.degree()) < degree) c = elevate_degree(c);
  for (Vec2& p : c.control_points) {
    p.x = std::clamp(p.x, 0.0, 1.0);
    p.y = std::clamp(p.y, 0.0, 1.0);
  }
  return c;
}

inline std::optional<OrientedBox> normalize_box(const RawBox& raw, const RoiSpec& roi,
                                                std::vector<std::string>& notes, std::size_t k) {
  if (!in_roi(raw.center, roi)) {
    notes.push_back("box " + std::to_string(k) + " centered outside the ROI, dropped");
    return std::nullopt;
  }
  if (raw.label >= kNumObjectClasses) throw ValidationError("box " + std::to_string(k) + ": unknown class");
  // Axes are scaled independently, so go through the corners.
  const OrientedBox metric = make_box(raw.center, raw.long_side, raw.short_side, raw.heading, raw.label);
  Corners c = box_to_corners(metric);
  for (Vec2& p : c) p = {(p.x - roi.x_min) / roi.width(), (p.y - roi.z_min) / roi.depth()};
  BoxFromCorners fitted = corners_to_box(c);
  fitted.box.class_probs = metric.class_probs;
  return fitted.box;
}

}  // namespace detail

/**
 * @brief Builds a ground-truth scene from metric annotations.
 *
 * Polylines are resampled at the ROI resolution, clipped, normalized and fit
 * with Bezier curves of the given degree. A polyline leaving and re-entering
 * the ROI becomes several centerlines with no edge between them. A declared
 * connection survives only when the source still ends and the destination
 * still starts at the original endpoints. Connected endpoints are then snapped
 * together so the result passes validate() in ground-truth mode.
 */
inline SceneRecord build_ground_truth(const RawScene& raw, const CameraModel& cam, const RoiSpec& roi,
                                      int degree = kDefaultControlPoints - 1) {
  SceneRecord scene;
  scene.id = raw.id;
  scene.traffic_side = raw.traffic_side;
  scene.camera = cam;
  scene.roi = roi;
  scene.graph = make_graph({});

  // Index of the piece carrying each polyline's original start / end.
  std::vector<std::optional<std::size_t>> head(raw.centerlines.size()), tail(raw.centerlines.size());
  for (std::size_t i = 0; i < raw.centerlines.size(); ++i) {
    if (raw.centerlines[i].size() < 2) {
      throw ValidationError("centerline " + std::to_string(i) + " has fewer than 2 points");
    }
    std::size_t kept = 0;
    for (const ClippedSegment& seg : clip_resample_detailed(raw.centerlines[i], roi)) {
      if (seg.points.size() < 2) continue;
      const std::size_t idx = scene.graph.add(detail::fit_piece(seg.points, degree));
      if (seg.keeps_start) head[i] = idx;
      if (seg.keeps_end) tail[i] = idx;
      ++kept;
    }
    if (kept == 0) {
      scene.diagnostics.push_back("centerline " + std::to_string(i) + " lies outside the ROI");
    } else if (kept > 1) {
      scene.diagnostics.push_back("centerline " + std::to_string(i) + " split into " + std::to_string(kept) +
                                  " pieces by the ROI; no edges across the gaps");
    }
  }

  for (const auto& [from, to] : raw.connections) {
    if (from >= raw.centerlines.size() || to >= raw.centerlines.size()) {
      throw ValidationError("connection (" + std::to_string(from) + ", " + std::to_string(to) +
                            ") refers to a missing centerline");
    }
    if (tail[from] && head[to] && *tail[from] != *head[to]) {
      scene.graph.connect(*tail[from], *head[to]);
    } else {
      scene.diagnostics.push_back("connection (" + std::to_string(from) + ", " + std::to_string(to) +
                                  ") clipped away");
    }
  }
  scene.graph = merge_junctions(scene.graph);

  for (std::size_t k = 0; k < raw.boxes.size(); ++k) {
    if (auto b = detail::normalize_box(raw.boxes[k], roi, scene.diagnostics, k)) scene.objects.push_back(*b);
  }
  if (scene.graph.size() == 0 && scene.objects.empty()) scene.diagnostics.push_back("empty ROI intersection");
  return scene;
}

}  // namespace lanegraph

#endif  // LANEGRAPH_HARNESS_GROUND_TRUTH_HPP_
