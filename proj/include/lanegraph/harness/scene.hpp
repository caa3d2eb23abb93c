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

#ifndef LANEGRAPH_HARNESS_SCENE_HPP_
#define LANEGRAPH_HARNESS_SCENE_HPP_

// Scene records and their JSON form. All coordinates in a scene file are
// normalized to the ROI; see docs/FORMATS.md.

#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lanegraph/bev_geometry.hpp"
#include "lanegraph/error.hpp"
#include "lanegraph/lane_graph.hpp"
#include "lanegraph/objects.hpp"
#include "json.hpp"

namespace lanegraph {

using Json = nlohmann::ordered_json;

inline constexpr const char* kSceneFormat = "lanegraph.scenes";
inline constexpr int kFormatVersion = 1;

enum class TrafficSide { kRight, kLeft };

struct SceneRecord {
  std::string id;
  TrafficSide traffic_side = TrafficSide::kRight;
  CameraModel camera;
  RoiSpec roi;
  LaneGraph graph;
  std::vector<OrientedBox> objects;
  /// Notes from construction (clipping, dropped edges). Not used by metrics.
  std::vector<std::string> diagnostics;

  friend bool operator==(const SceneRecord&, const SceneRecord&) = default;
};

namespace detail {

inline Json point_json(const Vec2& p) { return Json::array({p.x, p.y}); }

template <typename T>
T field(const Json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end()) throw ValidationError(where + ": missing \"" + key + "\"");
  try {
    return it->template get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ValidationError(where + ": \"" + key + "\" has the wrong type");
  }
}

inline Vec2 point_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw ValidationError(where + ": expected a point [x, z]");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}

inline const Json& require_array(const Json& j, const char* key, const std::string& where) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_array()) {
    throw ValidationError(where + ": \"" + key + "\" must be an array");
  }
  return *it;
}

}  // namespace detail

inline Json camera_to_json(const CameraModel& c) {
  return Json{{"focal", c.focal},           {"center_col", c.center_col},
              {"center_row", c.center_row}, {"height", c.height},
              {"image_width", c.image_width}, {"image_height", c.image_height}};
}

inline CameraModel camera_from_json(const Json& j) {
  const std::string w = "camera";
  CameraModel c;
  c.focal = detail::field<double>(j, "focal", w);
  c.center_col = detail::field<double>(j, "center_col", w);
  c.center_row = detail::field<double>(j, "center_row", w);
  c.height = detail::field<double>(j, "height", w);
  c.image_width = detail::field<int>(j, "image_width", w);
  c.image_height = detail::field<int>(j, "image_height", w);
  return c;
}

inline Json roi_to_json(const RoiSpec& r) {
  return Json{{"x_min", r.x_min}, {"x_max", r.x_max},           {"z_min", r.z_min},
              {"z_max", r.z_max}, {"resolution", r.resolution}};
}

inline RoiSpec roi_from_json(const Json& j) {
  const std::string w = "roi";
  RoiSpec r;
  r.x_min = detail::field<double>(j, "x_min", w);
  r.x_max = detail::field<double>(j, "x_max", w);
  r.z_min = detail::field<double>(j, "z_min", w);
  r.z_max = detail::field<double>(j, "z_max", w);
  r.resolution = detail::field<double>(j, "resolution", w);
  return r;
}

inline Json box_to_json(const OrientedBox& b) {
  return Json{{"center", detail::point_json(b.center)},
              {"long", b.long_side},
              {"short", b.short_side},
              {"heading", b.heading},
              {"class_probs", b.class_probs}};
}

inline OrientedBox box_from_json(const Json& j, const std::string& where) {
  OrientedBox b;
  if (!j.is_object()) throw ValidationError(where + ": expected an object");
  b.center = detail::point_from_json(j.value("center", Json()), where + ".center");
  b.long_side = detail::field<double>(j, "long", where);
  b.short_side = detail::field<double>(j, "short", where);
  b.heading = detail::field<double>(j, "heading", where);
  b.class_probs = detail::field<std::vector<double>>(j, "class_probs", where);
  return b;
}

inline Json scene_to_json(const SceneRecord& s) {
  Json lines = Json::array();
  for (std::size_t i = 0; i < s.graph.size(); ++i) {
    Json pts = Json::array();
    for (const Vec2& p : s.graph.centerlines[i].control_points) pts.push_back(detail::point_json(p));
    Json line{{"control_points", std::move(pts)}};
    if (!s.graph.scores.empty()) line["score"] = s.graph.scores[i];
    lines.push_back(std::move(line));
  }
  Json edges = Json::array();
  for (const auto& [i, j] : connected_pairs(s.graph)) {
    const auto it = s.graph.edge_scores.find({i, j});
    if (it == s.graph.edge_scores.end()) {
      edges.push_back(Json::array({i, j}));
    } else {
      edges.push_back(Json::array({i, j, it->second}));
    }
  }
  Json objects = Json::array();
  for (const auto& b : s.objects) objects.push_back(box_to_json(b));

  Json out{{"id", s.id},
           {"traffic_side", s.traffic_side == TrafficSide::kLeft ? "left" : "right"},
           {"camera", camera_to_json(s.camera)},
           {"roi", roi_to_json(s.roi)},
           {"centerlines", std::move(lines)},
           {"edges", std::move(edges)},
           {"objects", std::move(objects)}};
  if (!s.diagnostics.empty()) out["diagnostics"] = s.diagnostics;
  return out;
}

inline SceneRecord scene_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("scene: expected an object");
  SceneRecord s;
  s.id = detail::field<std::string>(j, "id", "scene");
  const std::string where = "scene \"" + s.id + "\"";
  const std::string side = j.value("traffic_side", std::string("right"));
  if (side != "left" && side != "right") throw ValidationError(where + ": traffic_side must be left or right");
  s.traffic_side = side == "left" ? TrafficSide::kLeft : TrafficSide::kRight;
  if (j.contains("camera")) s.camera = camera_from_json(j["camera"]);
  if (j.contains("roi")) s.roi = roi_from_json(j["roi"]);

  const Json& lines = detail::require_array(j, "centerlines", where);
  std::vector<BezierCurve> curves;
  std::vector<double> scores;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const std::string lw = where + " centerline " + std::to_string(i);
    const Json& cps = detail::require_array(lines[i], "control_points", lw);
    BezierCurve c;
    for (const Json& p : cps) c.control_points.push_back(detail::point_from_json(p, lw));
    curves.push_back(std::move(c));
    if (lines[i].contains("score")) scores.push_back(detail::field<double>(lines[i], "score", lw));
  }
  if (!scores.empty() && scores.size() != curves.size()) {
    throw ValidationError(where + ": either every centerline has a score or none does");
  }
  s.graph = make_graph(std::move(curves));
  s.graph.scores = std::move(scores);

  if (j.contains("edges")) {
    for (const Json& e : detail::require_array(j, "edges", where)) {
      if (!e.is_array() || (e.size() != 2 && e.size() != 3) || !e[0].is_number_unsigned() ||
          !e[1].is_number_unsigned()) {
        throw ValidationError(where + ": edges are [from, to] or [from, to, probability]");
      }
      const auto a = e[0].get<std::size_t>(), b = e[1].get<std::size_t>();
      if (a >= s.graph.size() || b >= s.graph.size()) {
        throw ValidationError(where + ": edge [" + std::to_string(a) + ", " + std::to_string(b) +
                              "] refers to a missing centerline");
      }
      s.graph.connect(a, b);
      if (e.size() == 3) s.graph.edge_scores[{a, b}] = e[2].get<double>();
    }
  }
  if (j.contains("objects")) {
    const Json& objs = detail::require_array(j, "objects", where);
    for (std::size_t k = 0; k < objs.size(); ++k) {
      s.objects.push_back(box_from_json(objs[k], where + " object " + std::to_string(k)));
    }
  }
  if (j.contains("diagnostics")) s.diagnostics = detail::field<std::vector<std::string>>(j, "diagnostics", where);
  return s;
}

inline Json scenes_to_json(const std::vector<SceneRecord>& scenes) {
  Json arr = Json::array();
  for (const auto& s : scenes) arr.push_back(scene_to_json(s));
  return Json{{"format", kSceneFormat}, {"version", kFormatVersion}, {"scenes", std::move(arr)}};
}

inline std::vector<SceneRecord> scenes_from_json(const Json& j) {
  if (!j.is_object() || j.value("format", std::string()) != kSceneFormat) {
    throw ValidationError(std::string("not a scene set (expected format \"") + kSceneFormat + "\")");
  }
  if (j.value("version", 0) != kFormatVersion) {
    throw ValidationError("unsupported scene format version " + j.value("version", Json()).dump());
  }
  std::vector<SceneRecord> out;
  for (const Json& s : detail::require_array(j, "scenes", "scene set")) out.push_back(scene_from_json(s));
  return out;
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(path + ": " + e.what());
  }
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path);
  out << text;
  out.flush();
  if (!out) throw IoError("write failed for " + path);
}

inline void write_json_file(const std::string& path, const Json& j) { write_text_file(path, j.dump(2) + "\n"); }

inline std::vector<SceneRecord> read_scenes(const std::string& path) { return scenes_from_json(read_json_file(path)); }

inline void write_scenes(const std::string& path, const std::vector<SceneRecord>& scenes) {
  write_json_file(path, scenes_to_json(scenes));
}

}  // namespace lanegraph

#endif  // LANEGRAPH_HARNESS_SCENE_HPP_
