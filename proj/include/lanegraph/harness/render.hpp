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

#ifndef LANEGRAPH_HARNESS_RENDER_HPP_
#define LANEGRAPH_HARNESS_RENDER_HPP_

#include <cstdio>
#include <optional>
#include <string>

#include "lanegraph/harness/scene.hpp"

namespace lanegraph {

struct RenderStyle {
  double size = 600.0;  // pixels per normalized unit
  double margin = 20.0;
  const char* gt_color = "#1f4e9c";
  const char* pred_color = "#e07b00";
  const char* start_color = "#2ca02c";
  const char* end_color = "#d62728";
  const char* junction_color = "#e6b800";
};

namespace detail {

class SvgWriter {
 public:
  explicit SvgWriter(const RenderStyle& style) : style_(style) {}

  // Near range at the bottom, like a map seen from above the ego vehicle.
  std::string xy(const Vec2& p) const { return num(px(p.x)) + "," + num(py(p.y)); }
  double px(double x) const { return style_.margin + x * style_.size; }
  double py(double z) const { return style_.margin + (1.0 - z) * style_.size; }

  static std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v == 0.0 ? 0.0 : v);  // no "-0.000"
    return buf;
  }

  void line(const std::string& s) { out_ += s + "\n"; }
  std::string str() const { return out_; }

  void curve(const BezierCurve& c, const char* cls, const char* color) {
    std::string d = "M" + xy(c.front());
    const auto& p = c.control_points;
    if (p.size() == 2) {
      d += " L" + xy(p[1]);
    } else if (p.size() == 3) {
      d += " Q" + xy(p[1]) + " " + xy(p[2]);
    } else if (p.size() == 4) {
      d += " C" + xy(p[1]) + " " + xy(p[2]) + " " + xy(p[3]);
    } else {
      const Polyline pts = sample_curve(c, 64);
      for (std::size_t k = 1; k < pts.size(); ++k) d += " L" + xy(pts[k]);
    }
    line("<path class=\"" + std::string(cls) + "\" d=\"" + d + "\" fill=\"none\" stroke=\"" + color +
         "\" stroke-width=\"2\"/>");
  }

  void dot(const Vec2& p, const char* cls, const char* color, double r) {
    line("<circle class=\"" + std::string(cls) + "\" cx=\"" + num(px(p.x)) + "\" cy=\"" + num(py(p.y)) +
         "\" r=\"" + num(r) + "\" fill=\"" + color + "\"/>");
  }

  void graph(const LaneGraph& g, const char* cls, const char* color) {
    line("<g class=\"" + std::string(cls) + "\">");
    for (const auto& c : g.centerlines) curve(c, "centerline", color);
    for (const auto& [i, j] : connected_pairs(g)) {
      const Vec2 a = g.centerlines[i].back(), b = g.centerlines[j].front();
      line("<line class=\"edge\" x1=\"" + num(px(a.x)) + "\" y1=\"" + num(py(a.y)) + "\" x2=\"" + num(px(b.x)) +
           "\" y2=\"" + num(py(b.y)) + "\" stroke=\"" + style_.junction_color + "\" stroke-width=\"3\"/>");
    }
    for (const Junction& j : find_junctions(g)) {
      line("<circle class=\"junction\" cx=\"" + num(px(j.location.x)) + "\" cy=\"" + num(py(j.location.y)) +
           "\" r=\"6\" fill=\"none\" stroke=\"" + style_.junction_color + "\" stroke-width=\"2\"/>");
    }
    for (const auto& c : g.centerlines) {
      dot(c.front(), "start", style_.start_color, 3.0);
      dot(c.back(), "end", style_.end_color, 3.0);
    }
    line("</g>");
  }

  void boxes(const std::vector<OrientedBox>& bs, const char* cls, const char* color) {
    for (const auto& b : bs) {
      std::string pts;
      for (const Vec2& p : box_to_corners(b)) pts += (pts.empty() ? "" : " ") + xy(p);
      line("<polygon class=\"" + std::string(cls) + "\" points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1\"/>");
    }
  }

 private:
  const RenderStyle& style_;
  std::string out_;
};

}  // namespace detail

/**
 * @brief SVG drawing of a scene and optionally a prediction over it.
 *
 * Output depends only on the inputs, so repeated renders are byte-identical.
 */
inline std::string render_svg(const SceneRecord& scene, const std::optional<SceneRecord>& pred = std::nullopt,
                              const RenderStyle& style = {}) {
  detail::SvgWriter w(style);
  const std::string extent = detail::SvgWriter::num(style.size + 2.0 * style.margin);
  w.line("<?xml version=\"1.0\" encoding=\"UTF-8\"?>");
  w.line("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + extent + "\" height=\"" + extent +
         "\" viewBox=\"0 0 " + extent + " " + extent + "\">");
  std::string title = scene.id;
  for (const auto& [from, to] : {std::pair{'&', "&amp;"}, std::pair{'<', "&lt;"}, std::pair{'>', "&gt;"}}) {
    for (std::size_t k = title.find(from); k != std::string::npos; k = title.find(from, k + 1)) {
      title.replace(k, 1, to);
    }
  }
  w.line("<title>" + title + "</title>");
  w.line("<rect class=\"roi\" x=\"" + detail::SvgWriter::num(style.margin) + "\" y=\"" +
         detail::SvgWriter::num(style.margin) + "\" width=\"" + detail::SvgWriter::num(style.size) +
         "\" height=\"" + detail::SvgWriter::num(style.size) + "\" fill=\"white\" stroke=\"black\"/>");
  w.boxes(scene.objects, "box-gt", style.gt_color);
  if (pred) w.boxes(pred->objects, "box-pred", style.pred_color);
  w.graph(scene.graph, "gt", style.gt_color);
  if (pred) w.graph(pred->graph, "pred", style.pred_color);
  w.line("</svg>");
  return w.str();
}

inline void write_svg(const std::string& path, const SceneRecord& scene,
                      const std::optional<SceneRecord>& pred = std::nullopt) {
  write_text_file(path, render_svg(scene, pred));
}

}  // namespace lanegraph

#endif  // LANEGRAPH_HARNESS_RENDER_HPP_
