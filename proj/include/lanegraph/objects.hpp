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

#ifndef LANEGRAPH_OBJECTS_HPP_
#define LANEGRAPH_OBJECTS_HPP_

/**
 * @file
 * @brief Oriented BEV object boxes.
 *
 * A box is five numbers (center x/z, long side, short side, heading) plus a
 * class distribution over C object classes and a trailing "no detection"
 * class. The heading is the direction of the long side and is folded into
 * [0, pi), since a box and its 180 degree flip are the same rectangle.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lanegraph/error.hpp"
#include "lanegraph/vec2.hpp"

namespace lanegraph {

inline constexpr std::array<std::string_view, 6> kObjectClassNames = {
    "car", "truck", "bus", "pedestrian", "bike", "motorcycle"};
inline constexpr std::size_t kNumObjectClasses = kObjectClassNames.size();
/// C object channels + 1 "no detection" channel.
inline constexpr std::size_t kNumObjectChannels = kNumObjectClasses + 1;

struct OrientedBox {
  Vec2 center;
  double long_side = 0.0;
  double short_side = 0.0;
  double heading = 0.0;
  std::vector<double> class_probs;

  friend bool operator==(const OrientedBox&, const OrientedBox&) = default;
};

using Corners = std::array<Vec2, 4>;

inline double canonical_heading(double a) {
  double r = std::fmod(a, std::numbers::pi);
  if (r < 0.0) r += std::numbers::pi;
  if (r >= std::numbers::pi) r = 0.0;
  return r;
}

inline std::vector<double> one_hot(std::size_t label, std::size_t channels = kNumObjectChannels) {
  if (label >= channels) throw DomainError("class label " + std::to_string(label) + " out of range");
  std::vector<double> v(channels, 0.0);
  v[label] = 1.0;
  return v;
}

inline OrientedBox make_box(Vec2 center, double long_side, double short_side, double heading,
                            std::size_t label, std::size_t channels = kNumObjectChannels) {
  return {center, long_side, short_side, canonical_heading(heading), one_hot(label, channels)};
}

/// Most likely channel; ties resolve to the lowest index.
inline std::size_t box_class(const OrientedBox& box) {
  if (box.class_probs.empty()) throw DomainError("box has no class distribution");
  return static_cast<std::size_t>(
      std::max_element(box.class_probs.begin(), box.class_probs.end()) - box.class_probs.begin());
}

/// Violated OrientedBox invariants, empty when the box is valid.
inline std::vector<std::string> box_diagnostics(const OrientedBox& box) {
  std::vector<std::string> out;
  if (!(box.short_side > 0.0)) out.emplace_back("short side must be positive");
  if (!(box.long_side >= box.short_side)) out.emplace_back("long side shorter than short side");
  if (!(box.heading >= 0.0 && box.heading < std::numbers::pi)) out.emplace_back("heading outside [0, pi)");
  double sum = 0.0;
  for (double p : box.class_probs) {
    if (!(p >= 0.0 && p <= 1.0)) out.emplace_back("class probability outside [0, 1]");
    sum += p;
  }
  if (box.class_probs.empty() || std::abs(sum - 1.0) > 1e-6) {
    out.emplace_back("class distribution does not sum to 1");
  }
  return out;
}

inline double box_area(const OrientedBox& box) { return box.long_side * box.short_side; }

/// Counter-clockwise corners starting at (-long/2, -short/2) in the box frame.
inline Corners box_to_corners(const OrientedBox& box) {
  const Vec2 u{std::cos(box.heading), std::sin(box.heading)};
  const Vec2 v{-u.y, u.x};
  const Vec2 hu = u * (0.5 * box.long_side);
  const Vec2 hv = v * (0.5 * box.short_side);
  return {box.center - hu - hv, box.center + hu - hv, box.center + hu + hv, box.center - hu + hv};
}

inline double polygon_area(std::span<const Vec2> poly) {
  double twice = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    twice += cross(poly[i], poly[(i + 1) % poly.size()]);
  }
  return 0.5 * twice;
}

struct BoxFromCorners {
  OrientedBox box;  // geometry only; class_probs left empty
  std::optional<std::string> diagnostic;
};

/// Tolerance on the cosine between adjacent edges and on the relative
/// length mismatch of opposite edges.
inline constexpr double kRectangleTolerance = 1e-3;

/**
 * @brief Recovers center, sides and heading from four corners listed in
 * cyclic order (either orientation, any starting corner).
 *
 * Squares fold their heading into [0, pi/2) because every quarter turn gives
 * the same square. Corners that are not a rectangle within
 * kRectangleTolerance still produce a best-effort box plus a diagnostic.
 */
inline BoxFromCorners corners_to_box(const Corners& c) {
  const double area = std::abs(polygon_area(c));
  const Vec2 e0 = c[1] - c[0], e1 = c[2] - c[1], e2 = c[3] - c[2], e3 = c[0] - c[3];
  const double scale = std::max({norm(e0), norm(e1), norm(e2), norm(e3)});
  if (scale == 0.0 || area <= 1e-12 * scale * scale) {
    throw DomainError("corners_to_box: degenerate (zero-area) corner set");
  }

  BoxFromCorners out;
  out.box.center = (c[0] + c[1] + c[2] + c[3]) * 0.25;
  const double len_a = 0.5 * (norm(e0) + norm(e2));
  const double len_b = 0.5 * (norm(e1) + norm(e3));
  const Vec2 dir = len_a >= len_b ? e0 - e2 : e1 - e3;
  out.box.long_side = std::max(len_a, len_b);
  out.box.short_side = std::min(len_a, len_b);
  double heading = canonical_heading(std::atan2(dir.y, dir.x));
  if (len_a - len_b == 0.0 || std::abs(len_a - len_b) <= 1e-12 * scale) {
    heading = std::fmod(heading, 0.5 * std::numbers::pi);
  }
  out.box.heading = heading;

  double worst = 0.0;
  const std::array<Vec2, 4> edges{e0, e1, e2, e3};
  for (std::size_t k = 0; k < 4; ++k) {
    const Vec2& a = edges[k];
    const Vec2& b = edges[(k + 1) % 4];
    worst = std::max(worst, std::abs(dot(a, b)) / (norm(a) * norm(b)));
  }
  worst = std::max(worst, std::abs(norm(e0) - norm(e2)) / len_a);
  worst = std::max(worst, std::abs(norm(e1) - norm(e3)) / len_b);
  if (worst > kRectangleTolerance) {
    out.diagnostic = "corners deviate from a rectangle by " + std::to_string(worst);
  }
  return out;
}

namespace detail {

// Sutherland-Hodgman: clip a convex polygon by the half-plane left of a->b.
inline std::vector<Vec2> clip_half_plane(const std::vector<Vec2>& poly, const Vec2& a, const Vec2& b) {
  std::vector<Vec2> out;
  if (poly.empty()) return out;
  const Vec2 edge = b - a;
  auto side = [&](const Vec2& p) { return cross(edge, p - a); };
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2& cur = poly[i];
    const Vec2& nxt = poly[(i + 1) % poly.size()];
    const double sc = side(cur), sn = side(nxt);
    if (sc >= 0.0) out.push_back(cur);
    if ((sc >= 0.0) != (sn >= 0.0)) {
      const double t = sc / (sc - sn);
      out.push_back(cur + (nxt - cur) * t);
    }
  }
  return out;
}

}  // namespace detail

/// Intersection polygon of two counter-clockwise convex polygons.
inline std::vector<Vec2> convex_intersection(std::span<const Vec2> subject, std::span<const Vec2> clip) {
  std::vector<Vec2> poly(subject.begin(), subject.end());
  for (std::size_t i = 0; i < clip.size() && !poly.empty(); ++i) {
    poly = detail::clip_half_plane(poly, clip[i], clip[(i + 1) % clip.size()]);
  }
  return poly;
}

inline double oriented_iou(const OrientedBox& a, const OrientedBox& b) {
  const Corners ca = box_to_corners(a);
  const Corners cb = box_to_corners(b);
  const double inter = std::max(0.0, polygon_area(convex_intersection(ca, cb)));
  const double uni = box_area(a) + box_area(b) - inter;
  if (uni <= 0.0) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

inline bool box_contains(const OrientedBox& box, const Vec2& p) {
  const Vec2 u{std::cos(box.heading), std::sin(box.heading)};
  const Vec2 v{-u.y, u.x};
  const Vec2 d = p - box.center;
  return std::abs(dot(d, u)) <= 0.5 * box.long_side && std::abs(dot(d, v)) <= 0.5 * box.short_side;
}

/// Default BEV grid: 49 m x 50 m at 0.25 m.
inline constexpr std::size_t kDefaultGridHeight = 196;
inline constexpr std::size_t kDefaultGridWidth = 200;

/**
 * H x W x channels grid over the normalized BEV square. Row h covers depth
 * [h/H, (h+1)/H), column w covers lateral [w/W, (w+1)/W).
 */
struct SemanticGrid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> values;

  SemanticGrid() = default;
  SemanticGrid(std::size_t h, std::size_t w, std::size_t c)
      : height(h), width(w), channels(c), values(h * w * c, 0.0) {}

  double& at(std::size_t h, std::size_t w, std::size_t c) { return values[(h * width + w) * channels + c]; }
  double at(std::size_t h, std::size_t w, std::size_t c) const {
    return values[(h * width + w) * channels + c];
  }

  friend bool operator==(const SemanticGrid&, const SemanticGrid&) = default;
};

struct ClassGrid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::vector<std::size_t> labels;

  ClassGrid() = default;
  ClassGrid(std::size_t h, std::size_t w, std::size_t fill = 0)
      : height(h), width(w), labels(h * w, fill) {}

  std::size_t& at(std::size_t h, std::size_t w) { return labels[h * width + w]; }
  std::size_t at(std::size_t h, std::size_t w) const { return labels[h * width + w]; }

  friend bool operator==(const ClassGrid&, const ClassGrid&) = default;
};

inline Vec2 cell_center(std::size_t h, std::size_t w, std::size_t height, std::size_t width) {
  return {(static_cast<double>(w) + 0.5) / static_cast<double>(width),
          (static_cast<double>(h) + 0.5) / static_cast<double>(height)};
}

/**
 * @brief Sums each box's class distribution into the cells whose centers it
 * covers, then clamps every channel to [0, 1].
 */
inline SemanticGrid rasterize_instances(std::span<const OrientedBox> boxes,
                                        std::size_t height = kDefaultGridHeight,
                                        std::size_t width = kDefaultGridWidth,
                                        std::size_t channels = kNumObjectChannels) {
  SemanticGrid grid(height, width, channels);
  for (const OrientedBox& box : boxes) {
    if (box.class_probs.size() != channels) {
      throw DomainError("box class distribution has " + std::to_string(box.class_probs.size()) +
                        " channels, grid has " + std::to_string(channels));
    }
    double lo_x = INFINITY, hi_x = -INFINITY, lo_z = INFINITY, hi_z = -INFINITY;
    for (const Vec2& c : box_to_corners(box)) {
      lo_x = std::min(lo_x, c.x);
      hi_x = std::max(hi_x, c.x);
      lo_z = std::min(lo_z, c.y);
      hi_z = std::max(hi_z, c.y);
    }
    auto clamp_index = [](double v, std::size_t n) {
      return static_cast<std::size_t>(std::clamp(v, 0.0, static_cast<double>(n)));
    };
    const std::size_t w0 = clamp_index(std::floor(lo_x * width), width);
    const std::size_t w1 = clamp_index(std::ceil(hi_x * width) + 1, width);
    const std::size_t h0 = clamp_index(std::floor(lo_z * height), height);
    const std::size_t h1 = clamp_index(std::ceil(hi_z * height) + 1, height);
    for (std::size_t h = h0; h < h1; ++h) {
      for (std::size_t w = w0; w < w1; ++w) {
        if (!box_contains(box, cell_center(h, w, height, width))) continue;
        for (std::size_t c = 0; c < channels; ++c) grid.at(h, w, c) += box.class_probs[c];
      }
    }
  }
  for (double& v : grid.values) v = std::clamp(v, 0.0, 1.0);
  return grid;
}

/// Per-cell argmax. All-zero cells map to the last ("no detection")
/// channel, which doubles as background.
inline ClassGrid grid_argmax(const SemanticGrid& grid) {
  if (grid.channels == 0) throw DomainError("grid_argmax: grid has no channels");
  const std::size_t background = grid.channels - 1;
  ClassGrid out(grid.height, grid.width, background);
  for (std::size_t h = 0; h < grid.height; ++h) {
    for (std::size_t w = 0; w < grid.width; ++w) {
      std::size_t best = background;
      double best_value = 0.0;
      for (std::size_t c = 0; c < grid.channels; ++c) {
        if (grid.at(h, w, c) > best_value) {
          best_value = grid.at(h, w, c);
          best = c;
        }
      }
      out.at(h, w) = best;
    }
  }
  return out;
}

}  // namespace lanegraph

#endif  // LANEGRAPH_OBJECTS_HPP_
