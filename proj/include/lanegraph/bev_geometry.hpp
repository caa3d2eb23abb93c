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

#ifndef LANEGRAPH_BEV_GEOMETRY_HPP_
#define LANEGRAPH_BEV_GEOMETRY_HPP_

/**
 * @file
 * @brief Flat-ground camera geometry and the BEV region of interest.
 *
 * Pixels are (row m, column n). With focal length f, principal point
 * (d_x, d_y) and camera height C_h, a pixel below the horizon row d_y sees
 * the ground at depth z = f C_h / (m - d_y) and lateral offset
 * x = (n - d_x) z / f. The ROI maps metric (x, z) affinely onto the
 * normalized square [0, 1]^2 in which curves and boxes live.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numbers>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lanegraph/curve.hpp"
#include "lanegraph/error.hpp"
#include "lanegraph/lane_graph.hpp"
#include "lanegraph/objects.hpp"
#include "lanegraph/vec2.hpp"

namespace lanegraph {

struct CameraModel {
  double focal = 633.0;      // pixels
  double center_col = 400.0;  // d_x
  double center_row = 224.0;  // d_y, the horizon row
  double height = 1.5;       // C_h, meters above ground
  int image_width = 800;
  int image_height = 448;

  friend bool operator==(const CameraModel&, const CameraModel&) = default;
};

inline std::vector<std::string> camera_diagnostics(const CameraModel& cam) {
  std::vector<std::string> out;
  if (!(cam.focal > 0.0)) out.emplace_back("focal length must be positive");
  if (!(cam.height > 0.0)) out.emplace_back("camera height must be positive");
  if (cam.image_width <= 0 || cam.image_height <= 0) out.emplace_back("image size must be positive");
  if (!(cam.center_col >= 0.0 && cam.center_col <= cam.image_width && cam.center_row >= 0.0 &&
        cam.center_row <= cam.image_height)) {
    out.emplace_back("principal point outside the image");
  }
  return out;
}

struct RoiSpec {
  double x_min = -25.0;
  double x_max = 25.0;
  double z_min = 1.0;
  double z_max = 50.0;
  double resolution = 0.25;

  double width() const { return x_max - x_min; }
  double depth() const { return z_max - z_min; }

  friend bool operator==(const RoiSpec&, const RoiSpec&) = default;
};

namespace detail {

inline std::size_t cells_along(double extent, double resolution) {
  const double cells = extent / resolution;
  const double rounded = std::round(cells);
  if (!(resolution > 0.0) || !(extent > 0.0) || std::abs(cells - rounded) > 1e-9 * std::max(1.0, cells)) {
    throw DomainError("ROI extent " + std::to_string(extent) + " is not a whole number of " +
                      std::to_string(resolution) + " m cells");
  }
  return static_cast<std::size_t>(rounded);
}

}  // namespace detail

inline std::size_t grid_width(const RoiSpec& roi) { return detail::cells_along(roi.width(), roi.resolution); }
inline std::size_t grid_height(const RoiSpec& roi) { return detail::cells_along(roi.depth(), roi.resolution); }

inline std::vector<std::string> roi_diagnostics(const RoiSpec& roi) {
  std::vector<std::string> out;
  try {
    (void)grid_width(roi);
    (void)grid_height(roi);
  } catch (const DomainError& e) {
    out.emplace_back(e.what());
  }
  return out;
}

struct AugmentationParams {
  double beta = 0.0;  // ego displacement along depth, meters
};

struct Pixel {
  double row = 0.0;  // m
  double col = 0.0;  // n

  friend bool operator==(const Pixel&, const Pixel&) = default;
};

inline Vec2 pixel_to_ground(const Pixel& px, const CameraModel& cam) {
  const double below = px.row - cam.center_row;
  if (!(below > 0.0)) {
    throw UndefinedGroundError("pixel row " + std::to_string(px.row) +
                               " is at or above the horizon row " + std::to_string(cam.center_row));
  }
  const double z = cam.focal * cam.height / below;
  return {(px.col - cam.center_col) * z / cam.focal, z};
}

inline Pixel ground_to_pixel(const Vec2& ground, const CameraModel& cam) {
  if (!(ground.y > 0.0)) {
    throw DomainError("ground point at depth " + std::to_string(ground.y) + " is behind the camera");
  }
  return {cam.center_row + cam.focal * cam.height / ground.y,
          cam.center_col + ground.x * cam.focal / ground.y};
}

inline bool in_roi(const Vec2& p, const RoiSpec& roi) {
  return p.x >= roi.x_min && p.x <= roi.x_max && p.y >= roi.z_min && p.y <= roi.z_max;
}

/// Metric (x, z) to [0, 1]^2; (x_min, z_min) maps to the origin.
inline Vec2 bev_normalize(const Vec2& p, const RoiSpec& roi) {
  if (!in_roi(p, roi)) {
    throw OutOfRoiError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                        ") outside the ROI");
  }
  return {(p.x - roi.x_min) / roi.width(), (p.y - roi.z_min) / roi.depth()};
}

inline Vec2 bev_denormalize(const Vec2& p, const RoiSpec& roi) {
  return {roi.x_min + p.x * roi.width(), roi.z_min + p.y * roi.depth()};
}

/// Points every `spacing` of arc length from the start; the final vertex is
/// appended when the last step falls short of it.
inline Polyline resample_polyline(std::span<const Vec2> points, double spacing) {
  if (points.size() < 2) throw DomainError("resample_polyline: need at least 2 points");
  if (!(spacing > 0.0)) throw DomainError("resample_polyline: spacing must be positive");
  std::vector<double> cum(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) cum[i] = cum[i - 1] + distance(points[i - 1], points[i]);
  const double total = cum.back();

  Polyline out;
  std::size_t seg = 0;
  for (std::size_t k = 0;; ++k) {
    const double s = static_cast<double>(k) * spacing;
    if (s > total) break;
    while (seg + 2 < points.size() && cum[seg + 1] < s) ++seg;
    const double len = cum[seg + 1] - cum[seg];
    const double a = len > 0.0 ? std::clamp((s - cum[seg]) / len, 0.0, 1.0) : 0.0;
    out.push_back(points[seg] + (points[seg + 1] - points[seg]) * a);
  }
  if (total - static_cast<double>(out.size() - 1) * spacing > 1e-9 * spacing) out.push_back(points.back());
  return out;
}

/// A clipped piece of a metric polyline: normalized points plus whether the
/// piece still begins/ends at the original endpoints.
struct ClippedSegment {
  Polyline points;
  bool keeps_start = false;
  bool keeps_end = false;
};

inline std::vector<ClippedSegment> clip_resample_detailed(std::span<const Vec2> points, const RoiSpec& roi) {
  const Polyline dense = resample_polyline(points, roi.resolution);
  std::vector<ClippedSegment> out;
  ClippedSegment cur;
  for (std::size_t i = 0; i <= dense.size(); ++i) {
    const bool inside = i < dense.size() && in_roi(dense[i], roi);
    if (inside) {
      if (cur.points.empty()) cur.keeps_start = i == 0;
      cur.points.push_back(bev_normalize(dense[i], roi));
      cur.keeps_end = i + 1 == dense.size();
      continue;
    }
    // A lone in-ROI sample carries no direction and is dropped.
    if (cur.points.size() >= 2) out.push_back(std::move(cur));
    cur = ClippedSegment{};
  }
  return out;
}

/// Resamples at the ROI resolution, drops out-of-ROI points and returns each
/// maximal in-ROI run as its own normalized polyline.
inline std::vector<Polyline> clip_resample(std::span<const Vec2> points, const RoiSpec& roi) {
  std::vector<Polyline> out;
  for (auto& seg : clip_resample_detailed(points, roi)) out.push_back(std::move(seg.points));
  return out;
}

/**
 * @brief Source pixel for an image taken after the ego vehicle advanced
 * `beta` meters.
 *
 * The ground point seen at (m1, n1) after the move lies at depth z1; before
 * the move it was at z1 + beta with the same lateral offset. Its original
 * projection is
 *   m0 = (m1 - d_y) f C / (f C + beta (m1 - d_y)) + d_y
 *   n0 = (n1 - d_x) f C / (f C + beta (m1 - d_y)) + d_x.
 */
inline Pixel depth_warp_source(const Pixel& px, double beta, const CameraModel& cam) {
  const double below = px.row - cam.center_row;
  if (!(below > 0.0)) {
    throw UndefinedGroundError("depth_warp_source: pixel row " + std::to_string(px.row) +
                               " is at or above the horizon");
  }
  if (beta == 0.0) return px;
  const double fc = cam.focal * cam.height;
  const double denom = fc + beta * below;
  if (!(denom > 1e-12 * fc)) {
    throw WarpSingularityError("depth_warp_source: ground point leaves the visible half-space "
                               "(denominator " + std::to_string(denom) + ")");
  }
  const double s = fc / denom;
  return {below * s + cam.center_row, (px.col - cam.center_col) * s + cam.center_col};
}

struct TranslatedLabels {
  LaneGraph graph;
  std::vector<OrientedBox> boxes;
};

namespace detail {

inline bool in_unit_square(const Vec2& p) { return p.x >= 0.0 && p.x <= 1.0 && p.y >= 0.0 && p.y <= 1.0; }

}  // namespace detail

/// Dense samples used when a translated curve has to be re-clipped.
inline constexpr std::size_t kReclipSamples = 100;

/**
 * @brief Moves normalized labels to match an ego advance of `beta` meters.
 *
 * Every depth coordinate drops by beta / (z_max - z_min). Boxes whose center
 * leaves the unit square are removed. Curves that stay inside are shifted
 * exactly; curves that cross the boundary are re-clipped and refit piecewise,
 * keeping an edge only where the corresponding endpoint survived, and the
 * junctions they take part in are re-snapped.
 */
inline TranslatedLabels translate_labels(const LaneGraph& graph, std::span<const OrientedBox> boxes,
                                         double beta, const RoiSpec& roi) {
  const double dz = beta / roi.depth();
  TranslatedLabels out;
  for (const OrientedBox& b : boxes) {
    OrientedBox moved = b;
    moved.center.y -= dz;
    if (detail::in_unit_square(moved.center)) out.boxes.push_back(std::move(moved));
  }

  struct Piece {
    std::size_t source;
    BezierCurve curve;
    bool keeps_start;
    bool keeps_end;
    bool refit;
  };
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    BezierCurve shifted = graph.centerlines[i];
    for (Vec2& p : shifted.control_points) p.y -= dz;
    const Polyline samples = sample_curve(shifted, kReclipSamples);
    if (std::all_of(samples.begin(), samples.end(), detail::in_unit_square)) {
      pieces.push_back({i, std::move(shifted), true, true, false});
      continue;
    }
    const int degree = static_cast<int>(shifted.degree());
    std::size_t k = 0;
    while (k < samples.size()) {
      if (!detail::in_unit_square(samples[k])) {
        ++k;
        continue;
      }
      const std::size_t begin = k;
      while (k < samples.size() && detail::in_unit_square(samples[k])) ++k;
      if (k - begin < static_cast<std::size_t>(degree) + 1) continue;
      const std::span<const Vec2> run(samples.data() + begin, k - begin);
      pieces.push_back({i, fit_bezier(run, degree), begin == 0, k == samples.size(), true});
    }
  }

  out.graph.incidence = IncidenceMatrix(pieces.size());
  std::vector<bool> refit(pieces.size());
  for (std::size_t a = 0; a < pieces.size(); ++a) {
    out.graph.centerlines.push_back(pieces[a].curve);
    if (!graph.scores.empty()) out.graph.scores.push_back(graph.scores[pieces[a].source]);
    refit[a] = pieces[a].refit;
  }
  for (std::size_t a = 0; a < pieces.size(); ++a) {
    if (!pieces[a].keeps_end) continue;
    for (std::size_t b = 0; b < pieces.size(); ++b) {
      if (!pieces[b].keeps_start || pieces[a].source == pieces[b].source) continue;
      const EdgeKey key{pieces[a].source, pieces[b].source};
      if (!graph.incidence(key.first, key.second)) continue;
      out.graph.incidence.set(a, b);
      if (auto it = graph.edge_scores.find(key); it != graph.edge_scores.end()) {
        out.graph.edge_scores[{a, b}] = it->second;
      }
    }
  }
  for (const Junction& j : find_junctions(out.graph)) {
    const bool touched = std::any_of(j.members.begin(), j.members.end(),
                                     [&](const JunctionMember& m) { return refit[m.centerline]; });
    if (!touched) continue;
    for (const auto& m : j.members) detail::endpoint(out.graph, m) = j.location;
  }
  return out;
}

/// h x w x channels feature-aligned grid.
struct FeatureGrid {
  std::size_t height = 0;
  std::size_t width = 0;
  std::size_t channels = 0;
  std::vector<double> values;

  FeatureGrid(std::size_t h, std::size_t w, std::size_t c) : height(h), width(w), channels(c), values(h * w * c, 0.0) {}

  double& at(std::size_t r, std::size_t c, std::size_t k) { return values[(r * width + c) * channels + k]; }
  double at(std::size_t r, std::size_t c, std::size_t k) const { return values[(r * width + c) * channels + k]; }

  friend bool operator==(const FeatureGrid&, const FeatureGrid&) = default;
};

/// Feature rows this close to the horizon get no BEV encoding.
inline constexpr double kHorizonGuardRows = 2.0;
inline constexpr double kEncodingTemperature = 10000.0;

namespace detail {

// Writes `count` sinusoid channels starting at `offset`: the first
// ceil(count/2) encode `a`, the rest encode `b`. Within a block, channel q
// uses frequency T^(-2 floor(q/2) / block), sin on even q and cos on odd q.
inline void encode_pair(FeatureGrid& grid, std::size_t r, std::size_t c, std::size_t offset,
                        std::size_t count, double a, double b) {
  const std::size_t first = (count + 1) / 2;
  auto block = [&](std::size_t start, std::size_t size, double value) {
    for (std::size_t q = 0; q < size; ++q) {
      const double freq = std::pow(kEncodingTemperature, 2.0 * static_cast<double>(q / 2) / static_cast<double>(size));
      const double arg = value / freq;
      grid.at(r, c, start + q) = (q % 2 == 0) ? std::sin(arg) : std::cos(arg);
    }
  };
  block(offset, first, a);
  block(offset + first, count - first, b);
}

}  // namespace detail

/**
 * @brief Split positional encoding over a feat_h x feat_w feature map.
 *
 * Channels [0, channels/2) hold the image-plane encoding: the cumulative
 * row and column counts, normalized to (0, 2 pi]. Channels [channels/2,
 * channels) hold the BEV encoding of each cell's flat-ground point: lateral
 * offset mapped through sign(x) log(1 + |x|) and depth through log(z), summed
 * cumulatively down the rows (depth) and across the columns (lateral),
 * min-max normalized to [0, 2 pi] over the valid region and encoded the same
 * way. Cells at or above the horizon, and within kHorizonGuardRows feature
 * rows below it, carry zeros in the BEV half.
 */
inline FeatureGrid split_positional_encoding(std::size_t feat_h, std::size_t feat_w, std::size_t channels,
                                             const CameraModel& cam) {
  if (channels % 2 != 0) throw DomainError("split_positional_encoding: channel count must be even");
  if (feat_h == 0 || feat_w == 0) throw DomainError("split_positional_encoding: empty feature map");
  FeatureGrid grid(feat_h, feat_w, channels);
  const std::size_t half = channels / 2;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;

  for (std::size_t r = 0; r < feat_h; ++r) {
    for (std::size_t c = 0; c < feat_w; ++c) {
      detail::encode_pair(grid, r, c, 0, half, kTwoPi * static_cast<double>(r + 1) / static_cast<double>(feat_h),
                          kTwoPi * static_cast<double>(c + 1) / static_cast<double>(feat_w));
    }
  }

  const double row_px = static_cast<double>(cam.image_height) / static_cast<double>(feat_h);
  const double col_px = static_cast<double>(cam.image_width) / static_cast<double>(feat_w);
  std::vector<bool> valid(feat_h, false);
  for (std::size_t r = 0; r < feat_h; ++r) {
    const double m = (static_cast<double>(r) + 0.5) * row_px;
    valid[r] = m - cam.center_row > kHorizonGuardRows * row_px;
  }
  std::vector<double> lx(feat_h * feat_w, 0.0), lz(feat_h * feat_w, 0.0);
  for (std::size_t r = 0; r < feat_h; ++r) {
    if (!valid[r]) continue;
    for (std::size_t c = 0; c < feat_w; ++c) {
      const Pixel px{(static_cast<double>(r) + 0.5) * row_px, (static_cast<double>(c) + 0.5) * col_px};
      const Vec2 g = pixel_to_ground(px, cam);
      lx[r * feat_w + c] = std::copysign(std::log1p(std::abs(g.x)), g.x);
      lz[r * feat_w + c] = std::log(g.y);
    }
  }
  std::vector<double> cx(feat_h * feat_w, 0.0), cz(feat_h * feat_w, 0.0);
  for (std::size_t c = 0; c < feat_w; ++c) {
    double acc = 0.0;
    for (std::size_t r = 0; r < feat_h; ++r) {
      if (!valid[r]) continue;
      acc += lz[r * feat_w + c];
      cz[r * feat_w + c] = acc;
    }
  }
  for (std::size_t r = 0; r < feat_h; ++r) {
    if (!valid[r]) continue;
    double acc = 0.0;
    for (std::size_t c = 0; c < feat_w; ++c) {
      acc += lx[r * feat_w + c];
      cx[r * feat_w + c] = acc;
    }
  }
  auto range_of = [&](const std::vector<double>& v) {
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t r = 0; r < feat_h; ++r) {
      if (!valid[r]) continue;
      for (std::size_t c = 0; c < feat_w; ++c) {
        lo = std::min(lo, v[r * feat_w + c]);
        hi = std::max(hi, v[r * feat_w + c]);
      }
    }
    return std::pair{lo, hi};
  };
  const auto [xlo, xhi] = range_of(cx);
  const auto [zlo, zhi] = range_of(cz);
  auto normalized = [](double v, double lo, double hi) { return hi > lo ? (v - lo) / (hi - lo) : 0.0; };
  for (std::size_t r = 0; r < feat_h; ++r) {
    if (!valid[r]) continue;
    for (std::size_t c = 0; c < feat_w; ++c) {
      detail::encode_pair(grid, r, c, half, channels - half, kTwoPi * normalized(cz[r * feat_w + c], zlo, zhi),
                          kTwoPi * normalized(cx[r * feat_w + c], xlo, xhi));
    }
  }
  return grid;
}

}  // namespace lanegraph

#endif  // LANEGRAPH_BEV_GEOMETRY_HPP_
