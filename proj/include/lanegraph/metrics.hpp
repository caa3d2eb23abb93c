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

#ifndef LANEGRAPH_METRICS_HPP_
#define LANEGRAPH_METRICS_HPP_

/**
 * @file
 * @brief Lane-graph metrics (precision/recall over distance thresholds,
 * detection ratio, connectivity), object precision/recall over IOU
 * thresholds, and semantic-grid mIOU.
 *
 * All metrics are expressed as integer counts first so that scenes can be
 * reduced by summing counts before forming ratios. A ratio with a zero
 * denominator is 1 and flagged vacuous.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lanegraph/assignment.hpp"
#include "lanegraph/curve.hpp"
#include "lanegraph/error.hpp"
#include "lanegraph/lane_graph.hpp"
#include "lanegraph/objects.hpp"

namespace lanegraph {

/// Interpolated points per centerline for the lane precision/recall.
inline constexpr std::size_t kDefaultSamples = 100;

/// 0/0 is 1 by convention.
inline double safe_ratio(double num, double den) { return den == 0.0 ? 1.0 : num / den; }

struct PRPoint {
  double threshold = 0.0;
  std::size_t tp = 0;         // estimate points within the threshold
  std::size_t fp = 0;         // estimate points beyond it
  std::size_t fn = 0;         // target points beyond it
  std::size_t tp_target = 0;  // target points within it
  double precision = 1.0;
  double recall = 1.0;
  bool vacuous = false;  // no predictions and no ground truth counted

  // Recall is measured on the target side: for point sets the number of
  // estimate hits says nothing about how much of the target is covered.
  static PRPoint from_counts(double threshold, std::size_t tp, std::size_t fp, std::size_t fn,
                             std::size_t tp_target) {
    PRPoint p{threshold, tp, fp, fn, tp_target};
    p.precision = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fp));
    p.recall = safe_ratio(static_cast<double>(tp_target), static_cast<double>(tp_target + fn));
    p.vacuous = tp + fp + fn + tp_target == 0;
    return p;
  }

  // One-to-one matches, where both sides share the hit count.
  static PRPoint from_counts(double threshold, std::size_t tp, std::size_t fp, std::size_t fn) {
    return from_counts(threshold, tp, fp, fn, tp);
  }

  friend bool operator==(const PRPoint&, const PRPoint&) = default;
};

/// 0.01, 0.02, ..., 0.10 in normalized units (0.01 is 50 cm on the default
/// ROI).
inline std::vector<double> lane_thresholds() {
  std::vector<double> t;
  for (int k = 1; k <= 10; ++k) t.push_back(k / 100.0);
  return t;
}

/**
 * @brief Per-point distances that every lane threshold is applied to.
 *
 * `estimate` holds, for each interpolated point of each estimate, the
 * distance to the densely sampled target it is matched to (infinity when the
 * estimate is unmatched). `target` holds, for each interpolated point of each
 * target with at least one matched estimate, the distance to the nearest
 * interpolated point among those estimates. Targets nobody matched are not
 * represented: missed lines are the detection ratio's business.
 */
struct LaneDistances {
  std::vector<double> estimate;
  std::vector<double> target;
};

inline LaneDistances lane_distances(std::span<const BezierCurve> estimates,
                                    std::span<const BezierCurve> targets, const MatchMap& match,
                                    std::size_t samples = kDefaultSamples) {
  if (match.n_estimates() != estimates.size() || match.n_targets() != targets.size()) {
    throw DomainError("lane_distances: match map does not fit the curve sets");
  }
  std::vector<Polyline> est_pts, tgt_pts;
  for (const auto& c : estimates) est_pts.push_back(sample_curve(c, samples));
  for (const auto& c : targets) tgt_pts.push_back(sample_curve(c, samples));

  LaneDistances d;
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    const auto& m = match.target_of[i];
    for (const Vec2& p : est_pts[i]) {
      d.estimate.push_back(m ? min_distance(p, tgt_pts[*m]) : std::numeric_limits<double>::infinity());
    }
  }
  for (std::size_t n = 0; n < targets.size(); ++n) {
    const auto& members = match.estimates_of[n];
    if (members.empty()) continue;
    for (const Vec2& p : tgt_pts[n]) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i : members) best = std::min(best, min_distance(p, est_pts[i]));
      d.target.push_back(best);
    }
  }
  return d;
}

inline PRPoint pr_at(const LaneDistances& d, double threshold) {
  auto within = [threshold](double v) { return v <= threshold; };
  const auto tp = static_cast<std::size_t>(std::count_if(d.estimate.begin(), d.estimate.end(), within));
  const auto hit = static_cast<std::size_t>(std::count_if(d.target.begin(), d.target.end(), within));
  return PRPoint::from_counts(threshold, tp, d.estimate.size() - tp, d.target.size() - hit, hit);
}

inline PRPoint lane_pr(const LaneGraph& estimates, const LaneGraph& targets, const MatchMap& match,
                       double threshold, std::size_t samples = kDefaultSamples) {
  return pr_at(lane_distances(estimates.centerlines, targets.centerlines, match, samples), threshold);
}

struct LanePRCurve {
  std::vector<PRPoint> points;
  double m_pre = 1.0;
  double m_rec = 1.0;
  bool vacuous = false;

  friend bool operator==(const LanePRCurve&, const LanePRCurve&) = default;
};

/// Curve from per-threshold points; the means are over the points.
inline LanePRCurve summarize_curve(std::vector<PRPoint> points) {
  LanePRCurve c;
  c.points = std::move(points);
  if (c.points.empty()) return c;
  double sp = 0.0, sr = 0.0;
  c.vacuous = true;
  for (const auto& p : c.points) {
    sp += p.precision;
    sr += p.recall;
    c.vacuous = c.vacuous && p.vacuous;
  }
  c.m_pre = sp / static_cast<double>(c.points.size());
  c.m_rec = sr / static_cast<double>(c.points.size());
  return c;
}

inline LanePRCurve lane_pr_curve(const LaneGraph& estimates, const LaneGraph& targets,
                                 const MatchMap& match, std::size_t samples = kDefaultSamples) {
  const LaneDistances d = lane_distances(estimates.centerlines, targets.centerlines, match, samples);
  std::vector<PRPoint> pts;
  for (double t : lane_thresholds()) pts.push_back(pr_at(d, t));
  return summarize_curve(std::move(pts));
}

inline LanePRCurve lane_pr_curve(const LaneGraph& estimates, const LaneGraph& targets,
                                 std::size_t samples = kDefaultSamples) {
  return lane_pr_curve(estimates, targets, match_min_l1(estimates.centerlines, targets.centerlines),
                       samples);
}

/// Unique targets with at least one matched estimate, over all targets.
inline std::size_t matched_target_count(const MatchMap& match) {
  return static_cast<std::size_t>(std::count_if(match.estimates_of.begin(), match.estimates_of.end(),
                                                [](const auto& s) { return !s.empty(); }));
}

inline double detection_ratio(const MatchMap& match, std::size_t n_targets) {
  if (match.n_targets() != n_targets) {
    throw DomainError("detection_ratio: match map covers " + std::to_string(match.n_targets()) +
                      " targets, expected " + std::to_string(n_targets));
  }
  return safe_ratio(static_cast<double>(matched_target_count(match)), static_cast<double>(n_targets));
}

struct ConnectivityResult {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  /// Positive entries of the target incidence matrix.
  std::size_t gt_positive = 0;
  double precision = 1.0;
  double recall = 1.0;
  double iou = 1.0;
  bool vacuous_precision = true;
  bool vacuous_recall = true;

  /// Precision over estimated edges, recall over target edges, IOU mixing
  /// both sides: TP / (TP + FP + FN).
  static ConnectivityResult from_counts(std::size_t tp, std::size_t fp, std::size_t fn,
                                        std::size_t gt_positive) {
    ConnectivityResult r{tp, fp, fn, gt_positive};
    r.precision = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fp));
    r.recall = safe_ratio(static_cast<double>(gt_positive - fn), static_cast<double>(gt_positive));
    r.iou = safe_ratio(static_cast<double>(tp), static_cast<double>(tp + fp + fn));
    r.vacuous_precision = tp + fp == 0;
    r.vacuous_recall = gt_positive == 0;
    return r;
  }

  friend bool operator==(const ConnectivityResult&, const ConnectivityResult&) = default;
};

/**
 * @brief Connectivity of an estimated incidence matrix against the target one.
 *
 * An estimated edge (i, j) is a true positive when both ends are matched and
 * either share a target or their targets are connected in the same
 * direction; otherwise it is a false positive (an unmatched end included).
 * A target edge (m, n) is a false negative when no estimated edge leads from
 * an estimate of m to an estimate of n. Diagonal entries are not edges and
 * are ignored on both sides.
 */
inline ConnectivityResult connectivity(const IncidenceMatrix& estimated, const IncidenceMatrix& target,
                                       const MatchMap& match) {
  if (!estimated.is_square() || !target.is_square() || estimated.rows() != match.n_estimates() ||
      target.rows() != match.n_targets()) {
    throw DomainError("connectivity: incidence shapes do not agree with the match map");
  }
  std::size_t tp = 0, fp = 0, fn = 0, gt_positive = 0;
  const std::size_t ne = estimated.rows();
  for (std::size_t i = 0; i < ne; ++i) {
    for (std::size_t j = 0; j < ne; ++j) {
      if (i == j || !estimated(i, j)) continue;
      const auto& mi = match.target_of[i];
      const auto& mj = match.target_of[j];
      if (mi && mj && (*mi == *mj || target(*mi, *mj))) {
        ++tp;
      } else {
        ++fp;
      }
    }
  }
  const std::size_t nt = target.rows();
  for (std::size_t m = 0; m < nt; ++m) {
    for (std::size_t n = 0; n < nt; ++n) {
      if (m == n || !target(m, n)) continue;
      ++gt_positive;
      bool found = false;
      for (std::size_t i : match.estimates_of[m]) {
        for (std::size_t j : match.estimates_of[n]) {
          if (i != j && estimated(i, j)) found = true;
        }
      }
      if (!found) ++fn;
    }
  }
  return ConnectivityResult::from_counts(tp, fp, fn, gt_positive);
}

/// 0.1, 0.2, ..., 0.9.
inline std::vector<double> object_iou_thresholds() {
  std::vector<double> t;
  for (int k = 1; k <= 9; ++k) t.push_back(k / 10.0);
  return t;
}

/// True when the box's most likely channel is a real class rather than
/// "no detection".
inline bool is_detection(const OrientedBox& box) {
  return box_class(box) + 1 < box.class_probs.size();
}

/// IOUs of the Hungarian (1 - IOU) pairs, matched within each class.
inline std::vector<double> matched_object_ious(std::span<const OrientedBox> estimates,
                                               std::span<const OrientedBox> targets) {
  std::map<std::size_t, std::vector<std::size_t>> est_by_class, tgt_by_class;
  for (std::size_t i = 0; i < estimates.size(); ++i) est_by_class[box_class(estimates[i])].push_back(i);
  for (std::size_t n = 0; n < targets.size(); ++n) tgt_by_class[box_class(targets[n])].push_back(n);

  std::vector<double> ious;
  for (const auto& [cls, est_idx] : est_by_class) {
    auto it = tgt_by_class.find(cls);
    if (it == tgt_by_class.end()) continue;
    const auto& tgt_idx = it->second;
    CostMatrix iou(static_cast<Eigen::Index>(est_idx.size()), static_cast<Eigen::Index>(tgt_idx.size()));
    for (std::size_t a = 0; a < est_idx.size(); ++a)
      for (std::size_t b = 0; b < tgt_idx.size(); ++b)
        iou(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) =
            oriented_iou(estimates[est_idx[a]], targets[tgt_idx[b]]);
    const CostMatrix cost = CostMatrix::Ones(iou.rows(), iou.cols()) - iou;
    for (const auto& [a, b] : hungarian(cost).pairs) {
      ious.push_back(iou(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)));
    }
  }
  return ious;
}

/**
 * @brief Object precision/recall per IOU threshold.
 *
 * Boxes whose most likely channel is "no detection" are not counted. A
 * matched pair with IOU >= threshold is a true positive; every other target
 * is a false negative and every other estimate a false positive.
 */
inline std::vector<PRPoint> object_pr(std::span<const OrientedBox> estimates,
                                      std::span<const OrientedBox> targets,
                                      std::span<const double> iou_thresholds) {
  std::vector<OrientedBox> est, tgt;
  std::copy_if(estimates.begin(), estimates.end(), std::back_inserter(est), is_detection);
  std::copy_if(targets.begin(), targets.end(), std::back_inserter(tgt), is_detection);
  const std::vector<double> ious = matched_object_ious(est, tgt);
  std::vector<PRPoint> curve;
  for (double t : iou_thresholds) {
    const auto tp = static_cast<std::size_t>(
        std::count_if(ious.begin(), ious.end(), [t](double v) { return v >= t; }));
    curve.push_back(PRPoint::from_counts(t, tp, est.size() - tp, tgt.size() - tp));
  }
  return curve;
}

struct MiouResult {
  std::vector<std::size_t> intersection;
  std::vector<std::size_t> uni;
  /// IOU per class; empty when the class appears in neither grid (or is
  /// ignored).
  std::vector<std::optional<double>> per_class;
  double mean = 1.0;
  bool vacuous = true;

  /// Builds per-class IOU and their mean from accumulated cell counts.
  static MiouResult from_counts(std::vector<std::size_t> inter, std::vector<std::size_t> uni,
                                std::optional<std::size_t> ignore = std::nullopt) {
    MiouResult r;
    r.intersection = std::move(inter);
    r.uni = std::move(uni);
    r.per_class.resize(r.uni.size());
    double sum = 0.0;
    std::size_t present = 0;
    for (std::size_t c = 0; c < r.uni.size(); ++c) {
      if (r.uni[c] == 0 || (ignore && *ignore == c)) continue;
      r.per_class[c] = static_cast<double>(r.intersection[c]) / static_cast<double>(r.uni[c]);
      sum += *r.per_class[c];
      ++present;
    }
    r.vacuous = present == 0;
    r.mean = present == 0 ? 1.0 : sum / static_cast<double>(present);
    return r;
  }

  friend bool operator==(const MiouResult&, const MiouResult&) = default;
};

/// Cell-count IOU per class. Classes absent from both grids (and `ignore`)
/// are left out of the mean.
inline MiouResult miou(const ClassGrid& pred, const ClassGrid& gt, std::size_t n_classes,
                       std::optional<std::size_t> ignore = std::nullopt) {
  if (pred.height != gt.height || pred.width != gt.width || pred.labels.size() != gt.labels.size()) {
    throw DomainError("miou: grid shapes differ");
  }
  std::vector<std::size_t> inter(n_classes, 0), uni(n_classes, 0);
  for (std::size_t k = 0; k < pred.labels.size(); ++k) {
    const std::size_t p = pred.labels[k], g = gt.labels[k];
    if (p >= n_classes || g >= n_classes) throw DomainError("miou: label outside class range");
    if (p == g) {
      ++inter[p];
      ++uni[p];
    } else {
      ++uni[p];
      ++uni[g];
    }
  }
  return MiouResult::from_counts(std::move(inter), std::move(uni), ignore);
}

}  // namespace lanegraph

#endif  // LANEGRAPH_METRICS_HPP_
