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

#include "lanegraph/metrics.hpp"

#include <random>

#include "gtest/gtest.h"

namespace lanegraph {
namespace {

BezierCurve Line(Vec2 a, Vec2 b) { return BezierCurve{{a, (a + b) * 0.5, b}}; }

BezierCurve Shifted(const BezierCurve& c, Vec2 d) {
  BezierCurve out = c;
  for (Vec2& p : out.control_points) p += d;
  return out;
}

LaneGraph Graph(std::vector<BezierCurve> curves, std::vector<EdgeKey> edges = {}) {
  LaneGraph g = make_graph(std::move(curves));
  for (const auto& [i, j] : edges) g.connect(i, j);
  return g;
}

MatchMap Match(std::vector<std::optional<std::size_t>> m, std::size_t n_targets) {
  return MatchMap::from_targets(std::move(m), n_targets);
}

TEST(LanePr, IdenticalIsPerfect) {
  const LaneGraph g = Graph({Line({0.2, 0.1}, {0.3, 0.6}), Line({0.7, 0.2}, {0.5, 0.9})});
  const MatchMap m = match_min_l1(g.centerlines, g.centerlines);
  for (double t : lane_thresholds()) {
    const PRPoint p = lane_pr(g, g, m, t);
    EXPECT_EQ(p.precision, 1.0);
    EXPECT_EQ(p.recall, 1.0);
    EXPECT_EQ(p.tp, 200u);
  }
}

TEST(LanePr, ConstantOffset) {
  const LaneGraph gt = Graph({Line({0.2, 0.5}, {0.8, 0.5})});
  const LaneGraph est = Graph({Shifted(gt.centerlines[0], {0.0, 0.05})});
  const MatchMap m = Match({0}, 1);
  PRPoint p = lane_pr(est, gt, m, 0.01);
  EXPECT_EQ(p.precision, 0.0);
  EXPECT_EQ(p.recall, 0.0);
  p = lane_pr(est, gt, m, 0.1);
  EXPECT_EQ(p.precision, 1.0);
  EXPECT_EQ(p.recall, 1.0);
}

TEST(LanePr, ShortEstimateCreatesFalseNegatives) {
  const LaneGraph gt = Graph({Line({0.2, 0.5}, {0.8, 0.5})});
  const LaneGraph est = Graph({Line({0.2, 0.5}, {0.5, 0.5})});
  const PRPoint p = lane_pr(est, gt, Match({0}, 1), 0.005, 100);
  EXPECT_EQ(p.precision, 1.0);
  EXPECT_NEAR(p.recall, 0.5, 1.0 / 100 + 1e-12);  // closed interval
}

TEST(LanePr, MissedTargetsAreNotPenalized) {
  const LaneGraph gt = Graph({Line({0.2, 0.1}, {0.2, 0.9}), Line({0.8, 0.1}, {0.8, 0.9})});
  const LaneGraph est = Graph({gt.centerlines[0]});
  const PRPoint p = lane_pr(est, gt, match_min_l1(est.centerlines, gt.centerlines), 0.01);
  EXPECT_EQ(p.fn, 0u);
  EXPECT_EQ(p.recall, 1.0);
}

TEST(LanePr, UnmatchedEstimatesAreFalsePositives) {
  const LaneGraph est = Graph({Line({0.2, 0.1}, {0.2, 0.9})});
  const PRPoint p = lane_pr(est, LaneGraph{}, match_min_l1(est.centerlines, {}), 0.05);
  EXPECT_EQ(p.fp, 100u);
  EXPECT_EQ(p.precision, 0.0);
}

TEST(LanePrCurve, Examples) {
  const LaneGraph gt = Graph({Line({0.2, 0.5}, {0.8, 0.5}), Line({0.5, 0.0}, {0.5, 0.3})});
  LanePRCurve c = lane_pr_curve(gt, gt);
  ASSERT_EQ(c.points.size(), 10u);
  EXPECT_EQ(c.m_pre, 1.0);
  EXPECT_EQ(c.m_rec, 1.0);
  EXPECT_FALSE(c.vacuous);

  c = lane_pr_curve(LaneGraph{}, gt);
  EXPECT_TRUE(c.vacuous);
  EXPECT_EQ(c.m_pre, 1.0);
  EXPECT_EQ(c.m_rec, 1.0);
  for (const auto& p : c.points) EXPECT_EQ(p.tp + p.fp + p.fn, 0u);

  const LaneGraph est = Graph({Shifted(gt.centerlines[0], {0.0, 0.055}), Shifted(gt.centerlines[1], {0.055, 0.0})});
  c = lane_pr_curve(est, gt);
  EXPECT_EQ(c.m_pre, 0.5);
  EXPECT_EQ(c.m_rec, 0.5);
  for (std::size_t k = 0; k < 10; ++k) EXPECT_EQ(c.points[k].precision, k < 5 ? 0.0 : 1.0);
}

TEST(LanePrCurve, MonotoneInThreshold) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto rand_curve = [&] { return BezierCurve{{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}}}; };
  for (int rep = 0; rep < 30; ++rep) {
    LaneGraph gt = Graph({rand_curve(), rand_curve(), rand_curve()});
    LaneGraph est = Graph({rand_curve(), Shifted(gt.centerlines[1], {0.02, -0.03}), rand_curve()});
    const LanePRCurve c = lane_pr_curve(est, gt);
    for (std::size_t k = 1; k < c.points.size(); ++k) {
      EXPECT_GE(c.points[k].precision, c.points[k - 1].precision);
      EXPECT_GE(c.points[k].recall, c.points[k - 1].recall);
    }
  }
}

TEST(DetectionRatio, Examples) {
  EXPECT_EQ(detection_ratio(Match({0, 1, 2}, 3), 3), 1.0);
  EXPECT_EQ(detection_ratio(Match({0, 2}, 4), 4), 0.5);
  EXPECT_DOUBLE_EQ(detection_ratio(Match({1, 1, 1}, 3), 3), 1.0 / 3.0);
  EXPECT_EQ(detection_ratio(Match({}, 0), 0), 1.0);
  EXPECT_THROW(detection_ratio(Match({0}, 2), 3), DomainError);
}

IncidenceMatrix Incidence(std::size_t n, std::vector<EdgeKey> edges) {
  IncidenceMatrix m(n);
  for (const auto& [i, j] : edges) m.set(i, j);
  return m;
}

TEST(Connectivity, IdentityIsPerfect) {
  const IncidenceMatrix inc = Incidence(3, {{0, 1}, {1, 2}});
  const ConnectivityResult r = connectivity(inc, inc, Match({0, 1, 2}, 3));
  EXPECT_EQ(r.tp, 2u);
  EXPECT_EQ(r.fp, 0u);
  EXPECT_EQ(r.fn, 0u);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 1.0);
  EXPECT_EQ(r.iou, 1.0);
}

TEST(Connectivity, SameTargetEdgeIsTruePositiveButMissesGtEdge) {
  // GT A -> B; a1, a2 both matched to A with a1 -> a2.
  const ConnectivityResult r = connectivity(Incidence(2, {{0, 1}}), Incidence(2, {{0, 1}}), Match({0, 0}, 2));
  EXPECT_EQ(r.tp, 1u);
  EXPECT_EQ(r.fp, 0u);
  EXPECT_EQ(r.fn, 1u);
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_EQ(r.iou, 0.5);
}

TEST(Connectivity, FragmentedChainIsPerfect) {
  // a1 -> a2 -> b with a1, a2 matched to A and b matched to B; GT A -> B.
  const ConnectivityResult r =
      connectivity(Incidence(3, {{0, 1}, {1, 2}}), Incidence(2, {{0, 1}}), Match({0, 0, 1}, 2));
  EXPECT_EQ(r.tp, 2u);
  EXPECT_EQ(r.fp, 0u);
  EXPECT_EQ(r.fn, 0u);
  EXPECT_EQ(r.iou, 1.0);
}

TEST(Connectivity, WrongDirectionAndUnmatchedEndpointsAreFalsePositives) {
  const ConnectivityResult r =
      connectivity(Incidence(3, {{1, 0}, {0, 2}}), Incidence(2, {{0, 1}}), Match({0, 1, std::nullopt}, 2));
  EXPECT_EQ(r.tp, 0u);
  EXPECT_EQ(r.fp, 2u);
  EXPECT_EQ(r.fn, 1u);
}

TEST(Connectivity, EdgelessEstimate) {
  const IncidenceMatrix gt = Incidence(3, {{0, 1}, {1, 2}});
  const ConnectivityResult r = connectivity(IncidenceMatrix(3), gt, Match({0, 1, 2}, 3));
  EXPECT_EQ(r.precision, 1.0);
  EXPECT_TRUE(r.vacuous_precision);
  EXPECT_EQ(r.recall, 0.0);
  EXPECT_EQ(r.iou, 0.0);
  EXPECT_THROW(connectivity(IncidenceMatrix(2), gt, Match({0, 1, 2}, 3)), DomainError);
}

OrientedBox Box(Vec2 c, double l, double s, double a, std::size_t cls = 0) { return make_box(c, l, s, a, cls); }

TEST(ObjectPr, Examples) {
  const std::vector<OrientedBox> gt{Box({0.2, 0.2}, 0.04, 0.02, 0.3), Box({0.6, 0.5}, 0.05, 0.02, 1.0, 2),
                                    Box({0.8, 0.8}, 0.03, 0.03, 0.0, 3)};
  const std::vector<double> th = object_iou_thresholds();
  for (const PRPoint& p : object_pr(gt, gt, th)) {
    EXPECT_EQ(p.precision, 1.0);
    EXPECT_EQ(p.recall, 1.0);
  }
  for (const PRPoint& p : object_pr({}, gt, th)) {
    EXPECT_EQ(p.precision, 1.0);
    EXPECT_EQ(p.recall, 0.0);
  }

  // Shift by a third of the long side: overlap 2/3, IOU = (2/3) / (4/3) = 0.5.
  const std::vector<OrientedBox> target{Box({0.5, 0.5}, 0.3, 0.1, 0.0)};
  const std::vector<OrientedBox> est{Box({0.6, 0.5}, 0.3, 0.1, 0.0)};
  ASSERT_NEAR(oriented_iou(est[0], target[0]), 0.5, 1e-12);
  const std::vector<PRPoint> pr = object_pr(est, target, std::vector<double>{0.25, 0.75});
  EXPECT_EQ(pr[0].precision, 1.0);
  EXPECT_EQ(pr[0].recall, 1.0);
  EXPECT_EQ(pr[1].precision, 0.0);
  EXPECT_EQ(pr[1].recall, 0.0);
}

TEST(ObjectPr, MatchingStaysWithinClassAndSkipsNoDetection) {
  const std::vector<OrientedBox> gt{Box({0.5, 0.5}, 0.1, 0.05, 0.0, 0)};
  const std::vector<OrientedBox> wrong_class{Box({0.5, 0.5}, 0.1, 0.05, 0.0, 1)};
  const std::vector<double> th{0.5};
  PRPoint p = object_pr(wrong_class, gt, th)[0];
  EXPECT_EQ(p.tp, 0u);
  EXPECT_EQ(p.fp, 1u);
  EXPECT_EQ(p.fn, 1u);
  const std::vector<OrientedBox> nothing{Box({0.5, 0.5}, 0.1, 0.05, 0.0, kNumObjectClasses)};
  p = object_pr(nothing, gt, th)[0];
  EXPECT_EQ(p.fp, 0u);
}

TEST(ObjectPr, PrecisionMonotoneInThreshold) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.2, 0.8), s(0.02, 0.08), a(0.0, 3.14);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<OrientedBox> gt, est;
    for (int k = 0; k < 5; ++k) {
      gt.push_back(Box({u(rng), u(rng)}, 0.1, s(rng), a(rng), k % 2));
      OrientedBox e = gt.back();
      e.center += Vec2{s(rng) - 0.05, s(rng) - 0.05};
      est.push_back(e);
    }
    const auto pr = object_pr(est, gt, object_iou_thresholds());
    for (std::size_t k = 1; k < pr.size(); ++k) EXPECT_LE(pr[k].precision, pr[k - 1].precision);
  }
}

TEST(Miou, Examples) {
  ClassGrid a(10, 10, 0);
  for (std::size_t h = 0; h < 5; ++h)
    for (std::size_t w = 0; w < 10; ++w) a.at(h, w) = 1;
  MiouResult r = miou(a, a, 3);
  EXPECT_EQ(*r.per_class[0], 1.0);
  EXPECT_EQ(*r.per_class[1], 1.0);
  EXPECT_FALSE(r.per_class[2].has_value());
  EXPECT_EQ(r.mean, 1.0);

  const ClassGrid background(10, 10, 0);
  EXPECT_EQ(*miou(background, a, 2).per_class[1], 0.0);

  // pred: 5x5 block (25 cells) inside gt: an L of 75 cells.
  ClassGrid pred(10, 10, 0), gt(10, 10, 0);
  for (std::size_t h = 0; h < 5; ++h)
    for (std::size_t w = 0; w < 5; ++w) pred.at(h, w) = 1;
  for (std::size_t h = 0; h < 5; ++h)
    for (std::size_t w = 0; w < 10; ++w) gt.at(h, w) = 1;
  for (std::size_t h = 5; h < 10; ++h)
    for (std::size_t w = 0; w < 5; ++w) gt.at(h, w) = 1;
  r = miou(pred, gt, 2);
  EXPECT_EQ(r.intersection[1], 25u);
  EXPECT_EQ(r.uni[1], 75u);
  EXPECT_DOUBLE_EQ(*r.per_class[1], 1.0 / 3.0);
  EXPECT_THROW(miou(ClassGrid(2, 2), gt, 2), DomainError);
}

TEST(Miou, SymmetricAndIgnoresRequestedClass) {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> label(0, 3);
  for (int rep = 0; rep < 20; ++rep) {
    ClassGrid a(8, 9), b(8, 9);
    for (auto& v : a.labels) v = label(rng);
    for (auto& v : b.labels) v = label(rng);
    const MiouResult ab = miou(a, b, 4), ba = miou(b, a, 4);
    EXPECT_EQ(ab.per_class, ba.per_class);
    EXPECT_EQ(ab.mean, ba.mean);
    EXPECT_FALSE(miou(a, b, 4, 3).per_class[3].has_value());
  }
}

}  // namespace
}  // namespace lanegraph
