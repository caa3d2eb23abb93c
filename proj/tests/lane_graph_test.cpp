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

#include "lanegraph/lane_graph.hpp"

#include <random>

#include "gtest/gtest.h"

namespace lanegraph {
namespace {

BezierCurve Line(Vec2 a, Vec2 b) { return BezierCurve{{a, (a + b) * 0.5, b}}; }

LaneGraph Chain(std::size_t n) {
  std::vector<BezierCurve> curves;
  for (std::size_t i = 0; i < n; ++i) {
    curves.push_back(Line({0.5, 0.1 * static_cast<double>(i)}, {0.5, 0.1 * static_cast<double>(i + 1)}));
  }
  LaneGraph g = make_graph(curves);
  for (std::size_t i = 0; i + 1 < n; ++i) g.connect(i, i + 1);
  return g;
}

std::size_t CountKind(const std::vector<Diagnostic>& d, DiagnosticKind kind) {
  return static_cast<std::size_t>(
      std::count_if(d.begin(), d.end(), [kind](const Diagnostic& x) { return x.kind == kind; }));
}

TEST(Validate, Examples) {
  EXPECT_TRUE(validate(LaneGraph{}).empty());

  LaneGraph loop = make_graph({Line({0.1, 0.1}, {0.2, 0.2})});
  loop.connect(0, 0);
  const auto d = validate(loop);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].kind, DiagnosticKind::kDiagonal);
  EXPECT_EQ(d[0].severity, Severity::kError);

  LaneGraph pair = make_graph({Line({0.1, 0.1}, {0.3, 0.4}), Line({0.3, 0.4}, {0.5, 0.9})});
  pair.connect(0, 1);
  EXPECT_TRUE(validate(pair).empty());
}

TEST(Validate, ReportsEachViolation) {
  LaneGraph g = make_graph({Line({0.1, 0.1}, {0.3, 0.4}), Line({0.3, 0.5}, {0.1, 0.1})});
  g.connect(0, 1);
  g.connect(1, 0);
  auto d = validate(g);
  EXPECT_EQ(CountKind(d, DiagnosticKind::kMutualEdge), 1u);
  EXPECT_EQ(CountKind(d, DiagnosticKind::kEndpointMismatch), 1u);  // 0 -> 1 is 0.1 apart
  EXPECT_EQ(CountKind(d, DiagnosticKind::kCycle), 1u);
  EXPECT_TRUE(has_errors(d));

  // Prediction mode keeps only structural checks; the cycle stays informational.
  d = validate(g, {.ground_truth = false});
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].severity, Severity::kInfo);
  EXPECT_FALSE(has_errors(d));

  LaneGraph bad = make_graph({Line({0, 0}, {1, 1})});
  bad.incidence = IncidenceMatrix(2, 3);
  d = validate(bad);
  ASSERT_EQ(d.size(), 1u);
  EXPECT_EQ(d[0].kind, DiagnosticKind::kNonSquare);
}

TEST(Validate, EndpointToleranceIsOneMicro) {
  LaneGraph g = make_graph({Line({0.1, 0.1}, {0.3, 0.4}), Line({0.3 + 5e-7, 0.4}, {0.5, 0.9})});
  g.connect(0, 1);
  EXPECT_TRUE(validate(g).empty());
  g.centerlines[1].control_points.front().x = 0.3 + 2e-6;
  EXPECT_EQ(CountKind(validate(g), DiagnosticKind::kEndpointMismatch), 1u);
}

TEST(ConnectedPairs, Examples) {
  EXPECT_TRUE(connected_pairs(make_graph({Line({0, 0}, {1, 1}), Line({0, 1}, {1, 0})})).empty());
  LaneGraph g = Chain(3);
  EXPECT_EQ(connected_pairs(g), (std::vector<EdgeKey>{{0, 1}, {1, 2}}));
  EXPECT_EQ(connected_pairs(Chain(5)).size(), 4u);
}

TEST(MergeJunctions, NoEdgesIsIdentity) {
  LaneGraph g = make_graph({Line({0.1, 0.1}, {0.2, 0.3}), Line({0.4, 0.4}, {0.7, 0.9})});
  EXPECT_EQ(merge_junctions(g), g);
}

TEST(MergeJunctions, SnapsPairToMean) {
  LaneGraph g = make_graph({Line({0.5, 0.1}, {0.50, 0.50}), Line({0.52, 0.50}, {0.6, 0.9})});
  g.connect(0, 1);
  const LaneGraph m = merge_junctions(g);
  EXPECT_NEAR(m.centerlines[0].back().x, 0.51, 1e-15);
  EXPECT_NEAR(m.centerlines[0].back().y, 0.50, 1e-15);
  EXPECT_EQ(m.centerlines[0].back(), m.centerlines[1].front());
  EXPECT_EQ(m.centerlines[0].front(), g.centerlines[0].front());
  EXPECT_EQ(m.centerlines[1].back(), g.centerlines[1].back());
  EXPECT_EQ(m.incidence, g.incidence);
}

TEST(MergeJunctions, YJunctionSnapsThreeEndpoints) {
  // A -> C and B -> C: the end of A, end of B and start of C form one group.
  LaneGraph g = make_graph({Line({0.3, 0.1}, {0.48, 0.5}), Line({0.7, 0.1}, {0.53, 0.49}),
                            Line({0.50, 0.54}, {0.5, 0.9})});
  g.connect(0, 2);
  g.connect(1, 2);
  const auto junctions = find_junctions(g);
  ASSERT_EQ(junctions.size(), 1u);
  EXPECT_EQ(junctions[0].members.size(), 3u);
  const LaneGraph m = merge_junctions(g);
  const Vec2 mean{(0.48 + 0.53 + 0.50) / 3.0, (0.5 + 0.49 + 0.54) / 3.0};
  for (const Vec2& p : {m.centerlines[0].back(), m.centerlines[1].back(), m.centerlines[2].front()}) {
    EXPECT_NEAR(p.x, mean.x, 1e-15);
    EXPECT_NEAR(p.y, mean.y, 1e-15);
  }
}

LaneGraph RandomGraph(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<int> count(1, 8);
  const auto n = static_cast<std::size_t>(count(rng));
  std::vector<BezierCurve> curves;
  for (std::size_t i = 0; i < n; ++i) curves.push_back(BezierCurve{{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}}});
  LaneGraph g = make_graph(curves);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j && u(rng) < 0.25) g.connect(i, j);
  return g;
}

TEST(MergeJunctions, IdempotentAndIncidencePreserving) {
  std::mt19937_64 rng(42);
  for (int rep = 0; rep < 200; ++rep) {
    const LaneGraph g = RandomGraph(rng);
    const LaneGraph once = merge_junctions(g);
    EXPECT_EQ(merge_junctions(once), once);
    EXPECT_EQ(once.incidence, g.incidence);
    for (const auto& [i, j] : connected_pairs(once)) {
      EXPECT_EQ(once.centerlines[i].back(), once.centerlines[j].front());
    }
  }
}

TEST(SubgraphReachable, Examples) {
  const LaneGraph chain = Chain(3);
  EXPECT_EQ(subgraph_reachable(chain, 0), (std::set<std::size_t>{0, 1, 2}));
  EXPECT_EQ(subgraph_reachable(chain, 2), (std::set<std::size_t>{2}));
  LaneGraph diamond = Chain(4);
  diamond.incidence = IncidenceMatrix(4);
  diamond.connect(0, 1);
  diamond.connect(0, 2);
  diamond.connect(1, 3);
  diamond.connect(2, 3);
  EXPECT_EQ(subgraph_reachable(diamond, 0), (std::set<std::size_t>{0, 1, 2, 3}));
  EXPECT_THROW(subgraph_reachable(chain, 3), DomainError);
}

TEST(Activate, ThresholdsScores) {
  LaneGraph g = Chain(3);
  g.scores = {0.9, 0.2, 0.7};
  g.edge_scores[{0, 1}] = 0.9;
  g.connect(0, 2);
  g.edge_scores[{0, 2}] = 0.4;
  LaneGraph hard = activate(g, 0.5, 0.5);
  ASSERT_EQ(hard.size(), 2u);
  EXPECT_FALSE(hard.incidence(0, 1));  // 0 -> 2 under threshold
  EXPECT_TRUE(hard.scores.empty());
  g.edge_scores[{0, 2}] = 0.6;
  hard = activate(g, 0.5, 0.5);
  EXPECT_TRUE(hard.incidence(0, 1));
}

TEST(ReverseGraph, FlipsCurvesAndEdges) {
  const LaneGraph g = Chain(3);
  const LaneGraph r = reverse_graph(g);
  EXPECT_EQ(r.incidence, g.incidence.transposed());
  EXPECT_EQ(r.centerlines[0], reverse(g.centerlines[0]));
  EXPECT_TRUE(validate(r).empty());
  EXPECT_EQ(reverse_graph(r), g);
}

}  // namespace
}  // namespace lanegraph
