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

#include "lanegraph/assignment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "gtest/gtest.h"

namespace lanegraph {
namespace {

// Exhaustive oracle: best total over every injection of the smaller side.
double BruteForceMinimum(const CostMatrix& c) {
  const bool transpose = c.rows() > c.cols();
  const CostMatrix m = transpose ? CostMatrix(c.transpose()) : c;
  std::vector<int> cols(static_cast<std::size_t>(m.cols()));
  std::iota(cols.begin(), cols.end(), 0);
  double best = INFINITY;
  do {
    double total = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) total += m(i, cols[static_cast<std::size_t>(i)]);
    best = std::min(best, total);
  } while (std::next_permutation(cols.begin(), cols.end()));
  return best;
}

void ExpectValidAssignment(const Assignment& a, const CostMatrix& c) {
  EXPECT_EQ(a.pairs.size(), static_cast<std::size_t>(std::min(c.rows(), c.cols())));
  std::set<std::size_t> rows, cols;
  for (const auto& [r, col] : a.pairs) {
    EXPECT_TRUE(rows.insert(r).second);
    EXPECT_TRUE(cols.insert(col).second);
  }
}

TEST(Hungarian, Examples) {
  CostMatrix id(2, 2);
  id << 0, 1, 1, 0;
  Assignment a = hungarian(id);
  EXPECT_EQ(a.pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}}));
  EXPECT_EQ(a.total_cost, 0.0);

  CostMatrix c(2, 2);
  c << 4, 1, 2, 3;
  a = hungarian(c);
  EXPECT_EQ(a.pairs, (std::vector<std::pair<std::size_t, std::size_t>>{{0, 1}, {1, 0}}));
  EXPECT_EQ(a.total_cost, 3.0);

  EXPECT_TRUE(hungarian(CostMatrix(0, 0)).pairs.empty());
  EXPECT_TRUE(hungarian(CostMatrix(0, 3)).pairs.empty());
}

TEST(Hungarian, RejectsNonFiniteCosts) {
  CostMatrix c(2, 2);
  c << 0, NAN, 1, 2;
  EXPECT_THROW(hungarian(c), DomainError);
}

TEST(Hungarian, MatchesPermutationOracle6x6) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  for (int rep = 0; rep < 20; ++rep) {
    CostMatrix c(6, 6);
    for (Eigen::Index i = 0; i < 36; ++i) c.data()[i] = u(rng);
    const Assignment a = hungarian(c);
    ExpectValidAssignment(a, c);
    EXPECT_NEAR(a.total_cost, BruteForceMinimum(c), 1e-12);
  }
}

TEST(Hungarian, MatchesOracleOnEveryShapeUpTo7x7) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> u(0, 20);  // integer costs force ties
  for (int rows = 1; rows <= 7; ++rows) {
    for (int cols = 1; cols <= 7; ++cols) {
      for (int rep = 0; rep < 3; ++rep) {
        CostMatrix c(rows, cols);
        for (Eigen::Index i = 0; i < c.size(); ++i) c.data()[i] = u(rng);
        const Assignment a = hungarian(c);
        ExpectValidAssignment(a, c);
        EXPECT_EQ(a.total_cost, BruteForceMinimum(c)) << rows << "x" << cols;
      }
    }
  }
}

BezierCurve Curve(std::initializer_list<Vec2> pts) { return BezierCurve{std::vector<Vec2>(pts)}; }

TEST(MatchMinL1, Examples) {
  const std::vector<BezierCurve> targets{Curve({{0.1, 0.1}, {0.3, 0.5}, {0.5, 0.9}}),
                                         Curve({{0.45, 0.85}, {0.3, 0.5}, {0.15, 0.2}})};
  MatchMap m = match_min_l1(targets, targets);
  EXPECT_EQ(m.target_of[0], 0u);
  EXPECT_EQ(m.target_of[1], 1u);

  const std::vector<BezierCurve> near0{Curve({{0.1, 0.12}, {0.3, 0.5}, {0.5, 0.9}}),
                                       Curve({{0.1, 0.1}, {0.32, 0.5}, {0.5, 0.88}})};
  m = match_min_l1(near0, targets);
  EXPECT_EQ(m.estimates_of[0], (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(m.estimates_of[1].empty());

  // Same point set as target 0, opposite direction: control points put it
  // next to target 1 (L1 0.25 vs 2.4).
  const std::vector<BezierCurve> flipped{reverse(targets[0])};
  EXPECT_NEAR(control_point_l1(flipped[0], targets[1]), 0.25, 1e-12);
  EXPECT_NEAR(control_point_l1(flipped[0], targets[0]), 2.4, 1e-12);
  EXPECT_EQ(match_min_l1(flipped, targets).target_of[0], 1u);
}

TEST(MatchMinL1, TiesGoToLowestTarget) {
  const std::vector<BezierCurve> targets{Curve({{0.0, 0.0}, {0.0, 1.0}}), Curve({{0.2, 0.0}, {0.2, 1.0}})};
  const std::vector<BezierCurve> est{Curve({{0.1, 0.0}, {0.1, 1.0}})};
  EXPECT_EQ(match_min_l1(est, targets).target_of[0], 0u);
}

TEST(MatchMinL1, EmptyTargetsLeaveEstimatesUnmatched) {
  const std::vector<BezierCurve> est{Curve({{0, 0}, {1, 1}})};
  const MatchMap m = match_min_l1(est, {});
  EXPECT_FALSE(m.target_of[0].has_value());
  EXPECT_FALSE(m.diagnostic.empty());
  EXPECT_TRUE(match_min_l1({}, {}).diagnostic.empty());
}

TEST(MatchMinL1, PermutationInvariantAndPartitioned) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto random_curve = [&] { return Curve({{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}}); };
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<BezierCurve> est(9), tgt(5);
    for (auto& c : est) c = random_curve();
    for (auto& c : tgt) c = random_curve();
    const MatchMap m = match_min_l1(est, tgt);
    std::vector<std::size_t> perm(est.size());
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<BezierCurve> shuffled;
    for (std::size_t p : perm) shuffled.push_back(est[p]);
    const MatchMap ms = match_min_l1(shuffled, tgt);
    std::size_t members = 0;
    for (std::size_t k = 0; k < perm.size(); ++k) EXPECT_EQ(ms.target_of[k], m.target_of[perm[k]]);
    for (std::size_t n = 0; n < tgt.size(); ++n) {
      members += m.estimates_of[n].size();
      for (std::size_t i : m.estimates_of[n]) EXPECT_EQ(m.target_of[i], n);
    }
    EXPECT_EQ(members, est.size());
  }
}

TEST(TrainingMatchCost, Examples) {
  const std::vector<double> p{0.1, 0.2, 0.3};
  const std::vector<double> q{0.4, 0.2, 0.0};
  EXPECT_NEAR(training_match_cost(0.5, true, p, p, {1.0}), 0.6931471805599453, 1e-12);
  EXPECT_NEAR(training_match_cost(1.0, true, p, p), 0.0, 1e-6);
  EXPECT_EQ(training_match_cost(0.3, true, p, q, {0.0}), training_match_cost(0.3, true, p, p, {0.0}));
  EXPECT_NEAR(training_match_cost(0.5, true, p, q, {2.0}), std::log(2.0) + 2.0 * 0.6, 1e-12);
  EXPECT_TRUE(std::isfinite(training_match_cost(0.0, true, p, p)));
  EXPECT_THROW(training_match_cost(0.5, true, p, std::vector<double>{1.0}), DomainError);
}

TEST(TrainingMatchCost, MonotoneInDetectionProbability) {
  const std::vector<double> p{0.1, 0.2}, q{0.3, 0.1};
  double previous = INFINITY;
  for (int k = 0; k <= 100; ++k) {
    const double cost = training_match_cost(k / 100.0, true, p, q);
    EXPECT_LE(cost, previous);
    previous = cost;
  }
}

TEST(AngleLoss, Examples) {
  EXPECT_EQ(angle_loss(0.7, 0.7), 0.0);
  EXPECT_EQ(angle_loss(0.7 + std::numbers::pi, 0.7), 0.0);
  EXPECT_NEAR(angle_loss(0.0, std::numbers::pi / 2), 2.0, 1e-15);
}

TEST(AngleLoss, SymmetryRangeAndGradient) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int rep = 0; rep < 100; ++rep) {
    const double a = u(rng), f = u(rng);
    const double l = angle_loss(a, f);
    EXPECT_GE(l, 0.0);
    EXPECT_LE(l, 2.0 * std::sqrt(2.0) + 1e-12);
    EXPECT_NEAR(l, angle_loss(f, a), 1e-12);
    EXPECT_NEAR(l, angle_loss(a + std::numbers::pi, f), 1e-12);
    EXPECT_EQ(angle_loss(a, a + std::numbers::pi), 0.0);

    const double h = 1e-6;
    const double dc = std::cos(2 * a) - std::cos(2 * f), ds = std::sin(2 * a) - std::sin(2 * f);
    if (std::abs(dc) < 1e-4 || std::abs(ds) < 1e-4) continue;  // kink
    const double fd = (angle_loss(a + h, f) - angle_loss(a - h, f)) / (2 * h);
    EXPECT_NEAR(angle_loss_gradient(a, f), fd, 1e-5);
  }
}

TEST(CrossEntropy, Examples) {
  EXPECT_NEAR(cross_entropy(std::vector<double>{0, 1, 0}, 1), 0.0, 1e-6);
  EXPECT_NEAR(cross_entropy(std::vector<double>(4, 0.25), 3), 1.3862943611198906, 1e-12);
  EXPECT_NEAR(cross_entropy(std::vector<double>{0.1, 0.9}, 0), 2.302585092994046, 1e-12);
  EXPECT_THROW(cross_entropy(std::vector<double>{0.5, 0.6}, 0), DomainError);
  EXPECT_THROW(cross_entropy(std::vector<double>{1.0}, 1), DomainError);
}

TEST(AssociationInput, Examples) {
  EXPECT_EQ(association_input(std::vector<double>{1}, std::vector<double>{2}), (std::vector<double>{1, 2}));
  EXPECT_EQ(association_input(std::vector<double>{2}, std::vector<double>{1}), (std::vector<double>{2, 1}));
  const std::vector<double> a{0.1, 0.2, 0.3}, b{0.4, 0.5, 0.6};
  EXPECT_EQ(association_input(a, b).size(), 6u);
  EXPECT_NE(association_input(a, b), association_input(b, a));
  EXPECT_THROW(association_input(a, std::vector<double>{1}), DomainError);
}

}  // namespace
}  // namespace lanegraph
