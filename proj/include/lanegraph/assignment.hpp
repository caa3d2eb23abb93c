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

#ifndef LANEGRAPH_ASSIGNMENT_HPP_
#define LANEGRAPH_ASSIGNMENT_HPP_

/**
 * @file
 * @brief Estimate-to-target association and the matching/training costs.
 *
 * Two matchers live here. hungarian() is the one-to-one optimal assignment
 * used while training and for object evaluation. match_min_l1() is the
 * many-to-one rule used by the lane metrics: every estimate goes to the
 * target with the smallest control-point L1 distance, so several estimates
 * may share a target.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "lanegraph/curve.hpp"
#include "lanegraph/error.hpp"

namespace lanegraph {

/// n_estimates x n_targets, finite entries.
using CostMatrix = Eigen::MatrixXd;

struct Assignment {
  /// (row, column) pairs sorted by row.
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  double total_cost = 0.0;
};

/**
 * @brief Minimum-cost one-to-one assignment (Kuhn-Munkres with potentials,
 * O(n^3)).
 *
 * Rectangular inputs are padded to square with cost max + 1; pairs that
 * touch padding are dropped, so min(rows, cols) real pairs are returned.
 */
inline Assignment hungarian(const CostMatrix& costs) {
  Assignment result;
  const auto rows = static_cast<std::size_t>(costs.rows());
  const auto cols = static_cast<std::size_t>(costs.cols());
  if (rows == 0 || cols == 0) return result;
  if (!costs.allFinite()) throw DomainError("hungarian: cost matrix has non-finite entries");

  const std::size_t n = std::max(rows, cols);
  const double pad = costs.maxCoeff() + 1.0;
  auto cost = [&](std::size_t i, std::size_t j) {
    return (i < rows && j < cols) ? costs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))
                                  : pad;
  };

  // 1-based arrays; column 0 is the virtual source.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> owner(n + 1, 0), way(n + 1, 0);
  for (std::size_t i = 1; i <= n; ++i) {
    owner[0] = i;
    std::size_t j0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const std::size_t i0 = owner[j0];
      double delta = inf;
      std::size_t j1 = 0;
      for (std::size_t j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (std::size_t j = 0; j <= n; ++j) {
        if (used[j]) {
          u[owner[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (owner[j0] != 0);
    do {
      const std::size_t j1 = way[j0];
      owner[j0] = owner[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::optional<std::size_t>> row_to_col(rows);
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t i = owner[j] - 1;
    if (i < rows && j - 1 < cols) row_to_col[i] = j - 1;
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (!row_to_col[i]) continue;
    result.pairs.emplace_back(i, *row_to_col[i]);
    result.total_cost += costs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(*row_to_col[i]));
  }
  return result;
}

/// M(i): target of estimate i (if any). S(n): estimates matched to target n.
struct MatchMap {
  std::vector<std::optional<std::size_t>> target_of;
  std::vector<std::vector<std::size_t>> estimates_of;
  std::string diagnostic;

  std::size_t n_estimates() const { return target_of.size(); }
  std::size_t n_targets() const { return estimates_of.size(); }

  static MatchMap from_targets(std::vector<std::optional<std::size_t>> target_of,
                               std::size_t n_targets) {
    MatchMap m;
    m.estimates_of.resize(n_targets);
    for (std::size_t i = 0; i < target_of.size(); ++i) {
      if (!target_of[i]) continue;
      if (*target_of[i] >= n_targets) throw DomainError("match target index out of range");
      m.estimates_of[*target_of[i]].push_back(i);
    }
    m.target_of = std::move(target_of);
    return m;
  }

  friend bool operator==(const MatchMap&, const MatchMap&) = default;
};

/// Each estimate to its nearest target by control-point L1; ties go to the
/// lowest target index.
inline MatchMap match_min_l1(std::span<const BezierCurve> estimates,
                             std::span<const BezierCurve> targets) {
  std::vector<std::optional<std::size_t>> target_of(estimates.size());
  if (targets.empty()) {
    MatchMap m = MatchMap::from_targets(std::move(target_of), 0);
    if (!estimates.empty()) {
      m.diagnostic = std::to_string(estimates.size()) + " estimates left unmatched: no targets";
    }
    return m;
  }
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < targets.size(); ++n) {
      const double d = control_point_l1(estimates[i], targets[n]);
      if (d < best) {
        best = d;
        target_of[i] = n;
      }
    }
  }
  return MatchMap::from_targets(std::move(target_of), targets.size());
}

struct LossConfig {
  /// Weight of the L1 parameter term.
  double lambda = 1.0;
};

/// Probabilities are clamped to [eps, 1 - eps] before taking logs.
inline constexpr double kProbabilityEpsilon = 1e-7;

inline double clamp_probability(double p) {
  return std::clamp(p, kProbabilityEpsilon, 1.0 - kProbabilityEpsilon);
}

inline double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw DomainError("parameter vectors differ in length (" + std::to_string(a.size()) + " vs " +
                      std::to_string(b.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += std::abs(a[k] - b[k]);
  return sum;
}

/**
 * @brief Matching cost L = CE + lambda * L1 for one estimate/slot pair.
 *
 * With a GT slot present the CE term is -ln(p) and the L1 term compares the
 * parameter vectors; an empty slot costs -ln(1 - p) only.
 */
inline double training_match_cost(double det_prob, bool is_gt_present,
                                  std::span<const double> est_params,
                                  std::span<const double> gt_params, const LossConfig& cfg = {}) {
  if (cfg.lambda < 0.0) throw DomainError("training_match_cost: lambda must be >= 0");
  const double p = clamp_probability(det_prob);
  if (!is_gt_present) return -std::log(1.0 - p);
  return -std::log(p) + cfg.lambda * l1_distance(est_params, gt_params);
}

namespace detail {

// True when a and b denote the same undirected heading up to floating-point
// representation error of the operands.
inline bool same_heading(double a, double b) {
  const double r = std::remainder(a - b, std::numbers::pi);
  const double scale = std::max({std::abs(a), std::abs(b), std::numbers::pi});
  return std::abs(r) <= 8.0 * std::numeric_limits<double>::epsilon() * scale;
}

}  // namespace detail

/// |cos 2a - cos 2p| + |sin 2a - sin 2p|; zero iff a == p (mod pi).
inline double angle_loss(double alpha, double phi) {
  if (detail::same_heading(alpha, phi)) return 0.0;
  return std::abs(std::cos(2.0 * alpha) - std::cos(2.0 * phi)) +
         std::abs(std::sin(2.0 * alpha) - std::sin(2.0 * phi));
}

/// d angle_loss / d alpha (a subgradient at the kinks).
inline double angle_loss_gradient(double alpha, double phi) {
  auto sign = [](double v) { return static_cast<double>((v > 0.0) - (v < 0.0)); };
  const double dc = std::cos(2.0 * alpha) - std::cos(2.0 * phi);
  const double ds = std::sin(2.0 * alpha) - std::sin(2.0 * phi);
  return -2.0 * sign(dc) * std::sin(2.0 * alpha) + 2.0 * sign(ds) * std::cos(2.0 * alpha);
}

inline double cross_entropy(std::span<const double> probs, std::size_t label) {
  if (label >= probs.size()) {
    throw DomainError("cross_entropy: label " + std::to_string(label) + " outside " +
                      std::to_string(probs.size()) + " classes");
  }
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("cross_entropy: probability outside [0, 1]");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-6) {
    throw DomainError("cross_entropy: distribution sums to " + std::to_string(sum));
  }
  return -std::log(clamp_probability(probs[label]));
}

/// concat(f_i, f_j): the directed pair feature fed to the association
/// classifier.
inline std::vector<double> association_input(std::span<const double> f_i,
                                             std::span<const double> f_j) {
  if (f_i.size() != f_j.size()) {
    throw DomainError("association_input: feature lengths differ (" + std::to_string(f_i.size()) +
                      " vs " + std::to_string(f_j.size()) + ")");
  }
  std::vector<double> out(f_i.begin(), f_i.end());
  out.insert(out.end(), f_j.begin(), f_j.end());
  return out;
}

}  // namespace lanegraph

#endif  // LANEGRAPH_ASSIGNMENT_HPP_
