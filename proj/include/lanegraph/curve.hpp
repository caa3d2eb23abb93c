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

#ifndef LANEGRAPH_CURVE_HPP_
#define LANEGRAPH_CURVE_HPP_

/**
 * @file
 * @brief Bezier centerlines: evaluation, Bernstein basis, least-squares
 * control-point fitting and direction-aware control-point distance.
 *
 * A centerline of degree n is B(t) = sum_k C(n,k) (1-t)^(n-k) t^k P_k for
 * t in [0, 1]. Stacking the Bernstein weights of T parameter values gives
 * the T x (n+1) basis matrix G, so that sampled points are G * P and fitting
 * observed points Y is the linear least-squares problem min_P |G P - Y|.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lanegraph/error.hpp"
#include "lanegraph/vec2.hpp"

namespace lanegraph {

/// Ordered control points in normalized BEV coordinates. Degree = size - 1.
struct BezierCurve {
  std::vector<Vec2> control_points;

  std::size_t size() const { return control_points.size(); }
  std::size_t degree() const { return control_points.empty() ? 0 : control_points.size() - 1; }
  const Vec2& front() const { return control_points.front(); }
  const Vec2& back() const { return control_points.back(); }

  friend bool operator==(const BezierCurve&, const BezierCurve&) = default;
};

using Polyline = std::vector<Vec2>;

/// Rows are parameter values, columns are Bernstein weights.
using BasisMatrix = Eigen::MatrixXd;

/// Number of control points used for every centerline.
inline constexpr std::size_t kDefaultControlPoints = 3;

enum class Parameterization {
  kUniform,      // t_i = i / (T - 1)
  kChordLength,  // t_i proportional to cumulative chord length
};

inline double binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

inline double bernstein(int n, int k, double t) {
  return binomial(n, k) * std::pow(1.0 - t, n - k) * std::pow(t, k);
}

namespace detail {

inline void check_parameter(double t) {
  if (!(t >= 0.0 && t <= 1.0)) {
    throw DomainError("Bezier parameter t=" + std::to_string(t) + " outside [0, 1]");
  }
}

inline void check_curve(const BezierCurve& curve) {
  if (curve.size() < 2) {
    throw DomainError("Bezier curve needs at least 2 control points, got " +
                      std::to_string(curve.size()));
  }
}

}  // namespace detail

inline Vec2 eval_bezier(const BezierCurve& curve, double t) {
  detail::check_curve(curve);
  detail::check_parameter(t);
  const int n = static_cast<int>(curve.degree());
  Vec2 p;
  for (int k = 0; k <= n; ++k) p += bernstein(n, k, t) * curve.control_points[k];
  return p;
}

inline BasisMatrix basis_matrix(std::span<const double> ts, int degree) {
  if (ts.empty()) throw DomainError("basis_matrix: empty parameter list");
  if (degree < 1) throw DomainError("basis_matrix: degree must be >= 1");
  BasisMatrix basis(static_cast<Eigen::Index>(ts.size()), degree + 1);
  for (std::size_t i = 0; i < ts.size(); ++i) {
    detail::check_parameter(ts[i]);
    for (int j = 0; j <= degree; ++j) basis(static_cast<Eigen::Index>(i), j) = bernstein(degree, j, ts[i]);
  }
  return basis;
}

/// `count` uniformly spaced parameter values in [0, 1], both ends included.
inline std::vector<double> uniform_parameters(std::size_t count) {
  if (count < 2) throw DomainError("need at least 2 samples, got " + std::to_string(count));
  std::vector<double> ts(count);
  for (std::size_t i = 0; i < count; ++i) {
    ts[i] = static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return ts;
}

inline Polyline sample_curve(const BezierCurve& curve, std::size_t count) {
  const std::vector<double> ts = uniform_parameters(count);
  Polyline out;
  out.reserve(count);
  for (double t : ts) out.push_back(eval_bezier(curve, t));
  return out;
}

inline std::vector<double> parameterize(std::span<const Vec2> points, Parameterization mode) {
  if (points.size() < 2) throw DomainError("parameterize: need at least 2 points");
  if (mode == Parameterization::kUniform) return uniform_parameters(points.size());

  std::vector<double> ts(points.size(), 0.0);
  for (std::size_t i = 1; i < points.size(); ++i) {
    ts[i] = ts[i - 1] + distance(points[i - 1], points[i]);
  }
  const double total = ts.back();
  if (total <= 0.0) throw FitError("chord-length parameterization of a zero-length polyline");
  for (double& t : ts) t /= total;
  ts.back() = 1.0;
  return ts;
}

/// Condition-number limit on the Gram matrix before switching to QR.
inline constexpr double kGramConditionLimit = 1e8;

/**
 * @brief Least-squares control points for `points` under the given
 * parameterization.
 *
 * Solves the normal equations when the Gram matrix is well conditioned and a
 * column-pivoted QR of the basis otherwise. Throws FitError when the basis is
 * rank deficient (for example chord-length parameters collapsing onto fewer
 * distinct values than control points).
 */
inline BezierCurve fit_bezier(std::span<const Vec2> points, int degree,
                              Parameterization mode = Parameterization::kUniform) {
  if (degree < 1) throw DomainError("fit_bezier: degree must be >= 1");
  if (points.size() < static_cast<std::size_t>(degree) + 1) {
    throw DomainError("fit_bezier: " + std::to_string(points.size()) +
                      " points cannot determine a degree-" + std::to_string(degree) + " curve");
  }
  const std::vector<double> ts = parameterize(points, mode);
  const BasisMatrix basis = basis_matrix(ts, degree);
  Eigen::MatrixXd observed(static_cast<Eigen::Index>(points.size()), 2);
  for (std::size_t i = 0; i < points.size(); ++i) {
    observed(static_cast<Eigen::Index>(i), 0) = points[i].x;
    observed(static_cast<Eigen::Index>(i), 1) = points[i].y;
  }

  const Eigen::MatrixXd gram = basis.transpose() * basis;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();

  Eigen::MatrixXd solution;
  if (lo > 0.0 && hi / lo <= kGramConditionLimit) {
    solution = gram.ldlt().solve(basis.transpose() * observed);
  } else {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(basis);
    if (qr.rank() < degree + 1) {
      throw FitError("fit_bezier: basis has rank " + std::to_string(qr.rank()) + " < " +
                     std::to_string(degree + 1) +
                     " (parameter values collapse; check for repeated points)");
    }
    solution = qr.solve(observed);
  }

  BezierCurve curve;
  curve.control_points.resize(static_cast<std::size_t>(degree) + 1);
  for (int k = 0; k <= degree; ++k) curve.control_points[k] = {solution(k, 0), solution(k, 1)};
  return curve;
}

/// Euclidean norm of G(t) P - Y, the quantity fit_bezier minimizes.
inline double fit_residual(const BezierCurve& curve, std::span<const Vec2> points,
                           Parameterization mode = Parameterization::kUniform) {
  const std::vector<double> ts = parameterize(points, mode);
  double sum = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    sum += squared_distance(eval_bezier(curve, ts[i]), points[i]);
  }
  return std::sqrt(sum);
}

/// Sum of absolute coordinate differences between ordered control points.
/// Reversed curves are far apart under this distance.
inline double control_point_l1(const BezierCurve& a, const BezierCurve& b) {
  if (a.size() != b.size()) {
    throw DomainError("control_point_l1: control point counts differ (" +
                      std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    sum += std::abs(a.control_points[k].x - b.control_points[k].x) +
           std::abs(a.control_points[k].y - b.control_points[k].y);
  }
  return sum;
}

inline BezierCurve reverse(BezierCurve curve) {
  std::reverse(curve.control_points.begin(), curve.control_points.end());
  return curve;
}

/// Same curve expressed with one more control point.
inline BezierCurve elevate_degree(const BezierCurve& curve) {
  detail::check_curve(curve);
  const std::size_t n = curve.degree();
  const auto& p = curve.control_points;
  BezierCurve out;
  out.control_points.reserve(n + 2);
  out.control_points.push_back(p.front());
  for (std::size_t i = 1; i <= n; ++i) {
    const double a = static_cast<double>(i) / static_cast<double>(n + 1);
    out.control_points.push_back(a * p[i - 1] + (1.0 - a) * p[i]);
  }
  out.control_points.push_back(p.back());
  return out;
}

/// Smallest distance from `p` to any point of `samples`.
inline double min_distance(const Vec2& p, std::span<const Vec2> samples) {
  double best = INFINITY;
  for (const Vec2& s : samples) best = std::min(best, squared_distance(p, s));
  return std::sqrt(best);
}

}  // namespace lanegraph

#endif  // LANEGRAPH_CURVE_HPP_
