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

#ifndef LANEGRAPH_LANE_GRAPH_HPP_
#define LANEGRAPH_LANE_GRAPH_HPP_

/**
 * @file
 * @brief Directed graph of centerlines with a binary incidence matrix.
 *
 * incidence(x, y) == 1 means centerline y starts where centerline x ends, so
 * the matrix carries traffic direction. Ground-truth graphs have a zero
 * diagonal, at most one of (x, y) / (y, x) set, and coinciding endpoints on
 * every edge. Predicted graphs only need the zero diagonal; cycles are legal
 * and reported as informational diagnostics.
 */

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lanegraph/curve.hpp"
#include "lanegraph/error.hpp"
#include "lanegraph/vec2.hpp"

namespace lanegraph {

/// Dense row-major binary matrix. Normally square, but may be built
/// non-square so that validate() can report it.
class IncidenceMatrix {
 public:
  IncidenceMatrix() = default;
  explicit IncidenceMatrix(std::size_t n) : IncidenceMatrix(n, n) {}
  IncidenceMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), bits_(rows * cols, 0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool is_square() const { return rows_ == cols_; }

  bool operator()(std::size_t i, std::size_t j) const { return bits_[index(i, j)] != 0; }
  void set(std::size_t i, std::size_t j, bool value = true) {
    bits_[index(i, j)] = value ? 1 : 0;
  }

  std::size_t count() const {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }

  IncidenceMatrix transposed() const {
    IncidenceMatrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t.set(j, i, (*this)(i, j));
    return t;
  }

  std::span<const std::uint8_t> bytes() const { return bits_; }

  friend bool operator==(const IncidenceMatrix&, const IncidenceMatrix&) = default;

 private:
  std::size_t index(std::size_t i, std::size_t j) const {
    if (i >= rows_ || j >= cols_) {
      throw DomainError("incidence index (" + std::to_string(i) + ", " + std::to_string(j) +
                        ") outside " + std::to_string(rows_) + "x" + std::to_string(cols_));
    }
    return i * cols_ + j;
  }

  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<std::uint8_t> bits_;
};

using EdgeKey = std::pair<std::size_t, std::size_t>;

struct LaneGraph {
  std::vector<BezierCurve> centerlines;
  IncidenceMatrix incidence;
  /// Optional detection probability per centerline; empty means all certain.
  std::vector<double> scores;
  /// Optional association probability for listed edges.
  std::map<EdgeKey, double> edge_scores;

  std::size_t size() const { return centerlines.size(); }

  /// Appends a centerline and grows the incidence matrix.
  std::size_t add(BezierCurve curve) {
    const std::size_t n = centerlines.size();
    IncidenceMatrix grown(n + 1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) grown.set(i, j, incidence(i, j));
    incidence = std::move(grown);
    centerlines.push_back(std::move(curve));
    return n;
  }

  void connect(std::size_t from, std::size_t to) { incidence.set(from, to); }

  friend bool operator==(const LaneGraph&, const LaneGraph&) = default;
};

inline LaneGraph make_graph(std::vector<BezierCurve> curves) {
  LaneGraph g;
  g.incidence = IncidenceMatrix(curves.size());
  g.centerlines = std::move(curves);
  return g;
}

enum class EndpointKind { kStart, kEnd };

struct JunctionMember {
  std::size_t centerline = 0;
  EndpointKind kind = EndpointKind::kStart;
  friend bool operator==(const JunctionMember&, const JunctionMember&) = default;
};

struct Junction {
  std::vector<JunctionMember> members;
  Vec2 location;
};

enum class Severity { kError, kInfo };

enum class DiagnosticKind {
  kNonSquare,
  kDiagonal,
  kMutualEdge,
  kEndpointMismatch,
  kCycle,
  kMalformedCurve,
  kScores,
};

struct Diagnostic {
  Severity severity = Severity::kError;
  DiagnosticKind kind = DiagnosticKind::kNonSquare;
  std::string message;
};

struct ValidateOptions {
  /// Enforce the stricter ground-truth invariants (mutual edges, endpoints).
  bool ground_truth = true;
  double endpoint_tolerance = 1e-6;
};

inline bool has_errors(std::span<const Diagnostic> diagnostics) {
  return std::any_of(diagnostics.begin(), diagnostics.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::kError; });
}

inline std::vector<EdgeKey> connected_pairs(const LaneGraph& graph) {
  std::vector<EdgeKey> pairs;
  for (std::size_t i = 0; i < graph.incidence.rows(); ++i)
    for (std::size_t j = 0; j < graph.incidence.cols(); ++j)
      if (graph.incidence(i, j)) pairs.emplace_back(i, j);
  return pairs;
}

namespace detail {

// Iterative three-colour DFS; self-loops are reported separately.
inline bool has_cycle(const LaneGraph& graph) {
  const std::size_t n = graph.size();
  std::vector<int> colour(n, 0);
  for (std::size_t root = 0; root < n; ++root) {
    if (colour[root] != 0) continue;
    std::vector<std::pair<std::size_t, std::size_t>> stack{{root, 0}};
    colour[root] = 1;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      if (next == n) {
        colour[node] = 2;
        stack.pop_back();
        continue;
      }
      const std::size_t j = next++;
      if (j == node || !graph.incidence(node, j)) continue;
      if (colour[j] == 1) return true;
      if (colour[j] == 0) {
        colour[j] = 1;
        stack.emplace_back(j, 0);
      }
    }
  }
  return false;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

inline std::size_t endpoint_node(std::size_t curve, EndpointKind kind) {
  return 2 * curve + (kind == EndpointKind::kEnd ? 1 : 0);
}

inline Vec2& endpoint(LaneGraph& g, const JunctionMember& m) {
  auto& cps = g.centerlines[m.centerline].control_points;
  return m.kind == EndpointKind::kStart ? cps.front() : cps.back();
}

inline const Vec2& endpoint(const LaneGraph& g, const JunctionMember& m) {
  const auto& cps = g.centerlines[m.centerline].control_points;
  return m.kind == EndpointKind::kStart ? cps.front() : cps.back();
}

}  // namespace detail

inline std::vector<Diagnostic> validate(const LaneGraph& graph, const ValidateOptions& options = {}) {
  std::vector<Diagnostic> out;
  const std::size_t n = graph.size();
  const auto& inc = graph.incidence;
  auto report = [&out](Severity s, DiagnosticKind k, std::string msg) {
    out.push_back({s, k, std::move(msg)});
  };

  if (inc.rows() != n || inc.cols() != n) {
    std::ostringstream os;
    os << "incidence is " << inc.rows() << "x" << inc.cols() << " but graph has " << n
       << " centerlines";
    report(Severity::kError, DiagnosticKind::kNonSquare, os.str());
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (graph.centerlines[i].size() < 2) {
      report(Severity::kError, DiagnosticKind::kMalformedCurve,
             "centerline " + std::to_string(i) + " has fewer than 2 control points");
    }
  }
  if (!graph.scores.empty()) {
    if (graph.scores.size() != n) {
      report(Severity::kError, DiagnosticKind::kScores, "score count does not match centerlines");
    } else {
      for (std::size_t i = 0; i < n; ++i) {
        if (!(graph.scores[i] >= 0.0 && graph.scores[i] <= 1.0)) {
          report(Severity::kError, DiagnosticKind::kScores,
                 "score of centerline " + std::to_string(i) + " outside [0, 1]");
        }
      }
    }
  }
  for (const auto& [key, p] : graph.edge_scores) {
    if (key.first >= n || key.second >= n || !inc(key.first, key.second) || !(p >= 0.0 && p <= 1.0)) {
      report(Severity::kError, DiagnosticKind::kScores,
             "edge score for (" + std::to_string(key.first) + ", " + std::to_string(key.second) +
                 ") does not belong to an edge or lies outside [0, 1]");
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (inc(i, i)) {
      report(Severity::kError, DiagnosticKind::kDiagonal,
             "self-loop on centerline " + std::to_string(i));
    }
  }
  if (options.ground_truth) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (inc(i, j) && inc(j, i)) {
          report(Severity::kError, DiagnosticKind::kMutualEdge,
                 "mutual edge between " + std::to_string(i) + " and " + std::to_string(j));
        }
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j || !inc(i, j)) continue;
        if (graph.centerlines[i].size() < 2 || graph.centerlines[j].size() < 2) continue;
        const double gap = distance(graph.centerlines[i].back(), graph.centerlines[j].front());
        if (gap > options.endpoint_tolerance) {
          std::ostringstream os;
          os << "edge (" << i << ", " << j << "): end of " << i << " is " << gap
             << " away from start of " << j;
          report(Severity::kError, DiagnosticKind::kEndpointMismatch, os.str());
        }
      }
    }
  }
  if (detail::has_cycle(graph)) {
    report(Severity::kInfo, DiagnosticKind::kCycle, "graph contains a directed cycle");
  }
  return out;
}

/**
 * @brief Endpoint groups induced by the incidence matrix.
 *
 * Every edge (i, j) ties the end of i to the start of j; junctions are the
 * connected components of that relation. Members are listed in
 * (centerline, start-before-end) order and the location is their mean.
 */
inline std::vector<Junction> find_junctions(const LaneGraph& graph) {
  const std::size_t n = graph.size();
  detail::DisjointSets sets(2 * n);
  std::vector<bool> touched(2 * n, false);
  for (const auto& [i, j] : connected_pairs(graph)) {
    if (i == j) continue;
    const std::size_t a = detail::endpoint_node(i, EndpointKind::kEnd);
    const std::size_t b = detail::endpoint_node(j, EndpointKind::kStart);
    sets.unite(a, b);
    touched[a] = touched[b] = true;
  }

  std::map<std::size_t, Junction> by_root;
  for (std::size_t node = 0; node < 2 * n; ++node) {
    if (!touched[node]) continue;
    by_root[sets.find(node)].members.push_back(
        {node / 2, node % 2 == 0 ? EndpointKind::kStart : EndpointKind::kEnd});
  }

  std::vector<Junction> junctions;
  for (auto& [root, junction] : by_root) {
    if (junction.members.size() < 2) continue;
    // Mean taken as offsets from the first member so that coincident
    // members reproduce their common location bit for bit.
    const Vec2 anchor = detail::endpoint(graph, junction.members.front());
    Vec2 offset;
    for (const auto& m : junction.members) offset += detail::endpoint(graph, m) - anchor;
    junction.location = anchor + offset * (1.0 / static_cast<double>(junction.members.size()));
    junctions.push_back(std::move(junction));
  }
  return junctions;
}

/// Snaps every junction's member endpoints onto the junction mean. The
/// incidence matrix is left untouched.
inline LaneGraph merge_junctions(const LaneGraph& graph) {
  LaneGraph merged = graph;
  for (const Junction& j : find_junctions(graph)) {
    for (const auto& m : j.members) detail::endpoint(merged, m) = j.location;
  }
  return merged;
}

inline std::set<std::size_t> subgraph_reachable(const LaneGraph& graph, std::size_t start) {
  if (start >= graph.size()) {
    throw DomainError("subgraph_reachable: start " + std::to_string(start) + " out of range for " +
                      std::to_string(graph.size()) + " centerlines");
  }
  std::set<std::size_t> seen{start};
  std::vector<std::size_t> frontier{start};
  while (!frontier.empty()) {
    const std::size_t node = frontier.back();
    frontier.pop_back();
    for (std::size_t j = 0; j < graph.size(); ++j) {
      if (graph.incidence(node, j) && seen.insert(j).second) frontier.push_back(j);
    }
  }
  return seen;
}

/// Graph restricted to `keep` (in the given order); edges between kept
/// centerlines survive.
inline LaneGraph induced_subgraph(const LaneGraph& graph, std::span<const std::size_t> keep) {
  LaneGraph out;
  out.incidence = IncidenceMatrix(keep.size());
  std::map<std::size_t, std::size_t> index;
  for (std::size_t k = 0; k < keep.size(); ++k) {
    out.centerlines.push_back(graph.centerlines.at(keep[k]));
    if (!graph.scores.empty()) out.scores.push_back(graph.scores.at(keep[k]));
    index[keep[k]] = k;
  }
  for (std::size_t a = 0; a < keep.size(); ++a) {
    for (std::size_t b = 0; b < keep.size(); ++b) {
      if (!graph.incidence(keep[a], keep[b])) continue;
      out.incidence.set(a, b);
      auto it = graph.edge_scores.find({keep[a], keep[b]});
      if (it != graph.edge_scores.end()) out.edge_scores[{a, b}] = it->second;
    }
  }
  return out;
}

/// Every centerline reversed and every edge flipped: the same geometry
/// with opposite traffic direction.
inline LaneGraph reverse_graph(const LaneGraph& graph) {
  LaneGraph out;
  for (const auto& c : graph.centerlines) out.centerlines.push_back(reverse(c));
  out.incidence = graph.incidence.transposed();
  out.scores = graph.scores;
  for (const auto& [key, p] : graph.edge_scores) out.edge_scores[{key.second, key.first}] = p;
  return out;
}

/**
 * @brief Hard graph from soft scores: centerlines with score below
 * `detection_threshold` are dropped, then edges with association score below
 * `association_threshold`. Missing scores count as certain.
 */
inline LaneGraph activate(const LaneGraph& graph, double detection_threshold,
                          double association_threshold) {
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < graph.size(); ++i) {
    if (graph.scores.empty() || graph.scores[i] >= detection_threshold) keep.push_back(i);
  }
  LaneGraph out = induced_subgraph(graph, keep);
  for (const auto& [key, p] : out.edge_scores) {
    if (p < association_threshold) out.incidence.set(key.first, key.second, false);
  }
  out.scores.clear();
  out.edge_scores.clear();
  return out;
}

}  // namespace lanegraph

#endif  // LANEGRAPH_LANE_GRAPH_HPP_
