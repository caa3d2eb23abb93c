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

#ifndef LANEGRAPH_HARNESS_SYNTH_HPP_
#define LANEGRAPH_HARNESS_SYNTH_HPP_

// Synthetic scenes for tests and demos. Randomness comes from mt19937_64,
// whose output sequence is fixed by the standard; the distributions are
// written out here because the library ones are implementation-defined.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <numbers>
#include <random>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "lanegraph/harness/scene.hpp"

namespace lanegraph {

struct SynthConfig {
  int min_lanes = 4;
  int max_lanes = 10;
  double junction_prob = 0.3;  // chance of a fork at each segment end
  double noise = 0.0;          // control-point sigma, normalized units
  double drop_prob = 0.0;
  double fp_rate = 0.0;    // expected spurious lines per ground-truth line
  double flip_rate = 0.0;  // per off-diagonal incidence entry
  double offset = 0.0;     // shift of every predicted line along its left normal
  bool straight = false;  // straight roads in separate columns, no forks
  int min_objects = 0;
  int max_objects = 6;

  friend bool operator==(const SynthConfig&, const SynthConfig&) = default;
};

inline Json synth_config_to_json(const SynthConfig& c) {
  return Json{{"min_lanes", c.min_lanes},   {"max_lanes", c.max_lanes},     {"junction_prob", c.junction_prob},
              {"noise", c.noise},           {"drop_prob", c.drop_prob},     {"fp_rate", c.fp_rate},
              {"flip_rate", c.flip_rate},   {"offset", c.offset},           {"straight", c.straight},
              {"min_objects", c.min_objects}, {"max_objects", c.max_objects}};
}

/// Missing keys keep their defaults; unknown keys are rejected.
inline SynthConfig synth_config_from_json(const Json& j) {
  if (!j.is_object()) throw ValidationError("synth config: expected an object");
  SynthConfig c;
  const Json known = synth_config_to_json(c);
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw ValidationError("synth config: unknown key \"" + key + "\"");
  }
  auto get = [&j](const char* key, auto& slot) {
    if (j.contains(key)) slot = detail::field<std::decay_t<decltype(slot)>>(j, key, "synth config");
  };
  get("min_lanes", c.min_lanes);
  get("max_lanes", c.max_lanes);
  get("junction_prob", c.junction_prob);
  get("noise", c.noise);
  get("drop_prob", c.drop_prob);
  get("fp_rate", c.fp_rate);
  get("flip_rate", c.flip_rate);
  get("offset", c.offset);
  get("straight", c.straight);
  get("min_objects", c.min_objects);
  get("max_objects", c.max_objects);
  if (c.min_lanes < 0 || c.max_lanes < c.min_lanes || c.min_objects < 0 || c.max_objects < c.min_objects) {
    throw ValidationError("synth config: bad lane or object range");
  }
  for (double p : {c.junction_prob, c.drop_prob, c.flip_rate}) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("synth config: probabilities must lie in [0, 1]");
  }
  if (!(c.noise >= 0.0) || !(c.fp_rate >= 0.0)) throw ValidationError("synth config: negative rate");
  return c;
}

namespace detail {

class SynthRng {
 public:
  SynthRng(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    engine_.seed(seq);
  }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  int integer(int lo, int hi) { return lo + static_cast<int>(uniform() * (hi - lo + 1)); }
  bool bernoulli(double p) { return uniform() < p; }

  double normal() {
    // Box-Muller; 1 - u keeps the log argument away from zero.
    const double u = 1.0 - uniform(), v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  }

 private:
  std::mt19937_64 engine_;
};

inline constexpr double kSynthMargin = 0.02;

inline Vec2 clamp_inside(Vec2 p) {
  return {std::clamp(p.x, kSynthMargin, 1.0 - kSynthMargin), std::clamp(p.y, kSynthMargin, 1.0 - kSynthMargin)};
}

inline BezierCurve synth_curve(SynthRng& rng, Vec2 from, Vec2 to, bool straight) {
  Vec2 mid = (from + to) * 0.5;
  if (!straight) {
    const Vec2 d = to - from;
    const Vec2 left{-d.y, d.x};
    mid = clamp_inside(mid + left * rng.uniform(-0.25, 0.25));
  }
  return BezierCurve{{from, mid, to}};
}

inline LaneGraph synth_graph(SynthRng& rng, const SynthConfig& cfg) {
  const int target = rng.integer(cfg.min_lanes, cfg.max_lanes);
  LaneGraph g = make_graph({});
  const double top = 1.0 - kSynthMargin;
  // Straight scenes keep roads in separate columns so a lateral offset never
  // brings a prediction closer to a neighbouring road than to its own.
  std::vector<double> columns;
  if (cfg.straight) {
    for (double x = 0.1; x < 0.95; x += 0.15) columns.push_back(x);
  }
  int guard = 0;
  while (static_cast<int>(g.size()) < target && guard++ < 10 * (target + 1)) {
    if (cfg.straight && columns.empty()) break;
    // One road: a chain of segments heading away from the ego vehicle.
    Vec2 at{rng.uniform(0.1, 0.9), rng.uniform(kSynthMargin, 0.4)};
    if (cfg.straight) {
      const auto k = static_cast<std::size_t>(rng.integer(0, static_cast<int>(columns.size()) - 1));
      at.x = columns[k];
      columns.erase(columns.begin() + static_cast<std::ptrdiff_t>(k));
    }
    const int segments = rng.integer(1, 3);
    std::optional<std::size_t> prev;
    for (int s = 0; s < segments && static_cast<int>(g.size()) < target; ++s) {
      const double drift = cfg.straight ? 0.0 : rng.uniform(-0.1, 0.1);
      const Vec2 next = clamp_inside({at.x + drift, at.y + rng.uniform(0.15, 0.3)});
      if (next.y - at.y < 0.05) break;
      const std::size_t idx = g.add(synth_curve(rng, at, next, cfg.straight));
      if (prev) g.connect(*prev, idx);
      prev = idx;
      at = next;
      if (!cfg.straight && static_cast<int>(g.size()) < target && at.y < top - 0.1 &&
          rng.bernoulli(cfg.junction_prob)) {
        // Fork off to one side.
        const double side = rng.bernoulli(0.5) ? 1.0 : -1.0;
        const Vec2 end = clamp_inside({at.x + side * rng.uniform(0.08, 0.2), at.y + rng.uniform(0.08, 0.2)});
        if (distance(end, at) > 0.05) g.connect(idx, g.add(synth_curve(rng, at, end, cfg.straight)));
      }
    }
  }
  return g;
}

// Typical footprint in meters: long, short.
inline constexpr std::array<std::pair<double, double>, kNumObjectClasses> kClassSizes{
    {{4.6, 1.9}, {7.5, 2.5}, {11.0, 2.9}, {0.7, 0.6}, {1.8, 0.6}, {2.1, 0.8}}};

inline std::vector<OrientedBox> synth_objects(SynthRng& rng, const SynthConfig& cfg, const RoiSpec& roi) {
  std::vector<OrientedBox> out;
  const int n = rng.integer(cfg.min_objects, cfg.max_objects);
  for (int k = 0; k < n; ++k) {
    const auto label = static_cast<std::size_t>(rng.integer(0, static_cast<int>(kNumObjectClasses) - 1));
    const auto [l, s] = kClassSizes[label];
    const double scale = 1.0 / std::max(roi.width(), roi.depth());
    out.push_back(make_box({rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)}, l * scale, s * scale,
                           rng.uniform(0.0, std::numbers::pi), label));
  }
  return out;
}

inline BezierCurve perturb(const BezierCurve& c, SynthRng& rng, const SynthConfig& cfg) {
  BezierCurve out = c;
  Vec2 shift;
  if (cfg.offset != 0.0) {
    const Vec2 d = c.back() - c.front();
    shift = Vec2{-d.y, d.x} * (cfg.offset / norm(d));
  }
  for (Vec2& p : out.control_points) {
    p += shift;
    if (cfg.noise > 0.0) p += Vec2{rng.normal(), rng.normal()} * cfg.noise;
  }
  return out;
}

}  // namespace detail

struct SynthPair {
  SceneRecord gt;
  SceneRecord pred;
};

/**
 * @brief Deterministic ground-truth / prediction pair for `seed`.
 *
 * The prediction is the ground truth with lines dropped, control points
 * shifted and jittered, spurious lines appended and incidence bits flipped,
 * each at the configured rate. Objects get the same drop and jitter.
 */
inline SynthPair synth_scene(std::uint64_t seed, const SynthConfig& cfg, const std::string& id = {}) {
  detail::SynthRng rng(seed, 0);
  SynthPair out;
  SceneRecord& gt = out.gt;
  gt.id = id.empty() ? "synth-" + std::to_string(seed) : id;
  gt.traffic_side = seed % 2 == 0 ? TrafficSide::kRight : TrafficSide::kLeft;
  gt.graph = detail::synth_graph(rng, cfg);
  gt.objects = detail::synth_objects(rng, cfg, gt.roi);

  // A second stream so prediction rates do not reshape the ground truth.
  detail::SynthRng prng(seed, 1);
  SceneRecord& pred = out.pred;
  pred.id = gt.id;
  pred.traffic_side = gt.traffic_side;
  pred.camera = gt.camera;
  pred.roi = gt.roi;

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < gt.graph.size(); ++i) {
    if (!prng.bernoulli(cfg.drop_prob)) keep.push_back(i);
  }
  pred.graph = induced_subgraph(gt.graph, keep);
  for (auto& c : pred.graph.centerlines) c = detail::perturb(c, prng, cfg);

  const std::size_t n_gt = gt.graph.size();
  for (std::size_t i = 0; i < n_gt; ++i) {
    if (prng.bernoulli(std::min(cfg.fp_rate, 1.0))) {
      const Vec2 a{prng.uniform(0.1, 0.9), prng.uniform(0.05, 0.7)};
      const Vec2 b = detail::clamp_inside({a.x + prng.uniform(-0.1, 0.1), a.y + prng.uniform(0.1, 0.3)});
      pred.graph.add(detail::synth_curve(prng, a, b, cfg.straight));
    }
  }
  if (cfg.flip_rate > 0.0) {
    for (std::size_t i = 0; i < pred.graph.size(); ++i)
      for (std::size_t j = 0; j < pred.graph.size(); ++j)
        if (i != j && prng.bernoulli(cfg.flip_rate)) pred.graph.incidence.set(i, j, !pred.graph.incidence(i, j));
  }

  for (const auto& b : gt.objects) {
    if (prng.bernoulli(cfg.drop_prob)) continue;
    OrientedBox p = b;
    if (cfg.noise > 0.0) p.center += Vec2{prng.normal(), prng.normal()} * cfg.noise;
    pred.objects.push_back(std::move(p));
  }
  return out;
}

/// `count` scenes with seeds seed, seed+1, ...
inline std::pair<std::vector<SceneRecord>, std::vector<SceneRecord>> synth_dataset(std::uint64_t seed,
                                                                                   std::size_t count,
                                                                                   const SynthConfig& cfg) {
  std::vector<SceneRecord> gt, pred;
  for (std::size_t k = 0; k < count; ++k) {
    char id[32];
    std::snprintf(id, sizeof id, "scene-%04zu", k);
    SynthPair p = synth_scene(seed + k, cfg, id);
    gt.push_back(std::move(p.gt));
    pred.push_back(std::move(p.pred));
  }
  return {std::move(gt), std::move(pred)};
}

}  // namespace lanegraph

#endif  // LANEGRAPH_HARNESS_SYNTH_HPP_
