// Copyright 2026 The ViFi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Independent oracles and small fixtures shared by the unit and acceptance tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vifi/geometry.hpp"
#include "vifi/measurements.hpp"
#include "vifi/propagation.hpp"
#include "vifi/evaluation.hpp"
#include "vifi/radiomap.hpp"
#include "vifi/simulator.hpp"

namespace vifi::testing {

/// Counts crossings of the link p->q with segment ab by marching `samples` steps
/// along the link and looking for sign changes of the side-of-line test.
inline int sampled_crossings(const Point2& p, const Point2& q, const Point2& a, const Point2& b,
                             int samples = 100000) {
  const Point2 ab = b - a;
  auto side = [&](const Point2& x) { return ab.x() * (x.y() - a.y()) - ab.y() * (x.x() - a.x()); };
  int count = 0;
  double prev = side(p);
  for (int i = 1; i <= samples; ++i) {
    const Point2 x = p + (q - p) * (static_cast<double>(i) / samples);
    const double s = side(x);
    if ((prev < 0 && s > 0) || (prev > 0 && s < 0)) {
      const double u = (x - a).dot(ab) / ab.squaredNorm();
      if (u > 0 && u < 1) ++count;
    }
    if (s != 0) prev = s;
  }
  return count;
}

/// Distance from x to segment ab.
inline double point_segment_distance(const Point2& x, const Point2& a, const Point2& b) {
  const Point2 ab = b - a;
  const double t = std::clamp((x - a).dot(ab) / ab.squaredNorm(), 0.0, 1.0);
  return (a + t * ab - x).norm();
}

/// True if the link passes within `margin` of an obstacle endpoint or has an endpoint
/// within `margin` of an obstacle; such links are near-grazing and skipped by oracle checks.
inline bool near_grazing(const Point2& p, const Point2& q, const PlanarObstacle& o, double margin) {
  return point_segment_distance(o.a, p, q) < margin || point_segment_distance(o.b, p, q) < margin ||
         point_segment_distance(p, o.a, o.b) < margin || point_segment_distance(q, o.a, o.b) < margin;
}

inline Floorplan random_plan(std::mt19937_64& rng, int obstacles, double size = 20.0) {
  std::uniform_real_distribution<double> u(0.0, size);
  std::bernoulli_distribution door(0.3);
  std::vector<PlanarObstacle> obs;
  for (int i = 0; i < obstacles; ++i) {
    Point2 a(u(rng), u(rng)), b(u(rng), u(rng));
    while ((a - b).norm() < 0.5) b = Point2(u(rng), u(rng));
    obs.push_back({a, b, 0, door(rng) ? kDoor : kWall});
  }
  return Floorplan(Bounds{0, 0, size, size}, {0.0}, std::move(obs));
}

/// RSS from the MWMF formula written out term by term.
inline double hand_rss(const AccessPoint& ap, const Point3& rx, const Floorplan& plan, double gamma,
                       double l_c, double wall, double door, double l0 = kFreeSpaceL0Db) {
  const double d = (rx - ap.position).norm();
  const auto obs = count_obstructions(plan, ap.position, rx);
  return ap.eirp_dbm - (l0 + 10.0 * gamma * std::log10(d) + l_c + obs.count(kWall) * wall +
                        obs.count(kDoor) * door);
}

/// A 20 x 10 m office: a horizontal wall with a door, two vertical partitions.
inline Floorplan office_plan() {
  std::vector<PlanarObstacle> obs{
      {{0.0, 5.0}, {9.0, 5.0}, 0, kWall},   {{9.0, 5.0}, {10.2, 5.0}, 0, kDoor},
      {{10.2, 5.0}, {20.0, 5.0}, 0, kWall}, {{7.0, 0.0}, {7.0, 5.0}, 0, kWall},
      {{13.0, 5.0}, {13.0, 10.0}, 0, kWall}, {{4.0, 5.0}, {4.0, 8.0}, 0, kWall},
      {{4.0, 8.0}, {4.0, 9.2}, 0, kDoor},
  };
  return Floorplan(Bounds{0, 0, 20, 10}, {0.0}, std::move(obs));
}

inline std::vector<AccessPoint> office_aps() {
  return {{"a", Point3(2.5, 2.5, 2.5), 20.0}, {"b", Point3(17.0, 8.0, 2.5), 18.0},
          {"c", Point3(10.0, 7.5, 2.5), 20.0}};
}

inline std::vector<Point3> grid_positions(double x0, double y0, double x1, double y1, int nx, int ny,
                                          double z = 1.0) {
  std::vector<Point3> out;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      out.emplace_back(x0 + (x1 - x0) * (i + 0.5) / nx, y0 + (y1 - y0) * (j + 0.5) / ny, z);
  return out;
}

/// One record per (position, AP, scan) with the value from `rss(ap_index, position)`.
template <typename Fn>
MeasurementSet make_measurements(const std::vector<AccessPoint>& aps,
                                 const std::vector<Point3>& positions, Fn&& rss, int scans = 1) {
  MeasurementSet meas;
  meas.q = scans;
  for (std::size_t n = 0; n < positions.size(); ++n)
    for (std::size_t l = 0; l < aps.size(); ++l)
      for (int s = 0; s < scans; ++s)
        meas.records.push_back({"rp" + std::to_string(n), positions[n], aps[l].id,
                                std::optional<double>(rss(l, positions[n], s)), s});
  return meas;
}

/// Exhaustive WkNN with a plain-loop distance of order 1 or 2: sorts every RP by
/// (similarity desc, index asc) and averages the top k.
inline Point3 brute_force_wknn(const Radiomap& map, const Fingerprint& target, int k, double cap,
                               int order = 2, std::vector<std::size_t>* chosen = nullptr) {
  std::vector<std::pair<double, std::size_t>> all;
  for (std::size_t n = 0; n < map.rps.size(); ++n) {
    double acc = 0;
    for (Eigen::Index l = 0; l < target.size(); ++l) {
      const double diff = map.rps[n].rss(l) - target(l);
      acc += order == 1 ? std::abs(diff) : diff * diff;
    }
    const double d = order == 1 ? acc : std::sqrt(acc);
    all.emplace_back(d == 0 ? cap : std::min(1.0 / d, cap), n);
  }
  std::sort(all.begin(), all.end(), [](const auto& x, const auto& y) {
    return x.first > y.first || (x.first == y.first && x.second < y.second);
  });
  Point3 num = Point3::Zero();
  double den = 0;
  for (int j = 0; j < k; ++j) {
    const auto& [s, n] = all[static_cast<std::size_t>(j)];
    num += s * map.rps[n].position;
    den += s;
    if (chosen) chosen->push_back(n);
  }
  return num / den;
}

inline Testbed make_testbed(const WorldSpec& world, const ScenarioPreset& preset) {
  const auto rps = survey_positions(world);
  const auto tps = random_tp_positions(world);
  Campaign c = simulate_campaign(world, rps, tps, preset);
  Testbed bed;
  bed.plan = world.plan;
  bed.aps = world.aps;
  bed.survey = std::move(c.survey);
  bed.test_points = std::move(c.test_points);
  bed.sentinel_dbm = world.sentinel_dbm;
  bed.detection_floor_dbm = world.detection_floor_dbm;
  bed.device_height_m = world.device_height_m;
  return bed;
}

}  // namespace vifi::testing
