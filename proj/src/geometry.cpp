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

#include "vifi/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "vifi/errors.hpp"

namespace vifi {

std::string_view to_string(ObstacleFamily family) {
  switch (family) {
    case ObstacleFamily::wall:
      return "wall";
    case ObstacleFamily::door:
      return "door";
  }
  return "unknown";
}

ObstacleFamily parse_family(std::string_view name) {
  if (name == "wall") return ObstacleFamily::wall;
  if (name == "door") return ObstacleFamily::door;
  throw InvalidGeometry("unknown obstacle family '" + std::string(name) + "'");
}

std::string class_key(const ObstacleClass& cls) {
  std::string key(to_string(cls.family));
  if (cls.type_index != 1) key += ":" + std::to_string(cls.type_index);
  return key;
}

ObstacleClass parse_class_key(std::string_view key) {
  const auto colon = key.find(':');
  ObstacleClass cls;
  cls.family = parse_family(key.substr(0, colon));
  if (colon != std::string_view::npos) {
    cls.type_index = std::stoi(std::string(key.substr(colon + 1)));
    if (cls.type_index < 1) throw InvalidGeometry("obstacle type index must be >= 1");
  }
  return cls;
}

bool Bounds::contains(const Point3& p, double tol) const {
  return p.x() >= min_x - tol && p.x() <= max_x + tol && p.y() >= min_y - tol &&
         p.y() <= max_y + tol;
}

Floorplan::Floorplan(Bounds bounds, std::vector<double> floors,
                     std::vector<PlanarObstacle> obstacles)
    : bounds_(bounds), floors_(std::move(floors)), obstacles_(std::move(obstacles)) {
  if (!(bounds_.width() > 0) || !(bounds_.height() > 0) || !std::isfinite(bounds_.area()))
    throw InvalidGeometry("floorplan bounds must have positive finite area");
  if (floors_.empty()) throw InvalidGeometry("floorplan needs at least one floor plane");
  for (std::size_t i = 1; i < floors_.size(); ++i)
    if (!(floors_[i] > floors_[i - 1]))
      throw InvalidGeometry("floor heights must be strictly increasing");
  for (const auto& o : obstacles_) {
    if (o.floor < 0 || o.floor >= static_cast<int>(floors_.size()))
      throw InvalidGeometry("obstacle references floor " + std::to_string(o.floor) +
                            " which does not exist");
    if ((o.a - o.b).norm() <= kGrazingTolerance)
      throw InvalidGeometry("obstacle endpoints must be distinct");
    if (o.cls.type_index < 1) throw InvalidGeometry("obstacle type index must be >= 1");
    if (!o.a.allFinite() || !o.b.allFinite())
      throw InvalidGeometry("obstacle coordinates must be finite");
  }
}

int Floorplan::floor_of(double z) const {
  const auto it = std::upper_bound(floors_.begin(), floors_.end(), z);
  if (it == floors_.begin()) return 0;
  return static_cast<int>(std::distance(floors_.begin(), it)) - 1;
}

std::vector<ObstacleClass> Floorplan::obstacle_classes() const {
  std::set<ObstacleClass> seen;
  for (const auto& o : obstacles_) seen.insert(o.cls);
  return {seen.begin(), seen.end()};
}

Floorplan Floorplan::translated(const Point3& offset) const {
  Bounds b{bounds_.min_x + offset.x(), bounds_.min_y + offset.y(), bounds_.max_x + offset.x(),
           bounds_.max_y + offset.y()};
  std::vector<double> floors = floors_;
  for (auto& z : floors) z += offset.z();
  std::vector<PlanarObstacle> obstacles = obstacles_;
  const Point2 shift = offset.head<2>();
  for (auto& o : obstacles) {
    o.a += shift;
    o.b += shift;
  }
  return Floorplan(b, std::move(floors), std::move(obstacles));
}

int ObstructionCount::total_2d() const {
  int total = 0;
  for (const auto& [cls, n] : counts) total += n;
  return total;
}

ObstructionCount operator+(const ObstructionCount& lhs, const ObstructionCount& rhs) {
  ObstructionCount out = lhs;
  for (const auto& [cls, n] : rhs.counts) out.counts[cls] += n;
  out.floors_crossed += rhs.floors_crossed;
  return out;
}

double link_distance(const Point3& tx, const Point3& rx) {
  const double d = (rx - tx).norm();
  if (!(d > 0)) throw InvalidGeometry("transmitter and receiver coincide");
  return d;
}

namespace {

// Signed distance of p from the oriented line through a and b.
double side(const Point2& a, const Point2& b, const Point2& p) {
  const Point2 ab = b - a;
  const double cross = ab.x() * (p.y() - a.y()) - ab.y() * (p.x() - a.x());
  return cross / ab.norm();
}

bool strictly_opposite(double s1, double s2) {
  return std::abs(s1) > kGrazingTolerance && std::abs(s2) > kGrazingTolerance &&
         ((s1 < 0) != (s2 < 0));
}

}  // namespace

bool segments_cross(const Point2& p, const Point2& q, const Point2& a, const Point2& b) {
  if ((q - p).norm() <= kGrazingTolerance) return false;
  return strictly_opposite(side(a, b, p), side(a, b, q)) &&
         strictly_opposite(side(p, q, a), side(p, q, b));
}

ObstructionCount count_obstructions(const Floorplan& plan, const Point3& tx, const Point3& rx) {
  if (!tx.allFinite() || !rx.allFinite()) throw InvalidGeometry("non-finite link endpoint");
  if ((tx - rx).norm() <= 0) throw InvalidGeometry("transmitter and receiver coincide");
  if (!plan.bounds().contains(tx) || !plan.bounds().contains(rx))
    throw InvalidGeometry("link endpoint outside floorplan bounds");

  ObstructionCount out;
  const double z_lo = std::min(tx.z(), rx.z());
  const double z_hi = std::max(tx.z(), rx.z());
  for (double plane : plan.floors())
    if (plane > z_lo && plane < z_hi) ++out.floors_crossed;

  const int f_lo = plan.floor_of(z_lo);
  const int f_hi = plan.floor_of(z_hi);
  const Point2 p = tx.head<2>();
  const Point2 q = rx.head<2>();
  for (const auto& o : plan.obstacles()) {
    if (o.floor < f_lo || o.floor > f_hi) continue;
    if (segments_cross(p, q, o.a, o.b)) ++out.counts[o.cls];
  }
  return out;
}

}  // namespace vifi
