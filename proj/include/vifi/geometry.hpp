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

#pragma once

#include <compare>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace vifi {

using Point3 = Eigen::Vector3d;
using Point2 = Eigen::Vector2d;

/// Links touching an obstacle within this distance do not count as crossings.
inline constexpr double kGrazingTolerance = 1e-9;

enum class ObstacleFamily { wall = 1, door = 2 };

std::string_view to_string(ObstacleFamily family);
ObstacleFamily parse_family(std::string_view name);

/// Family n and type i of a 2D obstructing object.
struct ObstacleClass {
  ObstacleFamily family = ObstacleFamily::wall;
  int type_index = 1;

  auto operator<=>(const ObstacleClass&) const = default;
};

inline constexpr ObstacleClass kWall{ObstacleFamily::wall, 1};
inline constexpr ObstacleClass kDoor{ObstacleFamily::door, 1};

/// "wall" for type 1, "wall:2" otherwise.
std::string class_key(const ObstacleClass& cls);
ObstacleClass parse_class_key(std::string_view key);

/// A wall or door footprint: a 2D segment living on one floor.
struct PlanarObstacle {
  Point2 a;
  Point2 b;
  int floor = 0;
  ObstacleClass cls;
};

struct Bounds {
  double min_x = 0, min_y = 0, max_x = 0, max_y = 0;

  double width() const { return max_x - min_x; }
  double height() const { return max_y - min_y; }
  double area() const { return width() * height(); }
  Point2 centroid() const { return {0.5 * (min_x + max_x), 0.5 * (min_y + max_y)}; }
  bool contains(const Point3& p, double tol = kGrazingTolerance) const;
};

/// Indoor environment: bounds, floor planes and per-floor 2D obstacles.
///
/// Floor planes are the z-heights of each floor's slab, strictly increasing.
/// A point belongs to the highest floor whose plane is at or below it
/// (floor 0 when it lies below every plane).
class Floorplan {
 public:
  Floorplan() = default;
  /// Throws InvalidGeometry when an invariant is violated.
  Floorplan(Bounds bounds, std::vector<double> floors, std::vector<PlanarObstacle> obstacles);

  const Bounds& bounds() const { return bounds_; }
  double area() const { return bounds_.area(); }
  const std::vector<double>& floors() const { return floors_; }
  const std::vector<PlanarObstacle>& obstacles() const { return obstacles_; }

  int floor_of(double z) const;
  /// Distinct obstacle classes present in the plan, ordered.
  std::vector<ObstacleClass> obstacle_classes() const;

  /// Same plan shifted by `offset` (floors by offset.z()).
  Floorplan translated(const Point3& offset) const;

 private:
  Bounds bounds_;
  std::vector<double> floors_{0.0};
  std::vector<PlanarObstacle> obstacles_;
};

/// Topological parameters of one link: N_{n,i} per class and N_f.
struct ObstructionCount {
  std::map<ObstacleClass, int> counts;
  int floors_crossed = 0;

  int count(const ObstacleClass& cls) const {
    auto it = counts.find(cls);
    return it == counts.end() ? 0 : it->second;
  }
  int total_2d() const;

  bool operator==(const ObstructionCount&) const = default;
};

ObstructionCount operator+(const ObstructionCount& lhs, const ObstructionCount& rhs);

/// Euclidean 3D distance. Throws InvalidGeometry for coincident points.
double link_distance(const Point3& tx, const Point3& rx);

/// True when segment pq strictly crosses segment ab (grazing excluded).
bool segments_cross(const Point2& p, const Point2& q, const Point2& a, const Point2& b);

/// Obstacles crossed by the tx-rx link and floor planes strictly between
/// the endpoints. Same-floor links only see that floor's obstacles; links
/// spanning floors see the union of the traversed floors' obstacles.
ObstructionCount count_obstructions(const Floorplan& plan, const Point3& tx, const Point3& rx);

}  // namespace vifi
