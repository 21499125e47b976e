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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vifi/fitting.hpp"
#include "vifi/geometry.hpp"
#include "vifi/measurements.hpp"
#include "vifi/propagation.hpp"

namespace vifi {

/// Stand-in value for an AP that was not detected.
inline constexpr double kDefaultSentinelDbm = -100.0;
/// Predicted values below this are recorded as not detected.
inline constexpr double kDefaultDetectionFloorDbm = -95.0;

/// RSS per AP, aligned to the radiomap AP order; non-detections hold the
/// sentinel value.
using Fingerprint = Eigen::VectorXd;

enum class RpKind { real, virtual_rp };

std::string_view to_string(RpKind kind);
RpKind parse_rp_kind(std::string_view name);

struct ReferencePoint {
  std::string id;
  Point3 position = Point3::Zero();
  Fingerprint rss;
  RpKind kind = RpKind::real;
};

/// Fingerprint database. Densities follow from the RP counts and the area.
struct Radiomap {
  std::vector<AccessPoint> aps;
  std::vector<ReferencePoint> rps;
  double sentinel_dbm = kDefaultSentinelDbm;
  double area_m2 = 0.0;

  std::size_t size() const { return rps.size(); }
  std::size_t real_count() const;
  std::size_t virtual_count() const;
  double d_real() const { return static_cast<double>(real_count()) / area_m2; }
  double d_virtual() const { return static_cast<double>(virtual_count()) / area_m2; }
};

Radiomap make_radiomap(std::vector<AccessPoint> aps, std::vector<ReferencePoint> real,
                       std::vector<ReferencePoint> virtual_rps, double area_m2,
                       double sentinel_dbm = kDefaultSentinelDbm);

/// Scan-averaged fingerprint per surveyed location, in order of first
/// appearance. APs never detected at a location get the sentinel.
std::vector<ReferencePoint> build_real_fingerprints(const MeasurementSet& meas,
                                                    std::span<const AccessPoint> aps,
                                                    double sentinel_dbm = kDefaultSentinelDbm);

/// Number of points for a density over an area: ceil(d |A|), robust to
/// representation error in the product.
std::size_t count_for_density(double density, double area_m2);

/// Visiting order of farthest-point decimation: starts at the point closest
/// to `start` and repeatedly takes the point farthest from those chosen.
/// Ties go to the lower index.
std::vector<std::size_t> farthest_point_order(std::span<const Point3> points, const Point2& start);

/// Indices of the ceil(rho N) points chosen first by farthest-point
/// decimation seeded at the bounds centroid. Nested in rho.
std::vector<std::size_t> select_rp_indices(std::span<const Point3> points, double rho,
                                           const Bounds& area);

std::vector<ReferencePoint> select_rps(std::span<const ReferencePoint> all, double rho,
                                       const Bounds& area);

/// Exactly `n` points on a regular cell-centred lattice covering `bounds`.
/// A full nx-by-ny lattice close to the bounds' aspect ratio is built and
/// surplus points are dropped at evenly spread indices.
std::vector<Point3> lattice_points(const Bounds& bounds, std::size_t n, double z);

enum class PlacementKind { grid, random };

struct Placement {
  PlacementKind kind = PlacementKind::grid;
  std::uint64_t seed = 0;
  double z = 1.0;  ///< device height of the virtual RPs
};

/// ceil(d_virtual |A|) virtual RP positions, on a lattice or i.i.d. uniform.
std::vector<Point3> place_virtual_rps(const Floorplan& plan, double d_virtual,
                                      const Placement& placement);

/// Model-predicted fingerprints; values below the detection floor become the
/// sentinel.
std::vector<ReferencePoint> generate_virtual_fingerprints(
    const FitResult& fit, ModelKind model, const Floorplan& plan, std::span<const AccessPoint> aps,
    std::span<const Point3> positions, double sentinel_dbm = kDefaultSentinelDbm,
    double detection_floor_dbm = kDefaultDetectionFloorDbm);

}  // namespace vifi
