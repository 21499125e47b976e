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

#include "vifi/radiomap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "vifi/errors.hpp"
#include "vifi/random.hpp"

namespace vifi {

std::string_view to_string(RpKind kind) { return kind == RpKind::real ? "real" : "virtual"; }

RpKind parse_rp_kind(std::string_view name) {
  if (name == "real") return RpKind::real;
  if (name == "virtual") return RpKind::virtual_rp;
  throw DomainError("unknown RP kind '" + std::string(name) + "'");
}

std::size_t Radiomap::real_count() const {
  return static_cast<std::size_t>(
      std::count_if(rps.begin(), rps.end(), [](const auto& rp) { return rp.kind == RpKind::real; }));
}

std::size_t Radiomap::virtual_count() const { return rps.size() - real_count(); }

Radiomap make_radiomap(std::vector<AccessPoint> aps, std::vector<ReferencePoint> real,
                       std::vector<ReferencePoint> virtual_rps, double area_m2,
                       double sentinel_dbm) {
  if (!(area_m2 > 0)) throw InvalidGeometry("radiomap area must be positive");
  Radiomap map;
  map.aps = std::move(aps);
  map.sentinel_dbm = sentinel_dbm;
  map.area_m2 = area_m2;
  map.rps = std::move(real);
  map.rps.insert(map.rps.end(), std::make_move_iterator(virtual_rps.begin()),
                 std::make_move_iterator(virtual_rps.end()));
  for (const auto& rp : map.rps)
    if (rp.rss.size() != static_cast<Eigen::Index>(map.aps.size()))
      throw DomainError("fingerprint length does not match the number of APs");
  return map;
}

std::vector<ReferencePoint> build_real_fingerprints(const MeasurementSet& meas,
                                                    std::span<const AccessPoint> aps,
                                                    double sentinel_dbm) {
  if (meas.records.empty()) throw InsufficientData("empty measurement set");
  std::unordered_map<std::string, Eigen::Index> ap_index;
  for (std::size_t i = 0; i < aps.size(); ++i)
    ap_index.emplace(aps[i].id, static_cast<Eigen::Index>(i));

  std::vector<ReferencePoint> out;
  for (const auto& loc : average_scans(meas)) {
    ReferencePoint rp{loc.id, loc.position,
                      Fingerprint::Constant(static_cast<Eigen::Index>(aps.size()), sentinel_dbm),
                      RpKind::real};
    for (const auto& [ap_id, rss] : loc.rss_by_ap) {
      auto it = ap_index.find(ap_id);
      if (it == ap_index.end())
        throw UnknownAccessPoint("measurement references unknown AP '" + ap_id + "'");
      if (rss) rp.rss(it->second) = *rss;
    }
    out.push_back(std::move(rp));
  }
  return out;
}

std::size_t count_for_density(double density, double area_m2) {
  const double raw = density * area_m2;
  return static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
}

std::vector<std::size_t> farthest_point_order(std::span<const Point3> points, const Point2& start) {
  const std::size_t n = points.size();
  std::vector<std::size_t> order;
  if (n == 0) return order;
  order.reserve(n);

  std::size_t first = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double d = (points[i].head<2>() - start).norm();
    if (d < best) {
      best = d;
      first = i;
    }
  }
  std::vector<double> gap(n, std::numeric_limits<double>::infinity());
  std::vector<bool> taken(n, false);
  std::size_t next = first;
  for (std::size_t step = 0; step < n; ++step) {
    order.push_back(next);
    taken[next] = true;
    std::size_t far = n;
    double far_d = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (taken[i]) continue;
      gap[i] = std::min(gap[i], (points[i] - points[next]).norm());
      if (gap[i] > far_d) {
        far_d = gap[i];
        far = i;
      }
    }
    next = far;
  }
  return order;
}

std::vector<std::size_t> select_rp_indices(std::span<const Point3> points, double rho,
                                           const Bounds& area) {
  if (!(rho > 0) || rho > 1) throw DomainError("rho must lie in (0, 1]");
  const std::size_t count = std::min(points.size(), count_for_density(rho, static_cast<double>(points.size())));
  auto order = farthest_point_order(points, area.centroid());
  order.resize(count);
  return order;
}

std::vector<ReferencePoint> select_rps(std::span<const ReferencePoint> all, double rho,
                                       const Bounds& area) {
  std::vector<Point3> positions;
  positions.reserve(all.size());
  for (const auto& rp : all) positions.push_back(rp.position);
  std::vector<ReferencePoint> out;
  for (std::size_t i : select_rp_indices(positions, rho, area)) out.push_back(all[i]);
  return out;
}

std::vector<Point3> lattice_points(const Bounds& bounds, std::size_t n, double z) {
  if (!(bounds.area() > 0)) throw InvalidGeometry("lattice over a zero-area region");
  std::vector<Point3> out;
  if (n == 0) return out;
  const double w = bounds.width();
  const double h = bounds.height();
  auto nx = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n) * w / h)));
  nx = std::clamp<std::size_t>(nx, 1, n);
  const std::size_t ny = (n + nx - 1) / nx;
  const std::size_t total = nx * ny;

  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t cell = i * total / n;
    const std::size_t row = cell / nx;
    const std::size_t col = cell % nx;
    out.emplace_back(bounds.min_x + (static_cast<double>(col) + 0.5) * w / static_cast<double>(nx),
                     bounds.min_y + (static_cast<double>(row) + 0.5) * h / static_cast<double>(ny),
                     z);
  }
  return out;
}

std::vector<Point3> place_virtual_rps(const Floorplan& plan, double d_virtual,
                                      const Placement& placement) {
  if (!(d_virtual > 0)) throw DomainError("virtual RP density must be positive");
  const Bounds& b = plan.bounds();
  const std::size_t n = count_for_density(d_virtual, plan.area());
  if (placement.kind == PlacementKind::grid) return lattice_points(b, n, placement.z);

  auto rng = make_rng(placement.seed, {0x7669727475616cULL});
  std::uniform_real_distribution<double> ux(b.min_x, b.max_x);
  std::uniform_real_distribution<double> uy(b.min_y, b.max_y);
  std::vector<Point3> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = ux(rng);
    const double y = uy(rng);
    out.emplace_back(x, y, placement.z);
  }
  return out;
}

std::vector<ReferencePoint> generate_virtual_fingerprints(
    const FitResult& fit, ModelKind model, const Floorplan& plan, std::span<const AccessPoint> aps,
    std::span<const Point3> positions, double sentinel_dbm, double detection_floor_dbm) {
  const Eigen::MatrixXd pred = predict_for_measurements(fit, model, plan, aps, positions);
  std::vector<ReferencePoint> out;
  out.reserve(positions.size());
  for (std::size_t n = 0; n < positions.size(); ++n) {
    Fingerprint fp = pred.row(static_cast<Eigen::Index>(n)).transpose();
    for (Eigen::Index l = 0; l < fp.size(); ++l)
      if (fp(l) < detection_floor_dbm) fp(l) = sentinel_dbm;
    out.push_back({"v" + std::to_string(n), positions[n], std::move(fp), RpKind::virtual_rp});
  }
  return out;
}

}  // namespace vifi
