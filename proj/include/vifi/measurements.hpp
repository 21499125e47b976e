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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vifi/geometry.hpp"

namespace vifi {

/// RSS range accepted for detected scans.
inline constexpr double kMinRssDbm = -120.0;
inline constexpr double kMaxRssDbm = 0.0;

/// One scan of one AP at one surveyed location. `rss` is empty when the AP
/// was not detected in that scan.
struct Measurement {
  std::string location_id;
  Point3 location = Point3::Zero();
  std::string ap_id;
  std::optional<double> rss;
  int scan_index = 0;
};

struct MeasurementSet {
  std::vector<Measurement> records;
  int q = 1;  ///< scans per location-AP pair
};

/// Scan-averaged observations at one location; an AP maps to nullopt when it
/// was never detected there.
struct LocationAverage {
  std::string id;
  Point3 position = Point3::Zero();
  std::map<std::string, std::optional<double>> rss_by_ap;
};

/// Arithmetic mean of the detected scans per (location, AP), locations in
/// order of first appearance.
std::vector<LocationAverage> average_scans(const MeasurementSet& meas);

/// Records whose location id is in `ids`.
MeasurementSet filter_locations(const MeasurementSet& meas, const std::vector<std::string>& ids);

}  // namespace vifi
