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

#include "vifi/measurements.hpp"

#include <set>
#include <unordered_map>

#include "vifi/errors.hpp"

namespace vifi {

std::vector<LocationAverage> average_scans(const MeasurementSet& meas) {
  // Accumulates deviations from the first detected scan.
  struct Acc {
    double first = 0;
    double dev = 0;
    int n = 0;
  };
  std::vector<LocationAverage> out;
  std::vector<std::map<std::string, Acc>> acc;
  std::unordered_map<std::string, std::size_t> index;

  for (const auto& m : meas.records) {
    auto [it, inserted] = index.try_emplace(m.location_id, out.size());
    if (inserted) {
      out.push_back({m.location_id, m.location, {}});
      acc.emplace_back();
    } else if ((out[it->second].position - m.location).norm() > 1e-9) {
      throw InvalidGeometry("location '" + m.location_id + "' appears at two positions");
    }
    auto& a = acc[it->second][m.ap_id];
    if (m.rss) {
      if (a.n == 0) a.first = *m.rss;
      a.dev += *m.rss - a.first;
      ++a.n;
    }
  }
  for (std::size_t i = 0; i < out.size(); ++i)
    for (const auto& [ap, a] : acc[i])
      out[i].rss_by_ap[ap] = a.n > 0 ? std::optional<double>(a.first + a.dev / a.n) : std::nullopt;
  return out;
}

MeasurementSet filter_locations(const MeasurementSet& meas, const std::vector<std::string>& ids) {
  const std::set<std::string> keep(ids.begin(), ids.end());
  MeasurementSet out;
  out.q = meas.q;
  for (const auto& m : meas.records)
    if (keep.count(m.location_id)) out.records.push_back(m);
  return out;
}

}  // namespace vifi
