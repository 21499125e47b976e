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

#include <span>
#include <utility>
#include <vector>

namespace vifi {

/// Five-number summary with 1.5 IQR outliers. `min`/`max` are the whisker
/// ends, i.e. the most extreme values that are not outliers.
struct BoxStats {
  double min = 0, p25 = 0, median = 0, p75 = 0, max = 0;
  std::vector<double> outliers;

  bool operator==(const BoxStats&) const = default;
};

struct CdfPoint {
  double value = 0;
  double cumulative_fraction = 0;

  bool operator==(const CdfPoint&) const = default;
};

double mean(std::span<const double> values);

/// Linear-interpolation quantile of already sorted values, p in [0, 1].
double quantile_sorted(std::span<const double> sorted, double p);

BoxStats boxplot(std::span<const double> values);

/// Empirical CDF: sorted values paired with i/n, last fraction exactly 1.
std::vector<CdfPoint> empirical_cdf(std::span<const double> values);

}  // namespace vifi
