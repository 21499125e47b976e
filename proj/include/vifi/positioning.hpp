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

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "vifi/radiomap.hpp"

namespace vifi {

/// Similarity assigned to a zero-distance match in place of infinity.
inline constexpr double kSimilarityCap = 1e9;
inline constexpr double kDefaultAlpha = 0.05;

struct WknnConfig {
  int k = 1;
  double minkowski_order = 2.0;
  double alpha = kDefaultAlpha;
  double similarity_cap = kSimilarityCap;
};

struct Neighbor {
  std::size_t rp = 0;
  double similarity = 0.0;
};

struct PositionEstimate {
  Point3 position = Point3::Zero();
  std::vector<Neighbor> neighbors;  ///< most similar first
};

/// Minkowski distance of order `order` between two fingerprints.
double minkowski_distance(const Fingerprint& a, const Fingerprint& b, double order);

/// Inverse Minkowski distance, capped at `cap` (exact matches get `cap`).
double similarity(const Fingerprint& a, const Fingerprint& b, double order,
                  double cap = kSimilarityCap);

/// ceil(alpha (d_r + d_v) |A|).
int k_est(double d_real, double d_virtual, double area_m2, double alpha);

/// Same rule on RP counts: ceil(alpha N).
int k_est_from_count(std::size_t rp_count, double alpha);

/// Similarity of every RP to `target`.
Eigen::VectorXd similarities(const Radiomap& map, const Fingerprint& target, double order,
                             double cap = kSimilarityCap);

/// RP indices sorted by decreasing similarity, ties to the lower index;
/// only the first `count` entries are guaranteed ordered.
std::vector<std::size_t> rank_by_similarity(const Eigen::VectorXd& sims, std::size_t count);

/// Similarity-weighted centroid of the k most similar RPs.
PositionEstimate locate(const Radiomap& map, const Fingerprint& target, const WknnConfig& cfg);

struct TestPoint {
  std::string id;
  Point3 position = Point3::Zero();
  Fingerprint rss;
};

/// Per-TP positioning errors for every k in [1, k_max]: entry (i, k-1) is
/// the 3D error of TP i at that k. One ranking per TP serves all k.
Eigen::MatrixXd error_table(const Radiomap& map, std::span<const TestPoint> tps, int k_max,
                            double order = 2.0);

/// Mean error per k (column means of error_table).
Eigen::VectorXd mean_error_curve(const Radiomap& map, std::span<const TestPoint> tps, int k_max,
                                 double order = 2.0);

/// k in [k_lo, k_hi] minimizing mean positioning error; ties to smaller k.
int find_k_opt(const Radiomap& map, std::span<const TestPoint> tps,
               std::optional<std::pair<int, int>> k_range = std::nullopt, double order = 2.0);

/// Index of the minimum of a mean-error curve (k = index + 1), ties to
/// smaller k, searched within [k_lo, k_hi].
int argmin_k(const Eigen::VectorXd& curve, int k_lo, int k_hi);

}  // namespace vifi
