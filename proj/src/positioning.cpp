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

#include "vifi/positioning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "vifi/errors.hpp"

namespace vifi {

double minkowski_distance(const Fingerprint& a, const Fingerprint& b, double order) {
  if (a.size() != b.size()) throw DomainError("fingerprint lengths differ");
  if (!(order >= 1)) throw DomainError("Minkowski order must be >= 1");
  const Eigen::ArrayXd diff = (a - b).array().abs();
  if (order == 1.0) return diff.sum();
  if (order == 2.0) return std::sqrt(diff.square().sum());
  return std::pow(diff.pow(order).sum(), 1.0 / order);
}

double similarity(const Fingerprint& a, const Fingerprint& b, double order, double cap) {
  const double d = minkowski_distance(a, b, order);
  if (d <= 0) return cap;
  return std::min(cap, 1.0 / d);
}

int k_est(double d_real, double d_virtual, double area_m2, double alpha) {
  if (!(alpha > 0)) throw DomainError("alpha must be positive");
  if (d_real < 0 || d_virtual < 0 || !(d_real + d_virtual > 0))
    throw DomainError("RP densities must be non-negative and not both zero");
  if (!(area_m2 > 0)) throw DomainError("area must be positive");
  const double raw = alpha * (d_real + d_virtual) * area_m2;
  return std::max(1, static_cast<int>(std::ceil(raw - 1e-9 * std::max(1.0, raw))));
}

int k_est_from_count(std::size_t rp_count, double alpha) {
  return k_est(static_cast<double>(rp_count), 0.0, 1.0, alpha);
}

Eigen::VectorXd similarities(const Radiomap& map, const Fingerprint& target, double order,
                             double cap) {
  if (target.size() != static_cast<Eigen::Index>(map.aps.size()))
    throw DomainError("target fingerprint length does not match the radiomap");
  Eigen::VectorXd sims(static_cast<Eigen::Index>(map.rps.size()));
  for (std::size_t n = 0; n < map.rps.size(); ++n)
    sims(static_cast<Eigen::Index>(n)) = similarity(map.rps[n].rss, target, order, cap);
  return sims;
}

std::vector<std::size_t> rank_by_similarity(const Eigen::VectorXd& sims, std::size_t count) {
  std::vector<std::size_t> idx(static_cast<std::size_t>(sims.size()));
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  count = std::min(count, idx.size());
  auto better = [&](std::size_t a, std::size_t b) {
    const double sa = sims(static_cast<Eigen::Index>(a));
    const double sb = sims(static_cast<Eigen::Index>(b));
    return sa > sb || (sa == sb && a < b);
  };
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(count), idx.end(), better);
  idx.resize(count);
  return idx;
}

PositionEstimate locate(const Radiomap& map, const Fingerprint& target, const WknnConfig& cfg) {
  if (map.rps.empty()) throw InsufficientData("empty radiomap");
  if (cfg.k < 1 || static_cast<std::size_t>(cfg.k) > map.rps.size())
    throw DomainError("k must lie in [1, N]");
  const Eigen::VectorXd sims = similarities(map, target, cfg.minkowski_order, cfg.similarity_cap);
  const auto k = static_cast<std::size_t>(cfg.k);
  const auto ranked = rank_by_similarity(sims, k);

  PositionEstimate est;
  Point3 weighted = Point3::Zero();
  double total = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t n = ranked[j];
    const double s = sims(static_cast<Eigen::Index>(n));
    weighted += s * map.rps[n].position;
    total += s;
    est.neighbors.push_back({n, s});
  }
  est.position = weighted / total;
  return est;
}

Eigen::MatrixXd error_table(const Radiomap& map, std::span<const TestPoint> tps, int k_max,
                            double order) {
  if (map.rps.empty()) throw InsufficientData("empty radiomap");
  if (k_max < 1 || static_cast<std::size_t>(k_max) > map.rps.size())
    throw DomainError("k_max must lie in [1, N]");
  const auto k = static_cast<std::size_t>(k_max);
  Eigen::MatrixXd errors(static_cast<Eigen::Index>(tps.size()), k_max);
  for (std::size_t i = 0; i < tps.size(); ++i) {
    const Eigen::VectorXd sims = similarities(map, tps[i].rss, order);
    const auto ranked = rank_by_similarity(sims, k);
    Point3 weighted = Point3::Zero();
    double total = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double s = sims(static_cast<Eigen::Index>(ranked[j]));
      weighted += s * map.rps[ranked[j]].position;
      total += s;
      const Point3 est = weighted / total;
      errors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          (tps[i].position - est).norm();
    }
  }
  return errors;
}

Eigen::VectorXd mean_error_curve(const Radiomap& map, std::span<const TestPoint> tps, int k_max,
                                 double order) {
  if (tps.empty()) throw InsufficientData("no test points");
  return error_table(map, tps, k_max, order).colwise().mean().transpose();
}

int argmin_k(const Eigen::VectorXd& curve, int k_lo, int k_hi) {
  if (k_lo < 1 || k_hi < k_lo || k_hi > curve.size()) throw DomainError("invalid k range");
  int best = k_lo;
  for (int k = k_lo + 1; k <= k_hi; ++k)
    if (curve(k - 1) < curve(best - 1)) best = k;
  return best;
}

int find_k_opt(const Radiomap& map, std::span<const TestPoint> tps,
               std::optional<std::pair<int, int>> k_range, double order) {
  const int n = static_cast<int>(map.rps.size());
  const auto [lo, hi] = k_range.value_or(std::pair<int, int>{1, n});
  if (lo < 1 || hi > n || hi < lo) throw DomainError("k range must lie within [1, N]");
  return argmin_k(mean_error_curve(map, tps, hi, order), lo, hi);
}

}  // namespace vifi
