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

#include <cmath>
#include <map>
#include <string>
#include <string_view>

#include "vifi/errors.hpp"
#include "vifi/geometry.hpp"

namespace vifi {

/// Free-space reference loss at 1 m, 2.45 GHz.
inline constexpr double kFreeSpaceL0Db = 40.22;
inline constexpr double kDefaultFloorLossDb = 18.0;
inline constexpr double kDefaultFloorExponentB = 0.46;

enum class ModelKind { mwmf, one_slope };

std::string_view to_string(ModelKind kind);
ModelKind parse_model(std::string_view name);

/// Propagation parameter set. The fitted subset is {gamma, l_c, losses};
/// l0, l_f and b stay fixed.
struct PropagationParams {
  double l0 = kFreeSpaceL0Db;
  double gamma = 2.0;
  double l_c = 0.0;
  std::map<ObstacleClass, double> loss_2d;
  double l_f = kDefaultFloorLossDb;
  double b = kDefaultFloorExponentB;

  double loss(const ObstacleClass& cls) const {
    auto it = loss_2d.find(cls);
    return it == loss_2d.end() ? 0.0 : it->second;
  }
  /// Throws DomainError if l0 <= 0, gamma <= 0 or any loss is negative.
  void validate() const;

  bool operator==(const PropagationParams&) const = default;
};

struct AccessPoint {
  std::string id;
  Point3 position = Point3::Zero();
  double eirp_dbm = 20.0;
};

/// l0 + 10 gamma log10(d).
template <typename Scalar>
Scalar one_slope_loss(Scalar l0, Scalar gamma, Scalar d) {
  if (!(d > Scalar(0))) throw DomainError("path loss distance must be positive");
  return l0 + Scalar(10) * gamma * std::log10(d);
}

/// N_f^[(N_f + 2)/(N_f + 1) - b] * l_f; zero for N_f = 0.
template <typename Scalar>
Scalar floor_loss(int floors_crossed, Scalar l_f, Scalar b) {
  if (floors_crossed <= 0) return Scalar(0);
  const Scalar n = static_cast<Scalar>(floors_crossed);
  return std::pow(n, (n + Scalar(2)) / (n + Scalar(1)) - b) * l_f;
}

double path_loss_os(const PropagationParams& params, double d);

/// Obstruction term: l_c + sum N_{n,i} l_{n,i} + floor term.
double additional_loss(const PropagationParams& params, const ObstructionCount& obs);

double path_loss(ModelKind model, const PropagationParams& params, const Floorplan& plan,
                 const Point3& tx, const Point3& rx);

/// EIRP minus path loss, unclamped.
double predict_rss(ModelKind model, const PropagationParams& params, const Floorplan& plan,
                   const AccessPoint& ap, const Point3& rx);

}  // namespace vifi
