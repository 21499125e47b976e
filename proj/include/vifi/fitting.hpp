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
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vifi/geometry.hpp"
#include "vifi/measurements.hpp"
#include "vifi/propagation.hpp"

namespace vifi {

enum class StrategyKind { environment, specific_ap, no_fit };

std::string_view to_string(StrategyKind kind);
StrategyKind parse_strategy(std::string_view name);

/// Strategy I pools every AP into one system, Strategy II solves one system
/// per AP, No-Fit uses externally supplied parameters as-is.
struct FitStrategy {
  StrategyKind kind = StrategyKind::environment;
  PropagationParams no_fit_params;

  static FitStrategy environment() { return {StrategyKind::environment, {}}; }
  static FitStrategy specific_ap() { return {StrategyKind::specific_ap, {}}; }
  static FitStrategy no_fit(PropagationParams params) {
    return {StrategyKind::no_fit, std::move(params)};
  }
};

struct FitResult {
  StrategyKind strategy = StrategyKind::environment;
  ModelKind model = ModelKind::mwmf;
  std::map<std::string, PropagationParams> params_by_ap;
  double residual_rms = 0.0;  ///< dB, over the samples used
  int m_used = 0;             ///< number of (AP, location) samples
  std::vector<std::string> warnings;

  const PropagationParams& params_for(const std::string& ap_id) const;
};

/// Least-squares calibration of gamma, l_c and the per-class 2D losses.
///
/// Scans are averaged per (location, AP) and non-detections dropped. With
/// l0, l_f and b held at the values in `fixed`, each sample contributes the
/// row (10 log10 d, 1, N_1, ..., N_C) against the target
/// EIRP - l0 - floor_term - RSS, where the classes are those present in the
/// plan. The one-slope model keeps only the first column. The system is
/// solved by column-pivoted QR.
///
/// Throws DegenerateFit when a system is rank deficient and
/// InsufficientData when it has fewer samples than unknowns.
FitResult fit(const FitStrategy& strategy, ModelKind model, const Floorplan& plan,
              std::span<const AccessPoint> aps, const MeasurementSet& meas,
              const PropagationParams& fixed = {});

/// Predicted RSS, rows = locations, columns = `aps` in order.
Eigen::MatrixXd predict_for_measurements(const FitResult& result, ModelKind model,
                                         const Floorplan& plan, std::span<const AccessPoint> aps,
                                         std::span<const Point3> locations);

/// Sum of squared RSS residuals of `params_by_ap` over the scan-averaged
/// samples of `meas` (the fitting objective).
double fit_objective(const std::map<std::string, PropagationParams>& params_by_ap, ModelKind model,
                     const Floorplan& plan, std::span<const AccessPoint> aps,
                     const MeasurementSet& meas);

}  // namespace vifi
