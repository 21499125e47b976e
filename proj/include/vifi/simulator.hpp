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
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "vifi/geometry.hpp"
#include "vifi/measurements.hpp"
#include "vifi/positioning.hpp"
#include "vifi/propagation.hpp"
#include "vifi/radiomap.hpp"

namespace vifi {

/// Spatially correlated deviation of the real channel from the MWMF law.
/// Random Fourier features of a unit-variance Gaussian-covariance field;
/// frequencies are stored for unit correlation length.
/// Model mismatch of the template worlds: static small-scale fading.
inline constexpr double kTemplateMismatchSigmaDb = 8.0;
inline constexpr double kTemplateMismatchCorrLengthM = 0.5;

struct MismatchField {
  Eigen::Matrix2Xd freqs;
  Eigen::VectorXd phases;

  double operator()(const Point2& p, double corr_length_m) const;
};

struct NoiseModel {
  double shadowing_sigma_db = 3.0;    ///< i.i.d. per scan
  double device_bias_sigma_db = 0.0;  ///< one draw per campaign
  double mismatch_sigma_db = 0.0;     ///< amplitude of the correlated field
  double mismatch_corr_length_m = 3.0;
};

/// Synthetic testbed: geometry, APs, ground-truth propagation and noise.
struct WorldSpec {
  std::string name;
  Floorplan plan;
  std::vector<AccessPoint> aps;
  std::map<std::string, PropagationParams> truth;  ///< per AP id
  NoiseModel noise;
  double detection_floor_dbm = kDefaultDetectionFloorDbm;
  double sentinel_dbm = kDefaultSentinelDbm;
  double device_height_m = 1.0;
  std::size_t survey_count = 0;  ///< N^{r,tot} of the canonical survey grid
  std::size_t tp_count = 0;
  std::uint64_t seed = 0;
  std::vector<MismatchField> mismatch;  ///< one per AP, same order as aps

  double area() const { return plan.area(); }
};

enum class WorldTemplate { spinv_like, twist_like };

std::string_view to_string(WorldTemplate t);
WorldTemplate parse_template(std::string_view name);

/// Built-in office worlds: a corridor with randomized rooms, walls and doors.
/// spinv_like is 42 x 12 m with 7 APs on the corridor axis (72 survey RPs,
/// 31 TPs); twist_like is 30 x 15 m with 4 APs near the corners (41 survey
/// RPs, 80 TPs). Layouts are redrawn until the MWMF design matrix is full
/// rank on every farthest-point subset of the survey grid used by the
/// default rho grid, per AP and pooled.
WorldSpec make_world(WorldTemplate tmpl, std::uint64_t seed);

/// Fills `mismatch` for the world's APs from its seed.
void attach_mismatch_fields(WorldSpec& world);

/// Returns a copy with every noise source disabled.
WorldSpec noiseless(WorldSpec world);

/// Truth-model RSS plus the mismatch field, before scan noise.
double true_mean_rss(const WorldSpec& world, std::size_t ap_index, const Point3& p);

enum class ScenarioKind { controlled, crowdsourcing_like };

struct ScenarioPreset {
  ScenarioKind kind = ScenarioKind::controlled;
  int rp_scans = 50;
  int tp_scans = 50;
  double device_bias_sigma_db = 0.0;

  static ScenarioPreset controlled() { return {ScenarioKind::controlled, 50, 50, 0.0}; }
  static ScenarioPreset crowdsourcing_like(double bias_sigma_db = 2.0) {
    return {ScenarioKind::crowdsourcing_like, 5, 1, bias_sigma_db};
  }
};

std::string_view to_string(ScenarioKind kind);
ScenarioPreset parse_preset(std::string_view name);

struct Campaign {
  MeasurementSet survey;    ///< RP scans
  MeasurementSet tp_scans;  ///< raw TP scans
  std::vector<TestPoint> test_points;
};

/// Scans per RP and TP. Each scan is the true mean plus N(0, sigma)
/// shadowing plus the campaign's device bias; the RP survey and the TP
/// collection are separate campaigns with independent biases. Scans below
/// the detection floor are recorded as not detected.
Campaign simulate_campaign(const WorldSpec& world, std::span<const Point3> rp_positions,
                           std::span<const Point3> tp_positions, const ScenarioPreset& preset);

/// Regular lattice of round(d_real |A|) points (at least one).
std::vector<Point3> grid_rp_positions(const Floorplan& plan, double d_real, double z = 1.0);

/// The template's canonical survey grid (survey_count points).
std::vector<Point3> survey_positions(const WorldSpec& world);

/// tp_count uniform positions, 0.5 m away from the bounds.
std::vector<Point3> random_tp_positions(const WorldSpec& world);

/// Scan-averaged TP fingerprints aligned to `aps`.
std::vector<TestPoint> average_test_points(const MeasurementSet& scans,
                                           std::span<const AccessPoint> aps, double sentinel_dbm);

}  // namespace vifi
