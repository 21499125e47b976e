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

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vifi/fitting.hpp"
#include "vifi/positioning.hpp"
#include "vifi/radiomap.hpp"
#include "vifi/stats.hpp"

namespace vifi {

inline const std::vector<double> kDefaultRhoGrid{0.1, 0.2, 0.5, 1.0};
inline const std::vector<double> kDefaultDvGrid{0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 10.0};
inline constexpr double kDefaultAlphaMin = 0.01;
inline constexpr double kDefaultAlphaMax = 0.25;

/// Everything the experiments need: the full RP survey and the test points.
struct Testbed {
  Floorplan plan;
  std::vector<AccessPoint> aps;
  MeasurementSet survey;
  std::vector<TestPoint> test_points;
  double sentinel_dbm = kDefaultSentinelDbm;
  double detection_floor_dbm = kDefaultDetectionFloorDbm;
  double device_height_m = 1.0;
};

/// How the offline phase turns selected real RPs into a radiomap.
struct RadiomapRecipe {
  FitStrategy strategy = FitStrategy::environment();
  ModelKind model = ModelKind::mwmf;
  Placement placement;      ///< z is overridden by the testbed device height
  PropagationParams fixed;  ///< l0, l_f and b held fixed during fitting
};

/// Real RPs selected by rho plus ceil(d_v |A|) virtual RPs generated from a
/// fit on the selected RPs. No fit happens when d_virtual is 0.
Radiomap build_vifi_radiomap(const Testbed& bed, double rho, double d_virtual,
                             const RadiomapRecipe& recipe);

// ---------------------------------------------------------------- prediction

struct PairError {
  std::string ap_id;
  std::string rp_id;
  double delta_db = 0;

  bool operator==(const PairError&) const = default;
};

struct PredictionCell {
  double rho = 0;
  std::size_t n_real = 0;
  StrategyKind strategy = StrategyKind::environment;
  ModelKind model = ModelKind::mwmf;
  std::string status = "ok";  ///< "ok" or the fit failure message
  std::vector<PairError> errors;
  std::map<std::string, double> mean_by_ap;
  double mean_db = 0;  ///< mean over APs of the per-AP means

  std::vector<double> deltas() const;
  std::vector<double> deltas_for(const std::string& ap_id) const;
  bool operator==(const PredictionCell&) const = default;
};

struct PredictionReport {
  std::vector<PredictionCell> cells;
  bool operator==(const PredictionReport&) const = default;
};

/// For every (rho, strategy, model): fit on the selected RPs, predict at
/// every surveyed RP and score |measured - predicted| where the AP was
/// detected. Fit failures are recorded in the cell's status.
PredictionReport run_prediction_analysis(const MeasurementSet& meas, const Floorplan& plan,
                                         std::span<const AccessPoint> aps,
                                         std::span<const double> rho_grid,
                                         std::span<const FitStrategy> strategies,
                                         std::span<const ModelKind> models,
                                         const PropagationParams& fixed = {});

// --------------------------------------------------------------- positioning

struct KPolicy {
  bool optimal = true;        ///< k = k_opt of each cell
  std::vector<int> fixed_k;   ///< used when !optimal
};

struct PositioningCell {
  double rho = 0;
  double d_real = 0;
  double d_virtual = 0;
  std::size_t n_real = 0;
  std::size_t n_virtual = 0;
  int k = 0;
  std::string status = "ok";
  std::vector<double> errors;  ///< per TP, metres
  double mean_m = 0;
  BoxStats box;
  std::optional<double> gain;  ///< only for d_virtual > 0

  bool operator==(const PositioningCell&) const = default;
};

struct PositioningReport {
  StrategyKind strategy = StrategyKind::environment;
  ModelKind model = ModelKind::mwmf;
  std::vector<PositioningCell> cells;
  bool operator==(const PositioningReport&) const = default;
};

struct GainCell {
  double d_real = 0;
  double d_virtual = 0;
  int k = 0;
  double gain = 0;
  bool operator==(const GainCell&) const = default;
};

struct GainReport {
  std::vector<GainCell> cells;
  bool operator==(const GainReport&) const = default;
};

struct SweepReport {
  PositioningReport positioning;
  GainReport gain;
};

/// Full factorial sweep over rho, {0} + dv_grid and k. Gains divide the
/// d_virtual = 0 error of the same rho by the cell's error, each at its own
/// k_opt (or at the same fixed k).
SweepReport run_positioning_sweep(const Testbed& bed, std::span<const double> rho_grid,
                                  std::span<const double> dv_grid, const KPolicy& k_policy,
                                  const RadiomapRecipe& recipe);

// ---------------------------------------------------------------------- k_est

struct KestCell {
  double rho = 0;
  double d_real = 0;
  double d_virtual = 0;
  std::size_t n_real = 0;
  std::size_t n_virtual = 0;
  int k_opt = 0;
  double mean_opt_m = 0;
  std::vector<double> alphas;
  std::vector<int> k_est;
  std::vector<double> mean_est_m;
  std::vector<double> beta_m;
  std::string status = "ok";

  bool operator==(const KestCell&) const = default;
};

struct KestReport {
  std::vector<KestCell> cells;
  bool operator==(const KestReport&) const = default;
};

/// alpha_min, alpha_min + step, ..., alpha_max.
std::vector<double> alpha_grid(double alpha_min = kDefaultAlphaMin,
                               double alpha_max = kDefaultAlphaMax, double step = 0.01);

/// beta(alpha) = mean error at k_est(alpha) minus the mean error at k_opt,
/// per rho at d_virtual = dv_max.
KestReport run_kest_sweep(const Testbed& bed, std::span<const double> rho_grid, double dv_max,
                          std::span<const double> alphas, const RadiomapRecipe& recipe);

// -------------------------------------------------------------------- output

enum class ReportFormat { csv, json };

/// Writes atomically (temporary file then rename). Throws InputError with
/// the path on I/O failure.
void emit_report(const PredictionReport& report, const std::filesystem::path& path,
                 ReportFormat format);
void emit_report(const PositioningReport& report, const std::filesystem::path& path,
                 ReportFormat format);
void emit_report(const GainReport& report, const std::filesystem::path& path, ReportFormat format);
void emit_report(const KestReport& report, const std::filesystem::path& path, ReportFormat format);

PredictionReport read_prediction_report(const std::filesystem::path& json_path);
PositioningReport read_positioning_report(const std::filesystem::path& json_path);
GainReport read_gain_report(const std::filesystem::path& json_path);
KestReport read_kest_report(const std::filesystem::path& json_path);

}  // namespace vifi
