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

#include "vifi/fitting.hpp"

#include <cmath>
#include <unordered_map>

#include <Eigen/QR>

#include "vifi/errors.hpp"

namespace vifi {

std::string_view to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::environment:
      return "env";
    case StrategyKind::specific_ap:
      return "per-ap";
    case StrategyKind::no_fit:
      return "nofit";
  }
  return "unknown";
}

StrategyKind parse_strategy(std::string_view name) {
  if (name == "env" || name == "environment" || name == "I") return StrategyKind::environment;
  if (name == "per-ap" || name == "specific_ap" || name == "II") return StrategyKind::specific_ap;
  if (name == "nofit" || name == "no-fit" || name == "no_fit") return StrategyKind::no_fit;
  throw DomainError("unknown fit strategy '" + std::string(name) + "'");
}

const PropagationParams& FitResult::params_for(const std::string& ap_id) const {
  auto it = params_by_ap.find(ap_id);
  if (it == params_by_ap.end()) throw UnknownAccessPoint("no fitted parameters for AP '" + ap_id + "'");
  return it->second;
}

namespace {

struct Sample {
  std::size_t ap;  // index into aps
  double log_d;    // 10 log10(d)
  ObstructionCount obs;
  double rss;
};

std::vector<Sample> collect_samples(const Floorplan& plan, std::span<const AccessPoint> aps,
                                    const MeasurementSet& meas) {
  std::unordered_map<std::string, std::size_t> ap_index;
  for (std::size_t i = 0; i < aps.size(); ++i) ap_index.emplace(aps[i].id, i);

  std::vector<Sample> samples;
  for (const auto& loc : average_scans(meas)) {
    for (const auto& [ap_id, rss] : loc.rss_by_ap) {
      auto it = ap_index.find(ap_id);
      if (it == ap_index.end())
        throw UnknownAccessPoint("measurement references unknown AP '" + ap_id + "'");
      if (!rss) continue;
      const auto& ap = aps[it->second];
      samples.push_back({it->second, 10.0 * std::log10(link_distance(ap.position, loc.position)),
                         count_obstructions(plan, ap.position, loc.position), *rss});
    }
  }
  return samples;
}

// Solves one system over `rows` of `samples`; returns params and fills the
// squared-residual sum.
PropagationParams solve_system(const std::vector<Sample>& samples,
                               const std::vector<std::size_t>& rows,
                               std::span<const AccessPoint> aps, ModelKind model,
                               const std::vector<ObstacleClass>& classes,
                               const PropagationParams& fixed, const std::string& label) {
  const Eigen::Index cols =
      model == ModelKind::mwmf ? 2 + static_cast<Eigen::Index>(classes.size()) : 1;
  const auto m = static_cast<Eigen::Index>(rows.size());
  if (m < cols)
    throw InsufficientData("fit for " + label + " has " + std::to_string(m) +
                           " samples but needs at least " + std::to_string(cols));

  Eigen::MatrixXd A(m, cols);
  Eigen::VectorXd y(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const Sample& s = samples[rows[static_cast<std::size_t>(r)]];
    const double floor_term =
        model == ModelKind::mwmf ? floor_loss(s.obs.floors_crossed, fixed.l_f, fixed.b) : 0.0;
    y(r) = aps[s.ap].eirp_dbm - fixed.l0 - floor_term - s.rss;
    A(r, 0) = s.log_d;
    if (model == ModelKind::mwmf) {
      A(r, 1) = 1.0;
      for (std::size_t c = 0; c < classes.size(); ++c)
        A(r, 2 + static_cast<Eigen::Index>(c)) = s.obs.count(classes[c]);
    }
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-10);
  if (qr.rank() < cols)
    throw DegenerateFit(label, "rank-deficient fit for " + label + ": rank " +
                                   std::to_string(qr.rank()) + " < " + std::to_string(cols));
  const Eigen::VectorXd x = qr.solve(y);

  PropagationParams p = fixed;
  p.gamma = x(0);
  p.loss_2d.clear();
  if (model == ModelKind::mwmf) {
    p.l_c = x(1);
    for (std::size_t c = 0; c < classes.size(); ++c)
      p.loss_2d[classes[c]] = x(2 + static_cast<Eigen::Index>(c));
  } else {
    p.l_c = 0.0;
  }
  return p;
}

double predicted(const Sample& s, const AccessPoint& ap, ModelKind model,
                 const PropagationParams& p) {
  double pl = p.l0 + p.gamma * s.log_d;
  if (model == ModelKind::mwmf) pl += additional_loss(p, s.obs);
  return ap.eirp_dbm - pl;
}

}  // namespace

FitResult fit(const FitStrategy& strategy, ModelKind model, const Floorplan& plan,
              std::span<const AccessPoint> aps, const MeasurementSet& meas,
              const PropagationParams& fixed) {
  const std::vector<Sample> samples = collect_samples(plan, aps, meas);
  const std::vector<ObstacleClass> classes = plan.obstacle_classes();

  FitResult result;
  result.strategy = strategy.kind;
  result.model = model;
  result.m_used = static_cast<int>(samples.size());

  switch (strategy.kind) {
    case StrategyKind::no_fit:
      for (const auto& ap : aps) result.params_by_ap[ap.id] = strategy.no_fit_params;
      break;
    case StrategyKind::environment: {
      std::vector<std::size_t> rows(samples.size());
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i] = i;
      const PropagationParams shared =
          solve_system(samples, rows, aps, model, classes, fixed, "all APs");
      for (const auto& ap : aps) result.params_by_ap[ap.id] = shared;
      break;
    }
    case StrategyKind::specific_ap: {
      std::vector<std::vector<std::size_t>> rows(aps.size());
      for (std::size_t i = 0; i < samples.size(); ++i) rows[samples[i].ap].push_back(i);
      for (std::size_t a = 0; a < aps.size(); ++a)
        result.params_by_ap[aps[a].id] =
            solve_system(samples, rows[a], aps, model, classes, fixed, "AP '" + aps[a].id + "'");
      break;
    }
  }

  double ss = 0.0;
  for (const auto& s : samples) {
    const double r = s.rss - predicted(s, aps[s.ap], model, result.params_by_ap.at(aps[s.ap].id));
    ss += r * r;
  }
  result.residual_rms = samples.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(samples.size()));

  if (strategy.kind != StrategyKind::no_fit && model == ModelKind::mwmf) {
    for (const auto& ap : aps) {
      const auto& p = result.params_by_ap.at(ap.id);
      if (p.l_c < 0)
        result.warnings.push_back("negative fitted l_c for AP '" + ap.id + "'");
      for (const auto& [cls, loss] : p.loss_2d)
        if (loss < 0)
          result.warnings.push_back("negative fitted " + class_key(cls) + " loss for AP '" +
                                    ap.id + "'");
      if (strategy.kind == StrategyKind::environment) break;
    }
  }
  return result;
}

Eigen::MatrixXd predict_for_measurements(const FitResult& result, ModelKind model,
                                         const Floorplan& plan, std::span<const AccessPoint> aps,
                                         std::span<const Point3> locations) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(locations.size()),
                      static_cast<Eigen::Index>(aps.size()));
  for (std::size_t a = 0; a < aps.size(); ++a) {
    const auto& params = result.params_for(aps[a].id);
    for (std::size_t n = 0; n < locations.size(); ++n)
      out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(a)) =
          predict_rss(model, params, plan, aps[a], locations[n]);
  }
  return out;
}

double fit_objective(const std::map<std::string, PropagationParams>& params_by_ap, ModelKind model,
                     const Floorplan& plan, std::span<const AccessPoint> aps,
                     const MeasurementSet& meas) {
  double ss = 0.0;
  for (const auto& s : collect_samples(plan, aps, meas)) {
    auto it = params_by_ap.find(aps[s.ap].id);
    if (it == params_by_ap.end())
      throw UnknownAccessPoint("no parameters for AP '" + aps[s.ap].id + "'");
    const double r = s.rss - predicted(s, aps[s.ap], model, it->second);
    ss += r * r;
  }
  return ss;
}

}  // namespace vifi
