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

#include "vifi/propagation.hpp"

namespace vifi {

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::mwmf ? "mwmf" : "one_slope";
}

ModelKind parse_model(std::string_view name) {
  if (name == "mwmf" || name == "MWMF") return ModelKind::mwmf;
  if (name == "one_slope" || name == "os" || name == "OS" || name == "OneSlope")
    return ModelKind::one_slope;
  throw DomainError("unknown propagation model '" + std::string(name) + "'");
}

void PropagationParams::validate() const {
  if (!(l0 > 0)) throw DomainError("l0 must be positive");
  if (!(gamma > 0)) throw DomainError("gamma must be positive");
  if (!(l_f >= 0)) throw DomainError("l_f must be non-negative");
  for (const auto& [cls, loss] : loss_2d)
    if (!(loss >= 0)) throw DomainError("loss for " + class_key(cls) + " must be non-negative");
}

double path_loss_os(const PropagationParams& params, double d) {
  return one_slope_loss(params.l0, params.gamma, d);
}

double additional_loss(const PropagationParams& params, const ObstructionCount& obs) {
  double total = params.l_c;
  for (const auto& [cls, n] : obs.counts) total += n * params.loss(cls);
  return total + floor_loss(obs.floors_crossed, params.l_f, params.b);
}

double path_loss(ModelKind model, const PropagationParams& params, const Floorplan& plan,
                 const Point3& tx, const Point3& rx) {
  const double os = path_loss_os(params, link_distance(tx, rx));
  if (model == ModelKind::one_slope) return os;
  return os + additional_loss(params, count_obstructions(plan, tx, rx));
}

double predict_rss(ModelKind model, const PropagationParams& params, const Floorplan& plan,
                   const AccessPoint& ap, const Point3& rx) {
  return ap.eirp_dbm - path_loss(model, params, plan, ap.position, rx);
}

}  // namespace vifi
