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
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "vifi/fitting.hpp"
#include "vifi/geometry.hpp"
#include "vifi/measurements.hpp"
#include "vifi/propagation.hpp"
#include "vifi/radiomap.hpp"
#include "vifi/simulator.hpp"

namespace vifi::io {

using Json = nlohmann::json;
namespace fs = std::filesystem;

/// Shortest decimal form that parses back to the same double.
std::string format_number(double value);

std::string read_text(const fs::path& path);
/// Writes to a sibling temporary file and renames it into place.
void write_text_atomic(const fs::path& path, const std::string& content);
Json read_json(const fs::path& path);
void write_json_atomic(const fs::path& path, const Json& doc);

// Floorplan: {bounds:{min_x,min_y,max_x,max_y}, floors:[z...],
//             obstacles:[{family,type_index,floor,x1,y1,x2,y2}]}
Json to_json(const Floorplan& plan);
Floorplan floorplan_from_json(const Json& doc);
Floorplan load_floorplan(const fs::path& path);

// Params: {model,l0_db,gamma,lc_db,losses:{wall,door},lf_db,b}
Json to_json(const PropagationParams& params, ModelKind model);
std::pair<ModelKind, PropagationParams> params_from_json(const Json& doc);
std::pair<ModelKind, PropagationParams> load_params(const fs::path& path);

// APs: [{id,x,y,z,eirp_dbm}]
Json to_json(std::span<const AccessPoint> aps);
std::vector<AccessPoint> aps_from_json(const Json& doc);
std::vector<AccessPoint> load_aps(const fs::path& path);

// Fit result: {model,strategy,residual_rms,m_used,warnings,params_by_ap:{id:params}}
Json to_json(const FitResult& result);
FitResult fit_from_json(const Json& doc);
FitResult load_fit(const fs::path& path);

// Radiomap: {aps:[...], sentinel_dbm, area_m2, rps:[{id,x,y,z,kind,rss:[...]}]};
// sentinel entries are written as null.
Json to_json(const Radiomap& map);
Radiomap radiomap_from_json(const Json& doc);
Radiomap load_radiomap(const fs::path& path);

// Measurements CSV: <id_column>,x,y,z,ap_id,rss_dbm,scan_index; "ND" marks a
// non-detection. Any first-column name is accepted on read.
std::string to_csv(const MeasurementSet& meas, const std::string& id_column = "rp_id");
MeasurementSet measurements_from_csv(const std::string& text, const std::string& source);
MeasurementSet load_measurements(const fs::path& path);

// World description used by the custom simulator template.
Json to_json(const WorldSpec& world);
WorldSpec world_from_json(const Json& doc);
WorldSpec load_world(const fs::path& path);

}  // namespace vifi::io
