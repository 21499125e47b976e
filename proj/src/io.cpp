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

#include "vifi/io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <system_error>

#include "vifi/errors.hpp"

namespace vifi::io {

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(path.string(), "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(path.string(), "cannot open for writing");
    out << content;
    if (!out) throw InputError(path.string(), "write failed");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw InputError(path.string(), "cannot move file into place");
  }
}

Json read_json(const fs::path& path) {
  const std::string text = read_text(path);
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw InputError(path.string(), std::string("invalid JSON: ") + e.what());
  }
}

void write_json_atomic(const fs::path& path, const Json& doc) {
  write_text_atomic(path, doc.dump(2) + "\n");
}

namespace {

template <typename Fn>
auto with_path(const fs::path& path, Fn&& fn) -> decltype(fn(Json{})) {
  const Json doc = read_json(path);
  try {
    return fn(doc);
  } catch (const InputError&) {
    throw;
  } catch (const Json::exception& e) {
    throw InputError(path.string(), e.what());
  } catch (const Error& e) {
    throw InputError(path.string(), e.what());
  }
}

Json point_json(const Point3& p) { return Json{{"x", p.x()}, {"y", p.y()}, {"z", p.z()}}; }

Point3 point_from(const Json& j) {
  return {j.at("x").get<double>(), j.at("y").get<double>(), j.value("z", 0.0)};
}

}  // namespace

// ------------------------------------------------------------------ floorplan

Json to_json(const Floorplan& plan) {
  const auto& b = plan.bounds();
  Json obstacles = Json::array();
  for (const auto& o : plan.obstacles())
    obstacles.push_back({{"family", std::string(to_string(o.cls.family))},
                         {"type_index", o.cls.type_index},
                         {"floor", o.floor},
                         {"x1", o.a.x()},
                         {"y1", o.a.y()},
                         {"x2", o.b.x()},
                         {"y2", o.b.y()}});
  return Json{{"bounds", {{"min_x", b.min_x}, {"min_y", b.min_y}, {"max_x", b.max_x}, {"max_y", b.max_y}}},
              {"floors", plan.floors()},
              {"obstacles", obstacles}};
}

Floorplan floorplan_from_json(const Json& doc) {
  const Json& jb = doc.at("bounds");
  Bounds b{jb.at("min_x").get<double>(), jb.at("min_y").get<double>(), jb.at("max_x").get<double>(),
           jb.at("max_y").get<double>()};
  std::vector<double> floors = doc.value("floors", std::vector<double>{0.0});
  std::vector<PlanarObstacle> obstacles;
  if (doc.contains("obstacles")) {
    for (const auto& jo : doc.at("obstacles")) {
      PlanarObstacle o;
      o.cls.family = parse_family(jo.at("family").get<std::string>());
      o.cls.type_index = jo.value("type_index", 1);
      o.floor = jo.value("floor", 0);
      o.a = {jo.at("x1").get<double>(), jo.at("y1").get<double>()};
      o.b = {jo.at("x2").get<double>(), jo.at("y2").get<double>()};
      obstacles.push_back(o);
    }
  }
  return Floorplan(b, std::move(floors), std::move(obstacles));
}

Floorplan load_floorplan(const fs::path& path) { return with_path(path, floorplan_from_json); }

// --------------------------------------------------------------------- params

Json to_json(const PropagationParams& p, ModelKind model) {
  Json losses = Json::object();
  for (const auto& [cls, loss] : p.loss_2d) losses[class_key(cls)] = loss;
  return Json{{"model", std::string(to_string(model))},
              {"l0_db", p.l0},
              {"gamma", p.gamma},
              {"lc_db", p.l_c},
              {"losses", losses},
              {"lf_db", p.l_f},
              {"b", p.b}};
}

std::pair<ModelKind, PropagationParams> params_from_json(const Json& doc) {
  PropagationParams p;
  const ModelKind model = parse_model(doc.value("model", std::string("mwmf")));
  p.l0 = doc.value("l0_db", kFreeSpaceL0Db);
  p.gamma = doc.at("gamma").get<double>();
  p.l_c = doc.value("lc_db", 0.0);
  if (doc.contains("losses"))
    for (const auto& [key, loss] : doc.at("losses").items())
      p.loss_2d[parse_class_key(key)] = loss.get<double>();
  p.l_f = doc.value("lf_db", kDefaultFloorLossDb);
  p.b = doc.value("b", kDefaultFloorExponentB);
  return {model, p};
}

std::pair<ModelKind, PropagationParams> load_params(const fs::path& path) {
  return with_path(path, [](const Json& doc) {
    auto out = params_from_json(doc);
    out.second.validate();
    return out;
  });
}

// ------------------------------------------------------------------------ APs

Json to_json(std::span<const AccessPoint> aps) {
  Json out = Json::array();
  for (const auto& ap : aps) {
    Json j = point_json(ap.position);
    j["id"] = ap.id;
    j["eirp_dbm"] = ap.eirp_dbm;
    out.push_back(j);
  }
  return out;
}

std::vector<AccessPoint> aps_from_json(const Json& doc) {
  const Json& arr = doc.is_object() ? doc.at("aps") : doc;
  std::vector<AccessPoint> out;
  std::map<std::string, int> seen;
  for (const auto& j : arr) {
    AccessPoint ap{j.at("id").get<std::string>(), point_from(j), j.value("eirp_dbm", 20.0)};
    if (seen[ap.id]++) throw DomainError("duplicate AP id '" + ap.id + "'");
    out.push_back(std::move(ap));
  }
  return out;
}

std::vector<AccessPoint> load_aps(const fs::path& path) { return with_path(path, aps_from_json); }

// ------------------------------------------------------------------------ fit

Json to_json(const FitResult& r) {
  Json by_ap = Json::object();
  for (const auto& [id, p] : r.params_by_ap) by_ap[id] = to_json(p, r.model);
  return Json{{"model", std::string(to_string(r.model))},
              {"strategy", std::string(to_string(r.strategy))},
              {"residual_rms", r.residual_rms},
              {"m_used", r.m_used},
              {"warnings", r.warnings},
              {"params_by_ap", by_ap}};
}

FitResult fit_from_json(const Json& doc) {
  FitResult r;
  r.model = parse_model(doc.at("model").get<std::string>());
  r.strategy = parse_strategy(doc.at("strategy").get<std::string>());
  r.residual_rms = doc.value("residual_rms", 0.0);
  r.m_used = doc.value("m_used", 0);
  r.warnings = doc.value("warnings", std::vector<std::string>{});
  for (const auto& [id, j] : doc.at("params_by_ap").items())
    r.params_by_ap[id] = params_from_json(j).second;
  return r;
}

FitResult load_fit(const fs::path& path) { return with_path(path, fit_from_json); }

// ------------------------------------------------------------------- radiomap

Json to_json(const Radiomap& map) {
  Json rps = Json::array();
  for (const auto& rp : map.rps) {
    Json rss = Json::array();
    for (Eigen::Index l = 0; l < rp.rss.size(); ++l) {
      if (rp.rss(l) == map.sentinel_dbm)
        rss.push_back(nullptr);
      else
        rss.push_back(rp.rss(l));
    }
    Json j = point_json(rp.position);
    j["id"] = rp.id;
    j["kind"] = std::string(to_string(rp.kind));
    j["rss"] = rss;
    rps.push_back(j);
  }
  return Json{{"aps", to_json(std::span<const AccessPoint>(map.aps))},
              {"sentinel_dbm", map.sentinel_dbm},
              {"area_m2", map.area_m2},
              {"rps", rps}};
}

Radiomap radiomap_from_json(const Json& doc) {
  std::vector<AccessPoint> aps = aps_from_json(doc.at("aps"));
  const double sentinel = doc.value("sentinel_dbm", kDefaultSentinelDbm);
  std::vector<ReferencePoint> real, virt;
  std::size_t n = 0;
  for (const auto& j : doc.at("rps")) {
    ReferencePoint rp;
    rp.id = j.value("id", "rp" + std::to_string(n++));
    rp.position = point_from(j);
    rp.kind = parse_rp_kind(j.value("kind", std::string("real")));
    const Json& rss = j.at("rss");
    if (rss.size() != aps.size()) throw DomainError("fingerprint length does not match APs");
    rp.rss.resize(static_cast<Eigen::Index>(rss.size()));
    for (std::size_t l = 0; l < rss.size(); ++l)
      rp.rss(static_cast<Eigen::Index>(l)) = rss[l].is_null() ? sentinel : rss[l].get<double>();
    (rp.kind == RpKind::real ? real : virt).push_back(std::move(rp));
  }
  double area = doc.value("area_m2", 0.0);
  if (!(area > 0)) area = 1.0;
  return make_radiomap(std::move(aps), std::move(real), std::move(virt), area, sentinel);
}

Radiomap load_radiomap(const fs::path& path) { return with_path(path, radiomap_from_json); }

// --------------------------------------------------------------- measurements

std::string to_csv(const MeasurementSet& meas, const std::string& id_column) {
  std::string out = id_column + ",x,y,z,ap_id,rss_dbm,scan_index\n";
  for (const auto& m : meas.records) {
    out += m.location_id;
    out += ',' + format_number(m.location.x());
    out += ',' + format_number(m.location.y());
    out += ',' + format_number(m.location.z());
    out += ',' + m.ap_id;
    out += ',' + (m.rss ? format_number(*m.rss) : std::string("ND"));
    out += ',' + std::to_string(m.scan_index);
    out += '\n';
  }
  return out;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell += c;
    }
  }
  out.push_back(cell);
  for (auto& s : out) {
    const auto b = s.find_first_not_of(" \t");
    const auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  return out;
}

double parse_double(const std::string& s, const std::string& source, std::size_t line) {
  double v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw InputError(source, "line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

}  // namespace

MeasurementSet measurements_from_csv(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line != "\r") header = split_csv_line(line);
  }
  if (header.empty()) throw InputError(source, "missing CSV header");

  auto column = [&](const std::string& name) -> std::size_t {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw InputError(source, "missing column '" + name + "'");
  };
  const std::size_t cx = column("x"), cy = column("y"), cz = column("z"), cap = column("ap_id"),
                    crss = column("rss_dbm"), cscan = column("scan_index");

  MeasurementSet meas;
  std::map<std::pair<std::string, std::string>, int> scans;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw InputError(source, "line " + std::to_string(line_no) + ": expected " +
                                   std::to_string(header.size()) + " columns");
    Measurement m;
    m.location_id = cells[0];
    m.location = {parse_double(cells[cx], source, line_no), parse_double(cells[cy], source, line_no),
                  parse_double(cells[cz], source, line_no)};
    m.ap_id = cells[cap];
    if (cells[crss] != "ND" && !cells[crss].empty()) {
      const double v = parse_double(cells[crss], source, line_no);
      if (v < kMinRssDbm || v > kMaxRssDbm)
        throw InputError(source, "line " + std::to_string(line_no) + ": RSS outside [-120, 0] dBm");
      m.rss = v;
    }
    m.scan_index = static_cast<int>(parse_double(cells[cscan], source, line_no));
    ++scans[{m.location_id, m.ap_id}];
    meas.records.push_back(std::move(m));
  }
  for (const auto& [key, n] : scans) meas.q = std::max(meas.q, n);
  return meas;
}

MeasurementSet load_measurements(const fs::path& path) {
  return measurements_from_csv(read_text(path), path.string());
}

// ---------------------------------------------------------------------- world

Json to_json(const WorldSpec& w) {
  Json truth = Json::object();
  for (const auto& [id, p] : w.truth) truth[id] = to_json(p, ModelKind::mwmf);
  return Json{{"name", w.name},
              {"floorplan", to_json(w.plan)},
              {"aps", to_json(std::span<const AccessPoint>(w.aps))},
              {"truth", truth},
              {"noise",
               {{"shadowing_sigma_db", w.noise.shadowing_sigma_db},
                {"device_bias_sigma_db", w.noise.device_bias_sigma_db},
                {"mismatch_sigma_db", w.noise.mismatch_sigma_db},
                {"mismatch_corr_length_m", w.noise.mismatch_corr_length_m}}},
              {"detection_floor_dbm", w.detection_floor_dbm},
              {"sentinel_dbm", w.sentinel_dbm},
              {"device_height_m", w.device_height_m},
              {"survey_count", w.survey_count},
              {"tp_count", w.tp_count},
              {"seed", w.seed}};
}

WorldSpec world_from_json(const Json& doc) {
  WorldSpec w;
  w.name = doc.value("name", std::string("custom"));
  w.plan = floorplan_from_json(doc.at("floorplan"));
  w.aps = aps_from_json(doc.at("aps"));
  const Json& truth = doc.at("truth");
  for (const auto& ap : w.aps) {
    if (truth.contains("gamma")) {
      w.truth[ap.id] = params_from_json(truth).second;
    } else if (truth.contains(ap.id)) {
      w.truth[ap.id] = params_from_json(truth.at(ap.id)).second;
    } else {
      throw UnknownAccessPoint("no truth parameters for AP '" + ap.id + "'");
    }
    if (!w.plan.bounds().contains(ap.position)) throw InvalidGeometry("AP '" + ap.id + "' outside bounds");
  }
  if (doc.contains("noise")) {
    const Json& n = doc.at("noise");
    w.noise.shadowing_sigma_db = n.value("shadowing_sigma_db", w.noise.shadowing_sigma_db);
    w.noise.device_bias_sigma_db = n.value("device_bias_sigma_db", w.noise.device_bias_sigma_db);
    w.noise.mismatch_sigma_db = n.value("mismatch_sigma_db", w.noise.mismatch_sigma_db);
    w.noise.mismatch_corr_length_m = n.value("mismatch_corr_length_m", w.noise.mismatch_corr_length_m);
  }
  if (w.noise.shadowing_sigma_db < 0 || w.noise.device_bias_sigma_db < 0 ||
      w.noise.mismatch_sigma_db < 0 || !(w.noise.mismatch_corr_length_m > 0))
    throw DomainError("noise parameters must be non-negative");
  w.detection_floor_dbm = doc.value("detection_floor_dbm", kDefaultDetectionFloorDbm);
  w.sentinel_dbm = doc.value("sentinel_dbm", kDefaultSentinelDbm);
  w.device_height_m = doc.value("device_height_m", 1.0);
  w.survey_count = doc.value("survey_count", std::size_t{0});
  w.tp_count = doc.value("tp_count", std::size_t{0});
  w.seed = doc.value("seed", std::uint64_t{0});
  attach_mismatch_fields(w);
  return w;
}

WorldSpec load_world(const fs::path& path) { return with_path(path, world_from_json); }

}  // namespace vifi::io
