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

#include "vifi/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "vifi/errors.hpp"
#include "vifi/fitting.hpp"
#include "vifi/random.hpp"

namespace vifi {

namespace {

constexpr int kMismatchFeatures = 64;
constexpr double kApHeight = 2.7;
constexpr int kMaxLayoutAttempts = 500;
constexpr double kTemplateRhoGrid[] = {0.1, 0.2, 0.5, 1.0};

// Stream identifiers for derive_seed.
enum Stream : std::uint64_t {
  kLayout = 1,
  kMismatch = 2,
  kSurveyScans = 3,
  kTpScans = 4,
  kSurveyBias = 5,
  kTpBias = 6,
  kTpPositions = 7,
};

struct OfficeLayout {
  double width, height;
  double corridor_lo, corridor_hi;
  double room_min, room_max;
  double door_width;
  double partition_door_prob;
};

void add_wall_with_door(std::vector<PlanarObstacle>& out, const Point2& a, const Point2& b,
                        double door_center, double door_width) {
  const Point2 dir = (b - a).normalized();
  const double len = (b - a).norm();
  const double lo = std::clamp(door_center - 0.5 * door_width, 0.0, len);
  const double hi = std::clamp(door_center + 0.5 * door_width, 0.0, len);
  if (lo > 1e-6) out.push_back({a, a + lo * dir, 0, kWall});
  if (hi - lo > 1e-6) out.push_back({a + lo * dir, a + hi * dir, 0, kDoor});
  if (len - hi > 1e-6) out.push_back({a + hi * dir, b, 0, kWall});
}

// Rooms on both sides of a corridor running along x. Every room has a door
// onto the corridor; some partitions carry a connecting door.
std::vector<PlanarObstacle> office_obstacles(const OfficeLayout& L, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<PlanarObstacle> out;
  struct Side {
    double wall_y, outer_y;
  };
  for (const Side side : {Side{L.corridor_lo, 0.0}, Side{L.corridor_hi, L.height}}) {
    double x0 = 0.0;
    while (x0 < L.width - 1e-9) {
      double x1 = x0 + L.room_min + (L.room_max - L.room_min) * unit(rng);
      if (L.width - x1 < 0.6 * L.room_min) x1 = L.width;
      const double span = x1 - x0;
      const double margin = 0.3 + 0.5 * L.door_width;
      const double door = margin + (span - 2 * margin) * unit(rng);
      add_wall_with_door(out, {x0, side.wall_y}, {x1, side.wall_y}, door, L.door_width);
      if (x1 < L.width - 1e-9) {
        const Point2 a{x1, side.wall_y};
        const Point2 b{x1, side.outer_y};
        const double depth = std::abs(side.outer_y - side.wall_y);
        if (unit(rng) < L.partition_door_prob) {
          const double pd = margin + (depth - 2 * margin) * unit(rng);
          add_wall_with_door(out, a, b, pd, L.door_width);
        } else {
          out.push_back({a, b, 0, kWall});
        }
      }
      x0 = x1;
    }
  }
  return out;
}

PropagationParams draw_truth(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PropagationParams p;
  p.l0 = kFreeSpaceL0Db;
  p.gamma = 1.8 + 0.5 * unit(rng);
  p.l_c = 0.5 + 2.5 * unit(rng);
  p.loss_2d[kWall] = 4.0 + 3.0 * unit(rng);
  p.loss_2d[kDoor] = 1.0 + 2.0 * unit(rng);
  return p;
}

// Full rank for both strategies on every template subset of the survey grid.
bool identifiable(const WorldSpec& world) {
  const WorldSpec clean = noiseless(world);
  const auto survey = survey_positions(clean);
  ScenarioPreset one_scan{ScenarioKind::controlled, 1, 1, 0.0};
  const Campaign c = simulate_campaign(clean, survey, {}, one_scan);
  const auto averaged = average_scans(c.survey);
  std::vector<Point3> positions;
  for (const auto& loc : averaged) positions.push_back(loc.position);
  for (double rho : kTemplateRhoGrid) {
    std::vector<std::string> keep;
    for (auto i : select_rp_indices(positions, rho, clean.plan.bounds()))
      keep.push_back(averaged[i].id);
    const MeasurementSet subset = filter_locations(c.survey, keep);
    try {
      fit(FitStrategy::environment(), ModelKind::mwmf, clean.plan, clean.aps, subset);
      fit(FitStrategy::specific_ap(), ModelKind::mwmf, clean.plan, clean.aps, subset);
    } catch (const DegenerateFit&) {
      return false;
    } catch (const InsufficientData&) {
      return false;
    }
  }
  return true;
}

WorldSpec draw_world(WorldTemplate tmpl, std::uint64_t seed, std::uint64_t attempt) {
  auto rng = make_rng(seed, {kLayout, attempt});
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  WorldSpec w;
  w.name = std::string(to_string(tmpl));
  w.seed = seed;
  w.device_height_m = 1.0;
  w.noise.shadowing_sigma_db = 3.0;
  w.noise.mismatch_sigma_db = kTemplateMismatchSigmaDb;
  w.noise.mismatch_corr_length_m = kTemplateMismatchCorrLengthM;

  OfficeLayout layout{};
  if (tmpl == WorldTemplate::spinv_like) {
    layout = {42.0, 12.0, 5.0, 7.0, 3.0, 5.5, 1.2, 0.35};
    w.survey_count = 72;
    w.tp_count = 31;
    for (int i = 0; i < 7; ++i) {
      const double x = 3.0 + 6.0 * i + (2.0 * unit(rng) - 1.0);
      w.aps.push_back({"ap" + std::to_string(i + 1), Point3(x, 6.0, kApHeight), 20.0});
    }
  } else {
    layout = {30.0, 15.0, 6.5, 8.5, 3.0, 5.0, 1.2, 0.35};
    w.survey_count = 41;
    w.tp_count = 80;
    const Point2 corners[] = {{2.0, 2.0}, {28.0, 2.0}, {2.0, 13.0}, {28.0, 13.0}};
    int i = 0;
    for (const auto& c : corners) {
      const double x = c.x() + 1.6 * unit(rng) - 0.8;
      const double y = c.y() + 1.6 * unit(rng) - 0.8;
      w.aps.push_back({"ap" + std::to_string(++i), Point3(x, y, kApHeight), 20.0});
    }
  }
  w.plan = Floorplan(Bounds{0.0, 0.0, layout.width, layout.height}, {0.0},
                     office_obstacles(layout, rng));
  const PropagationParams truth = draw_truth(rng);
  for (const auto& ap : w.aps) w.truth[ap.id] = truth;
  attach_mismatch_fields(w);
  return w;
}

}  // namespace

double MismatchField::operator()(const Point2& p, double corr_length_m) const {
  if (phases.size() == 0) return 0.0;
  const Eigen::VectorXd arg = (freqs.transpose() * (p / corr_length_m)) + phases;
  return std::sqrt(2.0 / static_cast<double>(phases.size())) * arg.array().cos().sum();
}

std::string_view to_string(WorldTemplate t) {
  return t == WorldTemplate::spinv_like ? "spinv_like" : "twist_like";
}

WorldTemplate parse_template(std::string_view name) {
  if (name == "spinv_like") return WorldTemplate::spinv_like;
  if (name == "twist_like") return WorldTemplate::twist_like;
  throw DomainError("unknown world template '" + std::string(name) + "'");
}

void attach_mismatch_fields(WorldSpec& world) {
  world.mismatch.clear();
  for (std::size_t a = 0; a < world.aps.size(); ++a) {
    auto rng = make_rng(world.seed, {kMismatch, a});
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
    MismatchField f;
    f.freqs.resize(2, kMismatchFeatures);
    f.phases.resize(kMismatchFeatures);
    for (int j = 0; j < kMismatchFeatures; ++j) {
      f.freqs(0, j) = normal(rng);
      f.freqs(1, j) = normal(rng);
      f.phases(j) = phase(rng);
    }
    world.mismatch.push_back(std::move(f));
  }
}

WorldSpec make_world(WorldTemplate tmpl, std::uint64_t seed) {
  WorldSpec w;
  for (int attempt = 0; attempt < kMaxLayoutAttempts; ++attempt) {
    w = draw_world(tmpl, seed, static_cast<std::uint64_t>(attempt));
    if (identifiable(w)) return w;
  }
  return w;
}

WorldSpec noiseless(WorldSpec world) {
  world.noise.shadowing_sigma_db = 0.0;
  world.noise.device_bias_sigma_db = 0.0;
  world.noise.mismatch_sigma_db = 0.0;
  return world;
}

double true_mean_rss(const WorldSpec& world, std::size_t ap_index, const Point3& p) {
  const AccessPoint& ap = world.aps.at(ap_index);
  auto it = world.truth.find(ap.id);
  if (it == world.truth.end()) throw UnknownAccessPoint("no truth parameters for AP '" + ap.id + "'");
  double rss = predict_rss(ModelKind::mwmf, it->second, world.plan, ap, p);
  const double sigma = world.noise.mismatch_sigma_db;
  if (sigma > 0 && ap_index < world.mismatch.size()) {
    const double ell = world.noise.mismatch_corr_length_m;
    const double d = link_distance(ap.position, p);
    rss += sigma * (1.0 - std::exp(-d / ell)) * world.mismatch[ap_index](p.head<2>(), ell);
  }
  return rss;
}

std::string_view to_string(ScenarioKind kind) {
  return kind == ScenarioKind::controlled ? "controlled" : "crowdsourcing";
}

ScenarioPreset parse_preset(std::string_view name) {
  if (name == "controlled") return ScenarioPreset::controlled();
  if (name == "crowdsourcing" || name == "crowdsourcing_like") return ScenarioPreset::crowdsourcing_like();
  throw DomainError("unknown scenario preset '" + std::string(name) + "'");
}

namespace {

MeasurementSet scan_locations(const WorldSpec& world, std::span<const Point3> positions,
                              const std::string& prefix, int scans, double bias,
                              std::mt19937_64& rng) {
  std::normal_distribution<double> shadow(0.0, 1.0);
  const double sigma = world.noise.shadowing_sigma_db;
  MeasurementSet out;
  out.q = scans;
  for (std::size_t n = 0; n < positions.size(); ++n) {
    if (!world.plan.bounds().contains(positions[n]))
      throw InvalidGeometry("campaign position outside the floorplan");
    const std::string id = prefix + std::to_string(n);
    for (std::size_t a = 0; a < world.aps.size(); ++a) {
      const double mean = true_mean_rss(world, a, positions[n]) + bias;
      for (int s = 0; s < scans; ++s) {
        double v = mean;
        if (sigma > 0) v += sigma * shadow(rng);
        Measurement m{id, positions[n], world.aps[a].id, std::nullopt, s};
        if (v >= world.detection_floor_dbm) m.rss = std::min(v, kMaxRssDbm);
        out.records.push_back(std::move(m));
      }
    }
  }
  return out;
}

}  // namespace

Campaign simulate_campaign(const WorldSpec& world, std::span<const Point3> rp_positions,
                           std::span<const Point3> tp_positions, const ScenarioPreset& preset) {
  if (preset.rp_scans < 1 || preset.tp_scans < 1) throw DomainError("scan counts must be >= 1");
  const double bias_sigma = std::max(preset.device_bias_sigma_db, world.noise.device_bias_sigma_db);
  auto draw_bias = [&](Stream stream) {
    if (!(bias_sigma > 0)) return 0.0;
    auto rng = make_rng(world.seed, {stream});
    return std::normal_distribution<double>(0.0, bias_sigma)(rng);
  };

  Campaign c;
  auto survey_rng = make_rng(world.seed, {kSurveyScans});
  c.survey = scan_locations(world, rp_positions, "rp", preset.rp_scans, draw_bias(kSurveyBias),
                            survey_rng);
  auto tp_rng = make_rng(world.seed, {kTpScans});
  c.tp_scans =
      scan_locations(world, tp_positions, "tp", preset.tp_scans, draw_bias(kTpBias), tp_rng);
  c.test_points = average_test_points(c.tp_scans, world.aps, world.sentinel_dbm);
  return c;
}

std::vector<Point3> grid_rp_positions(const Floorplan& plan, double d_real, double z) {
  if (!(d_real > 0)) throw DomainError("real RP density must be positive");
  if (!(plan.area() > 0)) throw InvalidGeometry("zero-area floorplan");
  const auto n = static_cast<std::size_t>(std::max(1.0, std::floor(d_real * plan.area() + 0.5)));
  return lattice_points(plan.bounds(), n, z);
}

std::vector<Point3> survey_positions(const WorldSpec& world) {
  return lattice_points(world.plan.bounds(), world.survey_count, world.device_height_m);
}

std::vector<Point3> random_tp_positions(const WorldSpec& world) {
  auto rng = make_rng(world.seed, {kTpPositions});
  const Bounds& b = world.plan.bounds();
  std::uniform_real_distribution<double> ux(b.min_x + 0.5, b.max_x - 0.5);
  std::uniform_real_distribution<double> uy(b.min_y + 0.5, b.max_y - 0.5);
  std::vector<Point3> out;
  for (std::size_t i = 0; i < world.tp_count; ++i) {
    const double x = ux(rng);
    const double y = uy(rng);
    out.emplace_back(x, y, world.device_height_m);
  }
  return out;
}

std::vector<TestPoint> average_test_points(const MeasurementSet& scans,
                                           std::span<const AccessPoint> aps, double sentinel_dbm) {
  std::vector<TestPoint> out;
  if (scans.records.empty()) return out;
  for (auto& rp : build_real_fingerprints(scans, aps, sentinel_dbm))
    out.push_back({rp.id, rp.position, std::move(rp.rss)});
  return out;
}

}  // namespace vifi
