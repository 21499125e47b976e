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

#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vifi/errors.hpp"
#include "vifi/evaluation.hpp"
#include "vifi/fitting.hpp"
#include "vifi/io.hpp"
#include "vifi/positioning.hpp"
#include "vifi/radiomap.hpp"
#include "vifi/random.hpp"
#include "vifi/simulator.hpp"

namespace vifi::cli {

namespace {

namespace fs = std::filesystem;
using io::Json;

// Stream identifiers for derive_seed.
constexpr std::uint64_t kPlacementStream = 0x706c6163ULL;

struct Globals {
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out_dir = ".";
  bool verbose = false;
};

struct DataPaths {
  std::string data_dir;
  std::string floorplan, aps, measurements, testpoints;

  void add(CLI::App* cmd, bool with_testpoints) {
    cmd->add_option("--data-dir", data_dir, "Directory holding the default input file names");
    cmd->add_option("--floorplan", floorplan, "Floorplan JSON");
    cmd->add_option("--aps", aps, "Access point JSON");
    cmd->add_option("--measurements", measurements, "RP measurement CSV");
    if (with_testpoints) cmd->add_option("--testpoints", testpoints, "Test point scan CSV");
  }

  fs::path resolve(const std::string& given, const char* default_name) const {
    if (!given.empty()) return given;
    if (data_dir.empty())
      throw InputError(default_name, "no path given (use --data-dir or the explicit flag)");
    return fs::path(data_dir) / default_name;
  }
  fs::path floorplan_path() const { return resolve(floorplan, "floorplan.json"); }
  fs::path aps_path() const { return resolve(aps, "aps.json"); }
  fs::path measurements_path() const { return resolve(measurements, "measurements.csv"); }
  fs::path testpoints_path() const { return resolve(testpoints, "testpoints.csv"); }
};

fs::path out_path(const Globals& g, const std::string& explicit_path, const char* name) {
  if (!explicit_path.empty()) return explicit_path;
  fs::create_directories(g.out_dir);
  return fs::path(g.out_dir) / name;
}

// Runs fit() and reports both rank problems and missing data as a degenerate fit.
FitResult checked_fit(const FitStrategy& strategy, ModelKind model, const Floorplan& plan,
                      std::span<const AccessPoint> aps, const MeasurementSet& meas,
                      const PropagationParams& fixed) {
  try {
    return fit(strategy, model, plan, aps, meas, fixed);
  } catch (const InsufficientData& e) {
    throw DegenerateFit("", e.what());
  }
}

MeasurementSet select_measurements(const MeasurementSet& meas, double rho, const Bounds& bounds) {
  if (!(rho > 0.0) || rho > 1.0) throw DomainError("rho must lie in (0, 1]");
  const auto averages = average_scans(meas);
  std::vector<Point3> positions;
  for (const auto& a : averages) positions.push_back(a.position);
  std::vector<std::string> ids;
  for (auto i : select_rp_indices(positions, rho, bounds)) ids.push_back(averages[i].id);
  return filter_locations(meas, ids);
}

PlacementKind parse_placement(const std::string& name) {
  if (name == "grid") return PlacementKind::grid;
  if (name == "random") return PlacementKind::random;
  throw DomainError("unknown placement '" + name + "'");
}

std::pair<double, double> parse_range(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DomainError("range must be written as min:max");
  try {
    return {std::stod(text.substr(0, colon)), std::stod(text.substr(colon + 1))};
  } catch (const std::exception&) {
    throw DomainError("bad range '" + text + "'");
  }
}

// ------------------------------------------------------------------- simulate

struct SimulateArgs {
  std::string tmpl = "spinv_like";
  std::string world_file;
  std::string preset = "controlled";
  std::optional<double> dr;
  std::optional<double> shadowing, bias, mismatch, corr_length;
};

int cmd_simulate(const Globals& g, const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  WorldSpec world;
  if (!a.world_file.empty()) {
    world = io::load_world(a.world_file);
    if (g.seed_given) world.seed = g.seed;
  } else {
    world = make_world(parse_template(a.tmpl), g.seed);
  }
  if (a.shadowing) world.noise.shadowing_sigma_db = *a.shadowing;
  if (a.mismatch) world.noise.mismatch_sigma_db = *a.mismatch;
  if (a.corr_length) world.noise.mismatch_corr_length_m = *a.corr_length;
  if (world.noise.shadowing_sigma_db < 0 || world.noise.mismatch_sigma_db < 0 ||
      !(world.noise.mismatch_corr_length_m > 0))
    throw DomainError("noise parameters must be non-negative");
  attach_mismatch_fields(world);

  ScenarioPreset preset = parse_preset(a.preset);
  if (a.bias) {
    if (*a.bias < 0) throw DomainError("device bias must be non-negative");
    preset.device_bias_sigma_db = *a.bias;
  }
  const auto rp_positions =
      a.dr ? grid_rp_positions(world.plan, *a.dr, world.device_height_m) : survey_positions(world);
  const auto tp_positions = random_tp_positions(world);
  const Campaign campaign = simulate_campaign(world, rp_positions, tp_positions, preset);

  fs::create_directories(g.out_dir);
  const fs::path dir(g.out_dir);
  io::write_json_atomic(dir / "floorplan.json", io::to_json(world.plan));
  io::write_json_atomic(dir / "aps.json", io::to_json(std::span<const AccessPoint>(world.aps)));
  io::write_json_atomic(dir / "world.json", io::to_json(world));
  io::write_text_atomic(dir / "measurements.csv", io::to_csv(campaign.survey, "rp_id"));
  io::write_text_atomic(dir / "testpoints.csv", io::to_csv(campaign.tp_scans, "tp_id"));
  if (g.verbose)
    err << "simulated " << rp_positions.size() << " RPs and " << tp_positions.size()
        << " TPs in " << world.name << "\n";
  out << "wrote " << (dir / "measurements.csv").string() << " and " << (dir / "testpoints.csv").string()
      << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------------ fit

struct FitArgs {
  DataPaths paths;
  std::string strategy = "env";
  std::string model = "mwmf";
  std::string params;
  double rho = 1.0;
  std::string out;
};

int cmd_fit(const Globals& g, const FitArgs& a, std::ostream& out, std::ostream& err) {
  const Floorplan plan = io::load_floorplan(a.paths.floorplan_path());
  const auto aps = io::load_aps(a.paths.aps_path());
  const MeasurementSet meas = io::load_measurements(a.paths.measurements_path());
  const StrategyKind kind = parse_strategy(a.strategy);
  const ModelKind model = parse_model(a.model);

  PropagationParams given;
  if (!a.params.empty()) given = io::load_params(a.params).second;
  if (kind == StrategyKind::no_fit && a.params.empty())
    throw DomainError("--strategy nofit requires --params");
  const FitStrategy strategy = kind == StrategyKind::environment   ? FitStrategy::environment()
                               : kind == StrategyKind::specific_ap ? FitStrategy::specific_ap()
                                                                   : FitStrategy::no_fit(given);
  const FitResult result =
      checked_fit(strategy, model, plan, aps, select_measurements(meas, a.rho, plan.bounds()), given);
  const fs::path path = out_path(g, a.out, "fit.json");
  io::write_json_atomic(path, io::to_json(result));
  if (g.verbose)
    for (const auto& w : result.warnings) err << "warning: " << w << "\n";
  out << "fit " << to_string(result.strategy) << "/" << to_string(result.model)
      << " m=" << result.m_used << " residual_rms=" << io::format_number(result.residual_rms)
      << " dB -> " << path.string() << "\n";
  return kExitOk;
}

// ------------------------------------------------------------- build-radiomap

struct BuildArgs {
  DataPaths paths;
  std::string fit_file, params, model = "mwmf";
  double rho = 1.0;
  double dv = 0.0;
  std::string placement = "grid";
  double sentinel = kDefaultSentinelDbm;
  double detection_floor = kDefaultDetectionFloorDbm;
  double device_height = 1.0;
  std::string out;
};

int cmd_build(const Globals& g, const BuildArgs& a, std::ostream& out, std::ostream& err) {
  const Floorplan plan = io::load_floorplan(a.paths.floorplan_path());
  const auto aps = io::load_aps(a.paths.aps_path());
  const MeasurementSet meas = io::load_measurements(a.paths.measurements_path());
  if (a.dv < 0) throw DomainError("--dv must be non-negative");

  const MeasurementSet used = select_measurements(meas, a.rho, plan.bounds());
  auto real = build_real_fingerprints(used, aps, a.sentinel);
  std::vector<ReferencePoint> virt;
  if (a.dv > 0) {
    FitResult fitted;
    ModelKind model = parse_model(a.model);
    if (!a.fit_file.empty()) {
      fitted = io::load_fit(a.fit_file);
      model = fitted.model;
    } else if (!a.params.empty()) {
      const auto [file_model, params] = io::load_params(a.params);
      model = file_model;
      fitted = checked_fit(FitStrategy::no_fit(params), model, plan, aps, used, params);
    } else {
      throw DomainError("--dv > 0 requires --fit or --params");
    }
    const Placement placement{parse_placement(a.placement), derive_seed(g.seed, {kPlacementStream}),
                              a.device_height};
    virt = generate_virtual_fingerprints(fitted, model, plan, aps,
                                         place_virtual_rps(plan, a.dv, placement), a.sentinel,
                                         a.detection_floor);
  }
  const Radiomap map = make_radiomap(aps, std::move(real), std::move(virt), plan.area(), a.sentinel);
  const fs::path path = out_path(g, a.out, "radiomap.json");
  io::write_json_atomic(path, io::to_json(map));
  if (g.verbose) err << "d_real=" << map.d_real() << " d_virtual=" << map.d_virtual() << "\n";
  out << "radiomap N_r=" << map.real_count() << " N_v=" << map.virtual_count() << " -> "
      << path.string() << "\n";
  return kExitOk;
}

// --------------------------------------------------------------------- locate

struct LocateArgs {
  std::string radiomap, target;
  std::optional<int> k;
  std::optional<double> alpha;
  double order = 2.0;
  std::string out;
};

int cmd_locate(const Globals& g, const LocateArgs& a, std::ostream& out, std::ostream&) {
  const Radiomap map = io::load_radiomap(a.radiomap);
  const auto targets = average_test_points(io::load_measurements(a.target), map.aps, map.sentinel_dbm);
  if (targets.empty()) throw InputError(a.target, "no target scans");
  WknnConfig cfg;
  cfg.minkowski_order = a.order;
  if (a.k)
    cfg.k = *a.k;
  else
    cfg.k = k_est_from_count(map.size(), a.alpha.value_or(kDefaultAlpha));

  Json results = Json::array();
  for (const auto& t : targets) {
    const PositionEstimate est = locate(map, t.rss, cfg);
    Json neighbors = Json::array();
    for (const auto& n : est.neighbors)
      neighbors.push_back({{"id", map.rps[n.rp].id}, {"index", n.rp}, {"similarity", n.similarity}});
    results.push_back({{"id", t.id},
                       {"x", est.position.x()},
                       {"y", est.position.y()},
                       {"z", est.position.z()},
                       {"k", cfg.k},
                       {"neighbors", neighbors}});
  }
  const Json doc = results.size() == 1 ? results[0] : results;
  if (!a.out.empty()) io::write_json_atomic(out_path(g, a.out, "locate.json"), doc);
  out << doc.dump(2) << "\n";
  return kExitOk;
}

// ------------------------------------------------------------------- evaluate

struct EvaluateArgs {
  DataPaths paths;
  std::string strategy = "env";
  std::string model = "mwmf";
  std::string params;
  std::vector<double> rho_grid = kDefaultRhoGrid;
  std::vector<double> dv_grid = kDefaultDvGrid;
  std::string alpha_range = "0.01:0.25";
  std::vector<int> fixed_k;
  std::string placement = "grid";
  double sentinel = kDefaultSentinelDbm;
  double detection_floor = kDefaultDetectionFloorDbm;
  double device_height = 1.0;
};

int cmd_evaluate(const Globals& g, const EvaluateArgs& a, std::ostream& out, std::ostream& err) {
  Testbed bed;
  bed.plan = io::load_floorplan(a.paths.floorplan_path());
  bed.aps = io::load_aps(a.paths.aps_path());
  bed.survey = io::load_measurements(a.paths.measurements_path());
  bed.test_points = average_test_points(io::load_measurements(a.paths.testpoints_path()), bed.aps,
                                        a.sentinel);
  bed.sentinel_dbm = a.sentinel;
  bed.detection_floor_dbm = a.detection_floor;
  bed.device_height_m = a.device_height;

  PropagationParams given;
  if (!a.params.empty()) given = io::load_params(a.params).second;
  const StrategyKind kind = parse_strategy(a.strategy);
  if (kind == StrategyKind::no_fit && a.params.empty())
    throw DomainError("--strategy nofit requires --params");

  RadiomapRecipe recipe;
  recipe.strategy = kind == StrategyKind::environment   ? FitStrategy::environment()
                    : kind == StrategyKind::specific_ap ? FitStrategy::specific_ap()
                                                        : FitStrategy::no_fit(given);
  recipe.model = parse_model(a.model);
  recipe.placement = {parse_placement(a.placement), derive_seed(g.seed, {kPlacementStream}),
                      a.device_height};
  recipe.fixed = given;

  const auto [alpha_min, alpha_max] = parse_range(a.alpha_range);
  const auto alphas = alpha_grid(alpha_min, alpha_max);
  KPolicy policy;
  if (!a.fixed_k.empty()) policy = {false, a.fixed_k};

  std::vector<FitStrategy> strategies{FitStrategy::environment(), FitStrategy::specific_ap()};
  if (!a.params.empty()) strategies.push_back(FitStrategy::no_fit(given));
  const std::vector<ModelKind> models{ModelKind::mwmf, ModelKind::one_slope};

  if (g.verbose) err << "prediction analysis\n";
  const PredictionReport prediction =
      run_prediction_analysis(bed.survey, bed.plan, bed.aps, a.rho_grid, strategies, models, given);
  if (g.verbose) err << "positioning sweep\n";
  const SweepReport sweep = run_positioning_sweep(bed, a.rho_grid, a.dv_grid, policy, recipe);
  if (g.verbose) err << "k_est sweep\n";
  const double dv_max =
      a.dv_grid.empty() ? 0.0 : *std::max_element(a.dv_grid.begin(), a.dv_grid.end());
  const KestReport kest = run_kest_sweep(bed, a.rho_grid, dv_max, alphas, recipe);

  fs::create_directories(g.out_dir);
  const fs::path dir(g.out_dir);
  for (auto fmt : {ReportFormat::csv, ReportFormat::json}) {
    const char* ext = fmt == ReportFormat::csv ? ".csv" : ".json";
    emit_report(prediction, dir / (std::string("prediction") + ext), fmt);
    emit_report(sweep.positioning, dir / (std::string("positioning") + ext), fmt);
    emit_report(sweep.gain, dir / (std::string("gain") + ext), fmt);
    emit_report(kest, dir / (std::string("kest") + ext), fmt);
  }

  std::size_t total = 0, failed = 0;
  auto tally = [&](const std::string& status) {
    ++total;
    if (status != "ok") ++failed;
  };
  for (const auto& c : prediction.cells) {
    tally(c.status);
    out << "delta rho=" << io::format_number(c.rho) << " " << to_string(c.strategy) << "/"
        << to_string(c.model) << ": "
        << (c.status == "ok" ? io::format_number(c.mean_db) + " dB" : "failed (" + c.status + ")")
        << "\n";
  }
  for (const auto& c : sweep.positioning.cells) {
    tally(c.status);
    out << "eps d_real=" << io::format_number(c.d_real) << " d_virtual=" << io::format_number(c.d_virtual)
        << " k=" << c.k << ": "
        << (c.status == "ok" ? io::format_number(c.mean_m) + " m" : "failed (" + c.status + ")");
    if (c.gain) out << " G=" << io::format_number(*c.gain);
    out << "\n";
  }
  for (const auto& c : kest.cells) {
    tally(c.status);
    if (c.status != "ok") {
      out << "beta d_real=" << io::format_number(c.d_real) << ": failed (" << c.status << ")\n";
      continue;
    }
    const auto it = std::find_if(c.alphas.begin(), c.alphas.end(),
                                 [](double x) { return std::abs(x - kDefaultAlpha) < 1e-12; });
    out << "beta d_real=" << io::format_number(c.d_real) << " d_virtual=" << io::format_number(c.d_virtual)
        << " k_opt=" << c.k_opt;
    if (it != c.alphas.end()) {
      const auto i = static_cast<std::size_t>(it - c.alphas.begin());
      out << " k_est(0.05)=" << c.k_est[i] << " beta(0.05)=" << io::format_number(c.beta_m[i]) << " m";
    }
    out << "\n";
  }
  return total > 0 && failed == total ? kExitFailure : kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"ViFi virtual fingerprinting toolkit", "vifi"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Master random seed");
  app.add_option("--out-dir", g.out_dir, "Output directory");
  app.add_flag("--verbose,-v", g.verbose, "Progress messages on stderr");

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Generate a synthetic world and measurement campaign");
  s->fallthrough();
  s->add_option("--template", sim.tmpl, "spinv_like | twist_like");
  s->add_option("--world", sim.world_file, "Custom world JSON instead of a template");
  s->add_option("--preset", sim.preset, "controlled | crowdsourcing");
  s->add_option("--dr", sim.dr, "Real RP density in RPs/m^2 (default: template survey grid)");
  s->add_option("--shadowing", sim.shadowing, "Shadowing sigma in dB");
  s->add_option("--bias", sim.bias, "Device bias sigma in dB");
  s->add_option("--mismatch", sim.mismatch, "Model mismatch amplitude in dB");
  s->add_option("--corr-length", sim.corr_length, "Model mismatch correlation length in m");

  FitArgs fa;
  auto* f = app.add_subcommand("fit", "Fit propagation parameters to RP measurements");
  f->fallthrough();
  fa.paths.add(f, false);
  f->add_option("--strategy", fa.strategy, "env | per-ap | nofit");
  f->add_option("--model", fa.model, "mwmf | os");
  f->add_option("--params", fa.params, "Params JSON (nofit values and fixed l0, lf, b)");
  f->add_option("--rho", fa.rho, "Fraction of RPs used");
  f->add_option("--out", fa.out, "Output path (default <out-dir>/fit.json)");

  BuildArgs ba;
  auto* b = app.add_subcommand("build-radiomap", "Build a real + virtual radiomap");
  b->fallthrough();
  ba.paths.add(b, false);
  auto* fit_opt = b->add_option("--fit", ba.fit_file, "Fit JSON");
  b->add_option("--params", ba.params, "Params JSON (used without fitting)")->excludes(fit_opt);
  b->add_option("--rho", ba.rho, "Fraction of RPs kept");
  b->add_option("--dv", ba.dv, "Virtual RP density in RPs/m^2");
  b->add_option("--placement", ba.placement, "grid | random");
  b->add_option("--sentinel", ba.sentinel, "Not-detected value in dBm");
  b->add_option("--detection-floor", ba.detection_floor, "Detection floor in dBm");
  b->add_option("--device-height", ba.device_height, "Height of virtual RPs in m");
  b->add_option("--out", ba.out, "Output path (default <out-dir>/radiomap.json)");

  LocateArgs la;
  auto* l = app.add_subcommand("locate", "Estimate target positions with WkNN");
  l->fallthrough();
  l->add_option("--radiomap", la.radiomap, "Radiomap JSON")->required();
  l->add_option("--target", la.target, "Target scan CSV")->required();
  auto* k_opt = l->add_option("--k", la.k, "Number of neighbours");
  l->add_option("--alpha", la.alpha, "k = ceil(alpha * N)")->excludes(k_opt);
  l->add_option("--order", la.order, "Minkowski order (>= 1)");
  l->add_option("--out", la.out, "Also write the result to this path");

  EvaluateArgs ea;
  auto* e = app.add_subcommand("evaluate", "Run the prediction, positioning and k_est sweeps");
  e->fallthrough();
  ea.paths.add(e, true);
  e->add_option("--strategy", ea.strategy, "env | per-ap | nofit (radiomap construction)");
  e->add_option("--model", ea.model, "mwmf | os (radiomap construction)");
  e->add_option("--params", ea.params, "Params JSON (adds the nofit strategy)");
  e->add_option("--rho-grid", ea.rho_grid, "Comma separated rho values")->delimiter(',');
  e->add_option("--dv-grid", ea.dv_grid, "Comma separated virtual densities")->delimiter(',');
  e->add_option("--alpha-range", ea.alpha_range, "min:max, step 0.01");
  e->add_option("--fixed-k", ea.fixed_k, "Evaluate these k instead of k_opt")->delimiter(',');
  e->add_option("--placement", ea.placement, "grid | random");
  e->add_option("--sentinel", ea.sentinel, "Not-detected value in dBm");
  e->add_option("--detection-floor", ea.detection_floor, "Detection floor in dBm");
  e->add_option("--device-height", ea.device_height, "Height of virtual RPs in m");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitFailure;
  }
  g.seed_given = app.count("--seed") > 0;

  try {
    if (*s) return cmd_simulate(g, sim, out, err);
    if (*f) return cmd_fit(g, fa, out, err);
    if (*b) return cmd_build(g, ba, out, err);
    if (*l) return cmd_locate(g, la, out, err);
    if (*e) return cmd_evaluate(g, ea, out, err);
  } catch (const InputError& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitBadInput;
  } catch (const DegenerateFit& ex) {
    err << "error: degenerate fit: " << ex.what() << "\n";
    return kExitDegenerateFit;
  } catch (const Error& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitFailure;
  } catch (const fs::filesystem_error& ex) {
    err << "error: " << ex.what() << "\n";
    return kExitBadInput;
  }
  return kExitFailure;
}

}  // namespace vifi::cli
