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

#include "vifi/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "vifi/errors.hpp"
#include "vifi/io.hpp"

namespace vifi {

namespace {

using io::Json;
using io::format_number;

void check_rho(double rho) {
  if (!(rho > 0.0) || rho > 1.0) throw DomainError("rho must lie in (0, 1]");
}

// Real RPs retained at one rho, with the model fitted on them.
struct RhoContext {
  std::vector<ReferencePoint> real;
  std::optional<FitResult> fit;
  std::string fit_status = "ok";
};

RhoContext prepare_rho(const Testbed& bed, const std::vector<ReferencePoint>& all_real, double rho,
                       const RadiomapRecipe& recipe, bool need_fit) {
  check_rho(rho);
  RhoContext ctx;
  ctx.real = select_rps(all_real, rho, bed.plan.bounds());
  if (!need_fit) return ctx;
  std::vector<std::string> ids;
  ids.reserve(ctx.real.size());
  for (const auto& rp : ctx.real) ids.push_back(rp.id);
  try {
    ctx.fit = fit(recipe.strategy, recipe.model, bed.plan, bed.aps,
                  filter_locations(bed.survey, ids), recipe.fixed);
  } catch (const Error& e) {
    ctx.fit_status = e.what();
  }
  return ctx;
}

Radiomap assemble(const Testbed& bed, const RhoContext& ctx, double d_virtual,
                  const RadiomapRecipe& recipe) {
  std::vector<ReferencePoint> virt;
  if (d_virtual > 0.0) {
    if (!ctx.fit) throw Error(ctx.fit_status);
    Placement placement = recipe.placement;
    placement.z = bed.device_height_m;
    const auto positions = place_virtual_rps(bed.plan, d_virtual, placement);
    virt = generate_virtual_fingerprints(*ctx.fit, recipe.model, bed.plan, bed.aps, positions,
                                         bed.sentinel_dbm, bed.detection_floor_dbm);
  }
  return make_radiomap(bed.aps, ctx.real, std::move(virt), bed.plan.area(), bed.sentinel_dbm);
}

std::vector<double> with_zero_first(std::span<const double> dv_grid) {
  std::vector<double> out{0.0};
  for (double dv : dv_grid) {
    if (dv < 0.0) throw DomainError("virtual RP density must be non-negative");
    if (dv > 0.0 && std::find(out.begin(), out.end(), dv) == out.end()) out.push_back(dv);
  }
  return out;
}

std::vector<double> column(const Eigen::MatrixXd& table, int k) {
  std::vector<double> out(static_cast<std::size_t>(table.rows()));
  for (Eigen::Index i = 0; i < table.rows(); ++i) out[static_cast<std::size_t>(i)] = table(i, k - 1);
  return out;
}

Json cdf_json(std::span<const double> values) {
  Json out = Json::array();
  for (const auto& p : empirical_cdf(values)) out.push_back({p.value, p.cumulative_fraction});
  return out;
}

Json box_json(const BoxStats& b) {
  return Json{{"min", b.min},       {"p25", b.p25}, {"median", b.median},
              {"p75", b.p75},       {"max", b.max}, {"outliers", b.outliers}};
}

BoxStats box_from(const Json& j) {
  BoxStats b;
  b.min = j.at("min").get<double>();
  b.p25 = j.at("p25").get<double>();
  b.median = j.at("median").get<double>();
  b.p75 = j.at("p75").get<double>();
  b.max = j.at("max").get<double>();
  b.outliers = j.at("outliers").get<std::vector<double>>();
  return b;
}

void write_report(const std::filesystem::path& path, ReportFormat format, const std::string& csv,
                  const Json& json) {
  if (format == ReportFormat::csv)
    io::write_text_atomic(path, csv);
  else
    io::write_json_atomic(path, json);
}

std::string num_or_empty(bool ok, double v) { return ok ? format_number(v) : std::string(); }

}  // namespace

Radiomap build_vifi_radiomap(const Testbed& bed, double rho, double d_virtual,
                             const RadiomapRecipe& recipe) {
  if (d_virtual < 0.0) throw DomainError("virtual RP density must be non-negative");
  const auto all_real = build_real_fingerprints(bed.survey, bed.aps, bed.sentinel_dbm);
  const auto ctx = prepare_rho(bed, all_real, rho, recipe, d_virtual > 0.0);
  return assemble(bed, ctx, d_virtual, recipe);
}

// ----------------------------------------------------------------- prediction

std::vector<double> PredictionCell::deltas() const {
  std::vector<double> out;
  out.reserve(errors.size());
  for (const auto& e : errors) out.push_back(e.delta_db);
  return out;
}

std::vector<double> PredictionCell::deltas_for(const std::string& ap_id) const {
  std::vector<double> out;
  for (const auto& e : errors)
    if (e.ap_id == ap_id) out.push_back(e.delta_db);
  return out;
}

PredictionReport run_prediction_analysis(const MeasurementSet& meas, const Floorplan& plan,
                                         std::span<const AccessPoint> aps,
                                         std::span<const double> rho_grid,
                                         std::span<const FitStrategy> strategies,
                                         std::span<const ModelKind> models,
                                         const PropagationParams& fixed) {
  const auto averages = average_scans(meas);
  if (averages.empty()) throw InsufficientData("no measurements");
  std::vector<Point3> locations;
  locations.reserve(averages.size());
  for (const auto& a : averages) locations.push_back(a.position);

  PredictionReport report;
  for (double rho : rho_grid) {
    check_rho(rho);
    const auto idx = select_rp_indices(locations, rho, plan.bounds());
    std::vector<std::string> ids;
    for (auto i : idx) ids.push_back(averages[i].id);
    const MeasurementSet subset = filter_locations(meas, ids);

    for (const auto& strategy : strategies) {
      for (ModelKind model : models) {
        PredictionCell cell;
        cell.rho = rho;
        cell.n_real = idx.size();
        cell.strategy = strategy.kind;
        cell.model = model;
        try {
          const FitResult fitted = fit(strategy, model, plan, aps, subset, fixed);
          const Eigen::MatrixXd predicted =
              predict_for_measurements(fitted, model, plan, aps, locations);
          for (std::size_t l = 0; l < aps.size(); ++l) {
            double sum = 0.0;
            std::size_t n = 0;
            for (std::size_t r = 0; r < averages.size(); ++r) {
              const auto it = averages[r].rss_by_ap.find(aps[l].id);
              if (it == averages[r].rss_by_ap.end() || !it->second) continue;
              const double delta = std::abs(
                  *it->second - predicted(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(l)));
              cell.errors.push_back({aps[l].id, averages[r].id, delta});
              sum += delta;
              ++n;
            }
            if (n > 0) cell.mean_by_ap[aps[l].id] = sum / static_cast<double>(n);
          }
          if (cell.mean_by_ap.empty()) throw InsufficientData("no detected RSS to compare against");
          double total = 0.0;
          for (const auto& ap : aps) {
            const auto it = cell.mean_by_ap.find(ap.id);
            if (it != cell.mean_by_ap.end()) total += it->second;
          }
          cell.mean_db = total / static_cast<double>(cell.mean_by_ap.size());
        } catch (const Error& e) {
          cell.status = e.what();
          cell.errors.clear();
          cell.mean_by_ap.clear();
          cell.mean_db = 0.0;
        }
        report.cells.push_back(std::move(cell));
      }
    }
  }
  return report;
}

// ---------------------------------------------------------------- positioning

SweepReport run_positioning_sweep(const Testbed& bed, std::span<const double> rho_grid,
                                  std::span<const double> dv_grid, const KPolicy& k_policy,
                                  const RadiomapRecipe& recipe) {
  if (bed.test_points.empty()) throw InsufficientData("no test points");
  if (!k_policy.optimal) {
    if (k_policy.fixed_k.empty()) throw DomainError("fixed-k policy needs at least one k");
    for (int k : k_policy.fixed_k)
      if (k < 1) throw DomainError("k must be at least 1");
  }
  const auto all_real = build_real_fingerprints(bed.survey, bed.aps, bed.sentinel_dbm);
  const auto dvs = with_zero_first(dv_grid);

  SweepReport out;
  out.positioning.strategy = recipe.strategy.kind;
  out.positioning.model = recipe.model;

  for (double rho : rho_grid) {
    const auto ctx = prepare_rho(bed, all_real, rho, recipe, dvs.size() > 1);
    std::vector<PositioningCell> baseline;
    for (double dv : dvs) {
      std::vector<PositioningCell> cells;
      auto make_cell = [&](int k) {
        PositioningCell c;
        c.rho = rho;
        c.d_virtual = dv;
        c.n_real = ctx.real.size();
        c.d_real = static_cast<double>(c.n_real) / bed.plan.area();
        c.k = k;
        return c;
      };
      try {
        const Radiomap map = assemble(bed, ctx, dv, recipe);
        const int n = static_cast<int>(map.size());
        const int k_max = k_policy.optimal
                              ? n
                              : std::min(n, *std::max_element(k_policy.fixed_k.begin(),
                                                              k_policy.fixed_k.end()));
        const Eigen::MatrixXd table = error_table(map, bed.test_points, k_max);
        std::vector<int> ks;
        if (k_policy.optimal)
          ks.push_back(argmin_k(table.colwise().mean().transpose(), 1, k_max));
        else
          ks = k_policy.fixed_k;
        for (int k : ks) {
          PositioningCell c = make_cell(k);
          c.n_virtual = map.virtual_count();
          if (k > n) {
            c.status = "k exceeds the number of reference points";
          } else {
            c.errors = column(table, k);
            c.mean_m = mean(c.errors);
            c.box = boxplot(c.errors);
          }
          cells.push_back(std::move(c));
        }
      } catch (const Error& e) {
        const auto ks = k_policy.optimal ? std::vector<int>{0} : k_policy.fixed_k;
        for (int k : ks) {
          PositioningCell c = make_cell(k);
          c.status = e.what();
          cells.push_back(std::move(c));
        }
      }
      if (dv == 0.0) {
        baseline = cells;
      } else {
        for (std::size_t j = 0; j < cells.size(); ++j) {
          auto& c = cells[j];
          const auto& base = baseline[j];
          if (c.status != "ok" || base.status != "ok" || c.mean_m <= 0.0) continue;
          c.gain = base.mean_m / c.mean_m;
          out.gain.cells.push_back({c.d_real, c.d_virtual, c.k, *c.gain});
        }
      }
      for (auto& c : cells) out.positioning.cells.push_back(std::move(c));
    }
  }
  return out;
}

// ---------------------------------------------------------------------- k_est

std::vector<double> alpha_grid(double alpha_min, double alpha_max, double step) {
  if (!(alpha_min > 0.0) || alpha_max < alpha_min || !(step > 0.0))
    throw DomainError("alpha range must satisfy 0 < min <= max and step > 0");
  std::vector<double> out;
  const auto n = static_cast<long>(std::floor((alpha_max - alpha_min) / step + 1e-9));
  for (long i = 0; i <= n; ++i) {
    // Snap away accumulated rounding error.
    const double a = alpha_min + static_cast<double>(i) * step;
    out.push_back(std::round(a * 1e9) / 1e9);
  }
  return out;
}

KestReport run_kest_sweep(const Testbed& bed, std::span<const double> rho_grid, double dv_max,
                          std::span<const double> alphas, const RadiomapRecipe& recipe) {
  if (bed.test_points.empty()) throw InsufficientData("no test points");
  for (double a : alphas)
    if (!(a > 0.0)) throw DomainError("alpha must be positive");
  const auto all_real = build_real_fingerprints(bed.survey, bed.aps, bed.sentinel_dbm);

  KestReport report;
  for (double rho : rho_grid) {
    const auto ctx = prepare_rho(bed, all_real, rho, recipe, dv_max > 0.0);
    KestCell cell;
    cell.rho = rho;
    cell.n_real = ctx.real.size();
    cell.d_real = static_cast<double>(cell.n_real) / bed.plan.area();
    cell.d_virtual = dv_max;
    try {
      const Radiomap map = assemble(bed, ctx, dv_max, recipe);
      cell.n_virtual = map.virtual_count();
      const int n = static_cast<int>(map.size());
      const Eigen::VectorXd curve = mean_error_curve(map, bed.test_points, n);
      cell.k_opt = argmin_k(curve, 1, n);
      cell.mean_opt_m = curve(cell.k_opt - 1);
      for (double a : alphas) {
        const int k = std::min(k_est_from_count(map.size(), a), n);
        cell.alphas.push_back(a);
        cell.k_est.push_back(k);
        cell.mean_est_m.push_back(curve(k - 1));
        cell.beta_m.push_back(curve(k - 1) - cell.mean_opt_m);
      }
    } catch (const Error& e) {
      cell.status = e.what();
    }
    report.cells.push_back(std::move(cell));
  }
  return report;
}

// -------------------------------------------------------------------- reports

void emit_report(const PredictionReport& report, const std::filesystem::path& path,
                 ReportFormat format) {
  std::string csv = "rho,n_real,strategy,model,mean_delta_db,p25,p50,p75,min,max,status\n";
  Json cells = Json::array();
  for (const auto& c : report.cells) {
    const bool ok = c.status == "ok";
    const auto d = c.deltas();
    const BoxStats b = d.empty() ? BoxStats{} : boxplot(d);
    csv += format_number(c.rho) + ',' + std::to_string(c.n_real) + ',' +
           std::string(to_string(c.strategy)) + ',' + std::string(to_string(c.model)) + ',' +
           num_or_empty(ok, c.mean_db) + ',' + num_or_empty(ok, b.p25) + ',' +
           num_or_empty(ok, b.median) + ',' + num_or_empty(ok, b.p75) + ',' +
           num_or_empty(ok, b.min) + ',' + num_or_empty(ok, b.max) + ',' +
           (ok ? std::string("ok") : std::string("failed")) + '\n';

    Json errors = Json::array();
    for (const auto& e : c.errors) errors.push_back({{"ap_id", e.ap_id}, {"rp_id", e.rp_id}, {"delta_db", e.delta_db}});
    Json per_ap = Json::object();
    for (const auto& [ap, m] : c.mean_by_ap)
      per_ap[ap] = {{"mean_db", m}, {"cdf", cdf_json(c.deltas_for(ap))}};
    cells.push_back({{"rho", c.rho},
                     {"n_real", c.n_real},
                     {"strategy", std::string(to_string(c.strategy))},
                     {"model", std::string(to_string(c.model))},
                     {"status", c.status},
                     {"mean_db", c.mean_db},
                     {"per_ap", per_ap},
                     {"errors", errors}});
  }
  write_report(path, format, csv, Json{{"kind", "prediction"}, {"cells", cells}});
}

void emit_report(const PositioningReport& report, const std::filesystem::path& path,
                 ReportFormat format) {
  const std::string strategy(to_string(report.strategy));
  const std::string model(to_string(report.model));
  std::string csv = "d_real,d_virtual,k,strategy,model,mean_error_m,p25,p50,p75,min,max,gain\n";
  Json cells = Json::array();
  for (const auto& c : report.cells) {
    const bool ok = c.status == "ok";
    csv += format_number(c.d_real) + ',' + format_number(c.d_virtual) + ',' + std::to_string(c.k) +
           ',' + strategy + ',' + model + ',' + num_or_empty(ok, c.mean_m) + ',' +
           num_or_empty(ok, c.box.p25) + ',' + num_or_empty(ok, c.box.median) + ',' +
           num_or_empty(ok, c.box.p75) + ',' + num_or_empty(ok, c.box.min) + ',' +
           num_or_empty(ok, c.box.max) + ',' + (c.gain ? format_number(*c.gain) : std::string()) +
           '\n';
    Json j{{"rho", c.rho},
           {"d_real", c.d_real},
           {"d_virtual", c.d_virtual},
           {"n_real", c.n_real},
           {"n_virtual", c.n_virtual},
           {"k", c.k},
           {"status", c.status},
           {"errors", c.errors},
           {"mean_m", c.mean_m},
           {"box", box_json(c.box)},
           {"cdf", cdf_json(c.errors)},
           {"gain", c.gain ? Json(*c.gain) : Json(nullptr)}};
    cells.push_back(std::move(j));
  }
  write_report(path, format, csv,
               Json{{"kind", "positioning"}, {"strategy", strategy}, {"model", model}, {"cells", cells}});
}

void emit_report(const GainReport& report, const std::filesystem::path& path, ReportFormat format) {
  std::string csv = "d_real,d_virtual,k,gain\n";
  Json cells = Json::array();
  for (const auto& c : report.cells) {
    csv += format_number(c.d_real) + ',' + format_number(c.d_virtual) + ',' + std::to_string(c.k) +
           ',' + format_number(c.gain) + '\n';
    cells.push_back({{"d_real", c.d_real}, {"d_virtual", c.d_virtual}, {"k", c.k}, {"gain", c.gain}});
  }
  write_report(path, format, csv, Json{{"kind", "gain"}, {"cells", cells}});
}

void emit_report(const KestReport& report, const std::filesystem::path& path, ReportFormat format) {
  std::string csv = "d_real,d_virtual,alpha,k_opt,k_est,mean_opt_m,mean_est_m,beta_m\n";
  Json cells = Json::array();
  for (const auto& c : report.cells) {
    for (std::size_t i = 0; i < c.alphas.size(); ++i)
      csv += format_number(c.d_real) + ',' + format_number(c.d_virtual) + ',' +
             format_number(c.alphas[i]) + ',' + std::to_string(c.k_opt) + ',' +
             std::to_string(c.k_est[i]) + ',' + format_number(c.mean_opt_m) + ',' +
             format_number(c.mean_est_m[i]) + ',' + format_number(c.beta_m[i]) + '\n';
    cells.push_back({{"rho", c.rho},
                     {"d_real", c.d_real},
                     {"d_virtual", c.d_virtual},
                     {"n_real", c.n_real},
                     {"n_virtual", c.n_virtual},
                     {"k_opt", c.k_opt},
                     {"mean_opt_m", c.mean_opt_m},
                     {"alphas", c.alphas},
                     {"k_est", c.k_est},
                     {"mean_est_m", c.mean_est_m},
                     {"beta_m", c.beta_m},
                     {"status", c.status}});
  }
  write_report(path, format, csv, Json{{"kind", "kest"}, {"cells", cells}});
}

namespace {

template <typename Fn>
auto read_report(const std::filesystem::path& path, const char* kind, Fn&& fn) {
  const Json doc = io::read_json(path);
  try {
    if (doc.value("kind", std::string()) != kind)
      throw InputError(path.string(), std::string("not a ") + kind + " report");
    return fn(doc);
  } catch (const Json::exception& e) {
    throw InputError(path.string(), e.what());
  }
}

}  // namespace

PredictionReport read_prediction_report(const std::filesystem::path& json_path) {
  return read_report(json_path, "prediction", [](const Json& doc) {
    PredictionReport r;
    for (const auto& j : doc.at("cells")) {
      PredictionCell c;
      c.rho = j.at("rho").get<double>();
      c.n_real = j.at("n_real").get<std::size_t>();
      c.strategy = parse_strategy(j.at("strategy").get<std::string>());
      c.model = parse_model(j.at("model").get<std::string>());
      c.status = j.at("status").get<std::string>();
      c.mean_db = j.at("mean_db").get<double>();
      for (const auto& [ap, v] : j.at("per_ap").items()) c.mean_by_ap[ap] = v.at("mean_db").get<double>();
      for (const auto& e : j.at("errors"))
        c.errors.push_back({e.at("ap_id").get<std::string>(), e.at("rp_id").get<std::string>(),
                            e.at("delta_db").get<double>()});
      r.cells.push_back(std::move(c));
    }
    return r;
  });
}

PositioningReport read_positioning_report(const std::filesystem::path& json_path) {
  return read_report(json_path, "positioning", [](const Json& doc) {
    PositioningReport r;
    r.strategy = parse_strategy(doc.at("strategy").get<std::string>());
    r.model = parse_model(doc.at("model").get<std::string>());
    for (const auto& j : doc.at("cells")) {
      PositioningCell c;
      c.rho = j.at("rho").get<double>();
      c.d_real = j.at("d_real").get<double>();
      c.d_virtual = j.at("d_virtual").get<double>();
      c.n_real = j.at("n_real").get<std::size_t>();
      c.n_virtual = j.at("n_virtual").get<std::size_t>();
      c.k = j.at("k").get<int>();
      c.status = j.at("status").get<std::string>();
      c.errors = j.at("errors").get<std::vector<double>>();
      c.mean_m = j.at("mean_m").get<double>();
      c.box = box_from(j.at("box"));
      if (!j.at("gain").is_null()) c.gain = j.at("gain").get<double>();
      r.cells.push_back(std::move(c));
    }
    return r;
  });
}

GainReport read_gain_report(const std::filesystem::path& json_path) {
  return read_report(json_path, "gain", [](const Json& doc) {
    GainReport r;
    for (const auto& j : doc.at("cells"))
      r.cells.push_back({j.at("d_real").get<double>(), j.at("d_virtual").get<double>(),
                         j.at("k").get<int>(), j.at("gain").get<double>()});
    return r;
  });
}

KestReport read_kest_report(const std::filesystem::path& json_path) {
  return read_report(json_path, "kest", [](const Json& doc) {
    KestReport r;
    for (const auto& j : doc.at("cells")) {
      KestCell c;
      c.rho = j.at("rho").get<double>();
      c.d_real = j.at("d_real").get<double>();
      c.d_virtual = j.at("d_virtual").get<double>();
      c.n_real = j.at("n_real").get<std::size_t>();
      c.n_virtual = j.at("n_virtual").get<std::size_t>();
      c.k_opt = j.at("k_opt").get<int>();
      c.mean_opt_m = j.at("mean_opt_m").get<double>();
      c.alphas = j.at("alphas").get<std::vector<double>>();
      c.k_est = j.at("k_est").get<std::vector<int>>();
      c.mean_est_m = j.at("mean_est_m").get<std::vector<double>>();
      c.beta_m = j.at("beta_m").get<std::vector<double>>();
      c.status = j.at("status").get<std::string>();
      r.cells.push_back(std::move(c));
    }
    return r;
  });
}

}  // namespace vifi
