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

// Acceptance harness: prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "cli.hpp"
#include "support.hpp"
#include "vifi/evaluation.hpp"
#include "vifi/io.hpp"
#include "vifi/random.hpp"
#include "vifi/simulator.hpp"

namespace vifi {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

constexpr int kSeeds = 10;
constexpr WorldTemplate kTemplates[] = {WorldTemplate::spinv_like, WorldTemplate::twist_like};
const std::vector<double> kRho{0.1, 0.2, 0.5, 1.0};
constexpr double kDvMax = 10.0;
constexpr double kMildMismatchDb = 3.0;

struct Verdict {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Testbed controlled_bed(WorldTemplate t, std::uint64_t seed,
                       const ScenarioPreset& preset = ScenarioPreset::controlled()) {
  return testing::make_testbed(make_world(t, seed), preset);
}

// ------------------------------------------------------------------ criteria

Verdict exact_recovery() {
  const auto t0 = Clock::now();
  Verdict v;
  double worst_param = 0, worst_delta = 0;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const WorldSpec w = noiseless(make_world(WorldTemplate::spinv_like, seed));
    const auto c = simulate_campaign(w, survey_positions(w), {}, ScenarioPreset::controlled());
    const auto averages = average_scans(c.survey);
    std::vector<Point3> positions;
    for (const auto& a : averages) positions.push_back(a.position);
    for (double rho : kRho) {
      std::vector<std::string> ids;
      for (auto i : select_rp_indices(positions, rho, w.plan.bounds())) ids.push_back(averages[i].id);
      const auto subset = filter_locations(c.survey, ids);
      for (const auto& s : {FitStrategy::environment(), FitStrategy::specific_ap()}) {
        const FitResult r = fit(s, ModelKind::mwmf, w.plan, w.aps, subset);
        for (const auto& ap : w.aps) {
          const auto& got = r.params_for(ap.id);
          const auto& want = w.truth.at(ap.id);
          worst_param = std::max({worst_param, std::abs(got.gamma - want.gamma),
                                  std::abs(got.l_c - want.l_c),
                                  std::abs(got.loss(kWall) - want.loss(kWall)),
                                  std::abs(got.loss(kDoor) - want.loss(kDoor))});
        }
      }
    }
    const std::vector<FitStrategy> strategies{FitStrategy::environment(), FitStrategy::specific_ap()};
    const std::vector<ModelKind> models{ModelKind::mwmf};
    for (const auto& cell :
         run_prediction_analysis(c.survey, w.plan, w.aps, kRho, strategies, models).cells) {
      if (cell.status != "ok") v.pass = false;
      worst_delta = std::max(worst_delta, cell.mean_db);
    }
  }
  const double secs = seconds_since(t0);
  v.pass = v.pass && worst_param <= 1e-6 && worst_delta <= 1e-6 && secs < 5.0;
  v.detail = fmt("max |param error| %.2e, max mean delta %.2e dB, %.2f s", worst_param,
                 worst_delta, secs);
  return v;
}

// Each model is scored with the strategy that predicts best at each rho.
Verdict mwmf_beats_one_slope() {
  const auto t0 = Clock::now();
  Verdict v;
  std::ostringstream d;
  const std::vector<FitStrategy> strategies{FitStrategy::environment(), FitStrategy::specific_ap()};
  const std::vector<ModelKind> models{ModelKind::mwmf, ModelKind::one_slope};
  for (auto t : kTemplates) {
    // (rho, strategy, model) -> seed-averaged mean delta
    std::map<std::tuple<double, StrategyKind, ModelKind>, double> delta;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
      WorldSpec w = make_world(t, seed);
      w.noise.mismatch_sigma_db = kMildMismatchDb;
      const auto c = simulate_campaign(w, survey_positions(w), {}, ScenarioPreset::controlled());
      const auto r = run_prediction_analysis(c.survey, w.plan, w.aps, kRho, strategies, models);
      for (const auto& cell : r.cells) {
        if (cell.status != "ok") v.pass = false;
        delta[{cell.rho, cell.strategy, cell.model}] += cell.mean_db / kSeeds;
      }
    }
    double best_margin = 1e300, matched_margin = 1e300;
    for (double rho : kRho) {
      auto at = [&](StrategyKind s, ModelKind m) { return delta.at({rho, s, m}); };
      const double mwmf = std::min(at(StrategyKind::environment, ModelKind::mwmf),
                                   at(StrategyKind::specific_ap, ModelKind::mwmf));
      const double os = std::min(at(StrategyKind::environment, ModelKind::one_slope),
                                 at(StrategyKind::specific_ap, ModelKind::one_slope));
      best_margin = std::min(best_margin, os - mwmf);
      for (auto s : {StrategyKind::environment, StrategyKind::specific_ap})
        matched_margin = std::min(matched_margin, at(s, ModelKind::one_slope) - at(s, ModelKind::mwmf));
    }
    v.pass = v.pass && best_margin >= 1.0;
    d << to_string(t) << fmt(" min(OS - MWMF) %.2f dB (same strategy: %.2f dB); ", best_margin,
                             matched_margin);
  }
  const double secs = seconds_since(t0);
  v.pass = v.pass && secs < 60.0;
  d << fmt("%.1f s", secs);
  v.detail = d.str();
  return v;
}

Verdict nofit_degradation() {
  Verdict v;
  std::ostringstream d;
  const std::vector<double> rho{0.1};
  const std::vector<ModelKind> models{ModelKind::mwmf};
  for (auto t : kTemplates) {
    double fitted = 0, nofit = 0;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
      const WorldSpec w = make_world(t, seed);
      const auto c = simulate_campaign(w, survey_positions(w), {}, ScenarioPreset::controlled());
      auto rng = make_rng(seed, {0x6e6f666974});
      std::bernoulli_distribution up(0.5);
      auto nudge = [&](double x) { return x * (up(rng) ? 1.3 : 0.7); };
      PropagationParams p = w.truth.begin()->second;
      p.gamma = nudge(p.gamma);
      p.l_c = nudge(p.l_c);
      for (auto& [cls, loss] : p.loss_2d) loss = nudge(loss);
      const std::vector<FitStrategy> strategies{FitStrategy::environment(), FitStrategy::no_fit(p)};
      const auto r = run_prediction_analysis(c.survey, w.plan, w.aps, rho, strategies, models);
      fitted += r.cells[0].mean_db / kSeeds;
      nofit += r.cells[1].mean_db / kSeeds;
      if (r.cells[0].status != "ok" || r.cells[1].status != "ok") v.pass = false;
    }
    v.pass = v.pass && nofit - fitted >= 2.0;
    d << to_string(t) << fmt(" fitted %.2f dB, nofit %.2f dB; ", fitted, nofit);
  }
  v.detail = d.str();
  return v;
}

// Shared positioning results per template and seed.
struct PositioningRun {
  std::vector<double> eps_base;   // per rho, dv = 0, k_opt
  std::vector<double> eps_vifi;   // per rho, dv = 10, k_opt
  std::vector<double> gain;       // per rho
  std::vector<int> k_opt_base;    // per rho
};

PositioningRun positioning_run(const Testbed& bed, const std::vector<double>& rho) {
  const std::vector<double> dv{kDvMax};
  const auto sweep = run_positioning_sweep(bed, rho, dv, KPolicy{}, RadiomapRecipe{});
  PositioningRun out;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const auto& base = sweep.positioning.cells[2 * i];
    const auto& vifi = sweep.positioning.cells[2 * i + 1];
    if (base.status != "ok" || vifi.status != "ok" || !vifi.gain)
      throw Error("positioning cell failed: " + base.status + " / " + vifi.status);
    out.eps_base.push_back(base.mean_m);
    out.eps_vifi.push_back(vifi.mean_m);
    out.gain.push_back(*vifi.gain);
    out.k_opt_base.push_back(base.k);
  }
  return out;
}

std::map<WorldTemplate, std::vector<PositioningRun>> g_runs;
double g_positioning_seconds = 0;

void collect_positioning() {
  const auto t0 = Clock::now();
  for (auto t : kTemplates)
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed)
      g_runs[t].push_back(positioning_run(controlled_bed(t, seed), kRho));
  g_positioning_seconds = seconds_since(t0);
}

Verdict gain_trend() {
  Verdict v;
  std::ostringstream d;
  for (auto t : kTemplates) {
    double lo = 0, hi = 0;
    for (const auto& r : g_runs.at(t)) {
      lo += r.gain.front() / kSeeds;
      hi += r.gain.back() / kSeeds;
    }
    v.pass = v.pass && lo >= 1.2 && hi <= 1.15;
    d << to_string(t) << fmt(" G(dr_min) %.3f, G(dr_max) %.3f; ", lo, hi);
  }
  v.pass = v.pass && g_positioning_seconds < 300.0;
  d << fmt("%.1f s", g_positioning_seconds);
  v.detail = d.str();
  return v;
}

Verdict measurement_reduction() {
  Verdict v;
  std::ostringstream d;
  for (auto t : kTemplates) {
    double vifi = 0, dense = 0;
    for (const auto& r : g_runs.at(t)) {
      vifi += r.eps_vifi.front() / kSeeds;
      dense += r.eps_base.back() / kSeeds;
    }
    v.pass = v.pass && vifi <= 1.2 * dense;
    d << to_string(t) << fmt(" eps(dr_min, dv=10) %.3f m vs eps(dr_max, 0) %.3f m (ratio %.3f); ",
                             vifi, dense, vifi / dense);
  }
  v.detail = d.str();
  return v;
}

Verdict kest_rule() {
  Verdict v;
  std::ostringstream d;
  const std::vector<double> alpha{kDefaultAlpha};
  for (auto t : kTemplates) {
    std::vector<double> rel(kRho.size(), 0.0);
    double worst_seed = 0;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
      const auto r = run_kest_sweep(controlled_bed(t, seed), kRho, kDvMax, alpha, RadiomapRecipe{});
      for (std::size_t i = 0; i < kRho.size(); ++i) {
        if (r.cells[i].status != "ok") v.pass = false;
        const double x = r.cells[i].beta_m[0] / r.cells[i].mean_opt_m;
        rel[i] += x / kSeeds;
        worst_seed = std::max(worst_seed, x);
      }
    }
    d << to_string(t) << " beta/eps";
    for (double x : rel) {
      v.pass = v.pass && x <= 0.10;
      d << fmt(" %.3f", x);
    }
    d << fmt(" (worst single seed %.3f); ", worst_seed);
  }
  v.detail = d.str();
  return v;
}

Verdict k_opt_range() {
  Verdict v;
  std::ostringstream d;
  for (auto t : kTemplates) {
    int inside = 0, total = 0;
    for (const auto& r : g_runs.at(t))
      for (int k : r.k_opt_base) {
        ++total;
        if (k >= 1 && k <= 12) ++inside;
      }
    v.pass = v.pass && inside >= 0.9 * total;
    d << to_string(t) << fmt(" %d/%d in [1, 12]; ", inside, total);
  }
  v.detail = d.str();
  return v;
}

Verdict wknn_oracle() {
  Verdict v;
  std::mt19937_64 rng(0x6b6e6e);
  std::uniform_int_distribution<int> n_dist(1, 200), l_dist(1, 10), rss(-100, -30);
  std::uniform_real_distribution<double> pos(0.0, 50.0);
  int mismatches = 0;
  for (int instance = 0; instance < 1000; ++instance) {
    const int n = n_dist(rng), l = l_dist(rng);
    std::vector<AccessPoint> aps;
    for (int j = 0; j < l; ++j) aps.push_back({"ap" + std::to_string(j), Point3(0, 0, 3), 20});
    std::vector<ReferencePoint> rps;
    for (int i = 0; i < n; ++i) {
      Fingerprint f(l);
      for (int j = 0; j < l; ++j) f(j) = rss(rng);
      rps.push_back({"r" + std::to_string(i), Point3(pos(rng), pos(rng), 1.0), f,
                     i % 3 == 0 ? RpKind::virtual_rp : RpKind::real});
    }
    const Radiomap map = make_radiomap(aps, rps, {}, 2500.0);
    Fingerprint target(l);
    for (int j = 0; j < l; ++j) target(j) = rss(rng);
    if (instance % 10 == 0) target = map.rps[static_cast<std::size_t>(instance) % map.size()].rss;
    const int k = std::uniform_int_distribution<int>(1, n)(rng);
    const int order = instance % 2 == 0 ? 2 : 1;
    std::vector<std::size_t> chosen;
    const Point3 expected = testing::brute_force_wknn(map, target, k, kSimilarityCap, order, &chosen);
    const auto est = locate(map, target, {.k = k, .minkowski_order = static_cast<double>(order)});
    bool same = est.position == expected && est.neighbors.size() == chosen.size();
    for (std::size_t j = 0; same && j < chosen.size(); ++j) same = est.neighbors[j].rp == chosen[j];
    if (!same) ++mismatches;
  }
  v.pass = mismatches == 0;
  v.detail = fmt("%d/1000 instances differ from the brute-force oracle", mismatches);
  return v;
}

Verdict obstruction_oracle() {
  Verdict v;
  std::mt19937_64 rng(0x6f627374);
  std::uniform_real_distribution<double> u(0.0, 20.0);
  int compared = 0, skipped = 0, mismatches = 0;
  for (int plan_i = 0; plan_i < 100; ++plan_i) {
    const Floorplan plan = testing::random_plan(rng, 4 + plan_i % 17);
    for (int link = 0; link < 100; ++link) {
      const Point3 tx(u(rng), u(rng), 2.5), rx(u(rng), u(rng), 1.0);
      const Point2 p = tx.head<2>(), q = rx.head<2>();
      bool grazing = (p - q).norm() < 0.05;
      for (const auto& o : plan.obstacles()) grazing = grazing || testing::near_grazing(p, q, o, 1e-2);
      if (grazing) {
        ++skipped;
        continue;
      }
      ObstructionCount oracle;
      for (const auto& o : plan.obstacles()) {
        const int c = testing::sampled_crossings(p, q, o.a, o.b, 20000);
        if (c > 0) oracle.counts[o.cls] += c;
      }
      ++compared;
      if (count_obstructions(plan, tx, rx).counts != oracle.counts) ++mismatches;
    }
  }
  v.pass = mismatches == 0 && compared >= 8000;
  v.detail = fmt("%d mismatches over %d links (%d near-grazing links skipped)", mismatches, compared,
                 skipped);
  return v;
}

Verdict crowdsourcing_trend() {
  Verdict v;
  std::ostringstream d;
  const std::vector<double> rho{0.1, 1.0};
  for (auto t : kTemplates) {
    int worse_seeds = 0;
    double crowd_dense = 0, crowd_vifi = 0, ctrl_dense = 0;
    for (std::uint64_t seed = 1; seed <= kSeeds; ++seed) {
      const WorldSpec w = make_world(t, seed);
      const auto ctrl = positioning_run(testing::make_testbed(w, ScenarioPreset::controlled()), rho);
      const auto crowd =
          positioning_run(testing::make_testbed(w, ScenarioPreset::crowdsourcing_like()), rho);
      if (crowd.eps_base.back() > ctrl.eps_base.back()) ++worse_seeds;
      ctrl_dense += ctrl.eps_base.back() / kSeeds;
      crowd_dense += crowd.eps_base.back() / kSeeds;
      crowd_vifi += crowd.eps_vifi.front() / kSeeds;
    }
    v.pass = v.pass && crowd_dense > ctrl_dense && crowd_vifi <= 1.2 * crowd_dense;
    d << to_string(t)
      << fmt(" eps %.3f -> %.3f m (worse on %d/%d seeds), vifi %.3f m (ratio %.3f); ",
             ctrl_dense, crowd_dense, worse_seeds,
             kSeeds, crowd_vifi, crowd_vifi / crowd_dense);
  }
  v.detail = d.str();
  return v;
}

int run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "vifi");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  if (code != 0) throw Error("CLI failed: " + err.str());
  return code;
}

void cli_pipeline(const fs::path& root, const std::string& tmpl, const std::string& preset) {
  const std::string data = (root / "data").string();
  const std::string out = (root / "out").string();
  run_cli({"--seed", "11", "--out-dir", data, "simulate", "--template", tmpl, "--preset", preset});
  run_cli({"--seed", "11", "--out-dir", out, "fit", "--data-dir", data, "--strategy", "per-ap",
           "--rho", "0.5"});
  run_cli({"--seed", "11", "--out-dir", out, "build-radiomap", "--data-dir", data, "--fit",
           out + "/fit.json", "--rho", "0.5", "--dv", "1", "--placement", "random"});
  run_cli({"locate", "--radiomap", out + "/radiomap.json", "--target", data + "/testpoints.csv",
           "--alpha", "0.05", "--out", out + "/locate.json"});
  run_cli({"--seed", "11", "--out-dir", out, "evaluate", "--data-dir", data, "--rho-grid", "0.2,1",
           "--dv-grid", "0.5,2", "--placement", "random"});
}

Verdict cli_determinism() {
  Verdict v;
  const fs::path base = fs::temp_directory_path() / "vifi_acceptance_cli";
  fs::remove_all(base);
  int files = 0, differing = 0;
  for (const auto& [tmpl, preset] : {std::pair{"spinv_like", "controlled"}, {"twist_like", "crowdsourcing"}}) {
    const fs::path a = base / (std::string(tmpl) + "_a"), b = base / (std::string(tmpl) + "_b");
    cli_pipeline(a, tmpl, preset);
    cli_pipeline(b, tmpl, preset);
    for (const auto& entry : fs::recursive_directory_iterator(a)) {
      if (!entry.is_regular_file()) continue;
      const fs::path rel = fs::relative(entry.path(), a);
      ++files;
      if (!fs::exists(b / rel) || io::read_text(entry.path()) != io::read_text(b / rel)) ++differing;
    }
  }
  fs::remove_all(base);
  v.pass = differing == 0 && files >= 30;
  v.detail = fmt("%d of %d output files differ between reruns", differing, files);
  return v;
}

}  // namespace
}  // namespace vifi

int main() {
  using namespace vifi;
  struct Criterion {
    int id;
    const char* name;
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria{
      {1, "exact-recovery", exact_recovery},
      {2, "mwmf-vs-one-slope", mwmf_beats_one_slope},
      {3, "nofit-degradation", nofit_degradation},
      {4, "virtualization-gain", [] {
         collect_positioning();
         return gain_trend();
       }},
      {5, "measurement-reduction", measurement_reduction},
      {6, "k-est-rule", kest_rule},
      {7, "k-opt-range", k_opt_range},
      {8, "wknn-oracle", wknn_oracle},
      {9, "obstruction-oracle", obstruction_oracle},
      {10, "crowdsourcing-trend", crowdsourcing_trend},
      {11, "cli-determinism", cli_determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    while (!v.detail.empty() && (v.detail.back() == ' ' || v.detail.back() == ';')) v.detail.pop_back();
    std::printf("%s %2d %-22s %s\n", v.pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
