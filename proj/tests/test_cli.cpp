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

#include <filesystem>
#include <sstream>

#include <gtest/gtest.h>

#include "cli.hpp"
#include "vifi/evaluation.hpp"
#include "vifi/io.hpp"

namespace vifi {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code;
  std::string out, err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "vifi");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("vifi_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string data() const { return (dir_ / "data").string(); }
  Outcome simulate(const std::string& tmpl = "spinv_like", const std::string& seed = "5") {
    return run_cli({"--seed", seed, "--out-dir", data(), "simulate", "--template", tmpl});
  }

  fs::path dir_;
};

TEST_F(CliTest, SimulateWritesDatasetDeterministically) {
  ASSERT_EQ(simulate().code, cli::kExitOk);
  for (const char* name : {"floorplan.json", "aps.json", "world.json", "measurements.csv", "testpoints.csv"})
    EXPECT_TRUE(fs::exists(dir_ / "data" / name)) << name;
  const std::string first = io::read_text(dir_ / "data" / "measurements.csv");
  EXPECT_EQ(first.substr(0, first.find('\n')), "rp_id,x,y,z,ap_id,rss_dbm,scan_index");
  ASSERT_EQ(simulate().code, cli::kExitOk);
  EXPECT_EQ(io::read_text(dir_ / "data" / "measurements.csv"), first);
  ASSERT_EQ(simulate("spinv_like", "6").code, cli::kExitOk);
  EXPECT_NE(io::read_text(dir_ / "data" / "measurements.csv"), first);
}

TEST_F(CliTest, SimulateHonoursDensityAndNoiseOverrides) {
  ASSERT_EQ(run_cli({"--seed", "1", "--out-dir", data(), "simulate", "--template", "twist_like",
                     "--dr", "0.2", "--shadowing", "0", "--mismatch", "0"})
                .code,
            cli::kExitOk);
  const auto meas = io::load_measurements(dir_ / "data" / "measurements.csv");
  EXPECT_EQ(average_scans(meas).size(), 90u);
  const auto world = io::load_world(dir_ / "data" / "world.json");
  EXPECT_EQ(world.noise.shadowing_sigma_db, 0.0);
}

TEST_F(CliTest, FitBuildLocatePipeline) {
  ASSERT_EQ(simulate().code, cli::kExitOk);
  const std::string fit_path = (dir_ / "fit.json").string();
  const auto f = run_cli({"fit", "--data-dir", data(), "--strategy", "per-ap", "--out", fit_path});
  ASSERT_EQ(f.code, cli::kExitOk) << f.err;
  const FitResult fitted = io::load_fit(fit_path);
  EXPECT_EQ(fitted.params_by_ap.size(), 7u);

  const std::string map_path = (dir_ / "map.json").string();
  const auto b = run_cli({"--seed", "5", "build-radiomap", "--data-dir", data(), "--fit", fit_path,
                          "--rho", "0.5", "--dv", "0.5", "--out", map_path});
  ASSERT_EQ(b.code, cli::kExitOk) << b.err;
  const Radiomap map = io::load_radiomap(map_path);
  EXPECT_EQ(map.real_count(), 36u);
  EXPECT_EQ(map.virtual_count(), 252u);

  const auto l = run_cli({"locate", "--radiomap", map_path, "--target",
                          (dir_ / "data" / "testpoints.csv").string(), "--k", "4"});
  ASSERT_EQ(l.code, cli::kExitOk) << l.err;
  const auto doc = io::Json::parse(l.out);
  ASSERT_TRUE(doc.is_array());
  ASSERT_EQ(doc.size(), 31u);
  EXPECT_EQ(doc[0].at("k"), 4);
  EXPECT_EQ(doc[0].at("neighbors").size(), 4u);
  EXPECT_EQ(doc[0].at("id"), "tp0");
}

TEST_F(CliTest, LocateSingleTargetPrintsObjectAndUsesAlpha) {
  ASSERT_EQ(simulate("twist_like").code, cli::kExitOk);
  const std::string map_path = (dir_ / "map.json").string();
  ASSERT_EQ(run_cli({"build-radiomap", "--data-dir", data(), "--out", map_path}).code, cli::kExitOk);
  const std::string target = (dir_ / "one.csv").string();
  io::write_text_atomic(target,
                        "tp_id,x,y,z,ap_id,rss_dbm,scan_index\n"
                        "q,0,0,0,ap1,-60,0\nq,0,0,0,ap2,-70,0\nq,0,0,0,ap3,ND,0\nq,0,0,0,ap4,-80,0\n");
  const auto l = run_cli({"locate", "--radiomap", map_path, "--target", target, "--alpha", "0.1"});
  ASSERT_EQ(l.code, cli::kExitOk) << l.err;
  const auto doc = io::Json::parse(l.out);
  ASSERT_TRUE(doc.is_object());
  EXPECT_EQ(doc.at("k"), 5);  // ceil(0.1 * 41)
  EXPECT_EQ(doc.at("id"), "q");
  EXPECT_EQ(run_cli({"locate", "--radiomap", map_path, "--target", target, "--k", "2", "--alpha",
                     "0.1"})
                .code,
            cli::kExitFailure);
}

TEST_F(CliTest, MissingInputIsBadInput) {
  const std::string missing = (dir_ / "absent" / "floorplan.json").string();
  const auto r = run_cli({"fit", "--floorplan", missing, "--aps", missing, "--measurements", missing});
  EXPECT_EQ(r.code, cli::kExitBadInput);
  EXPECT_NE(r.err.find(missing), std::string::npos);
}

TEST_F(CliTest, MalformedMeasurementsAreBadInput) {
  ASSERT_EQ(simulate("twist_like").code, cli::kExitOk);
  io::write_text_atomic(dir_ / "data" / "measurements.csv", "rp_id,x,y\n1,2,3\n");
  const auto r = run_cli({"fit", "--data-dir", data()});
  EXPECT_EQ(r.code, cli::kExitBadInput);
  EXPECT_NE(r.err.find("measurements.csv"), std::string::npos);
}

TEST_F(CliTest, TooFewRpsIsDegenerateFit) {
  ASSERT_EQ(simulate().code, cli::kExitOk);
  const auto r = run_cli({"--out-dir", dir_.string(), "fit", "--data-dir", data(), "--strategy",
                          "per-ap", "--rho", "0.01"});
  EXPECT_EQ(r.code, cli::kExitDegenerateFit);
  EXPECT_NE(r.err.find("degenerate fit"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir_ / "fit.json"));
}

TEST_F(CliTest, SingleApPerApMatchesEnvironment) {
  ASSERT_EQ(simulate("twist_like").code, cli::kExitOk);
  auto aps = io::load_aps(dir_ / "data" / "aps.json");
  aps.resize(1);
  io::write_json_atomic(dir_ / "data" / "aps.json", io::to_json(std::span<const AccessPoint>(aps)));
  auto meas = io::load_measurements(dir_ / "data" / "measurements.csv");
  std::erase_if(meas.records, [&](const Measurement& m) { return m.ap_id != aps[0].id; });
  io::write_text_atomic(dir_ / "data" / "measurements.csv", io::to_csv(meas));

  const std::string env = (dir_ / "env.json").string(), per = (dir_ / "per.json").string();
  ASSERT_EQ(run_cli({"fit", "--data-dir", data(), "--strategy", "env", "--out", env}).code, cli::kExitOk);
  ASSERT_EQ(run_cli({"fit", "--data-dir", data(), "--strategy", "per-ap", "--out", per}).code, cli::kExitOk);
  const auto a = io::read_json(env), b = io::read_json(per);
  EXPECT_EQ(a.at("params_by_ap"), b.at("params_by_ap"));
  EXPECT_EQ(a.at("residual_rms"), b.at("residual_rms"));
}

TEST_F(CliTest, NoFitRequiresParams) {
  ASSERT_EQ(simulate("twist_like").code, cli::kExitOk);
  EXPECT_EQ(run_cli({"fit", "--data-dir", data(), "--strategy", "nofit"}).code, cli::kExitFailure);
  const std::string params = (dir_ / "p.json").string();
  PropagationParams p;
  p.gamma = 2.0;
  p.l0 = 20.0;
  io::write_json_atomic(params, io::to_json(p, ModelKind::one_slope));
  const std::string out = (dir_ / "fit.json").string();
  ASSERT_EQ(run_cli({"fit", "--data-dir", data(), "--strategy", "nofit", "--model", "os", "--params",
                     params, "--out", out})
                .code,
            cli::kExitOk);
  EXPECT_EQ(io::load_fit(out).params_by_ap.begin()->second.l0, 20.0);
}

TEST_F(CliTest, EvaluateWritesReportsReproducibly) {
  ASSERT_EQ(simulate("twist_like").code, cli::kExitOk);
  auto evaluate = [&](const std::string& out) {
    return run_cli({"--seed", "3", "--out-dir", out, "evaluate", "--data-dir", data(), "--rho-grid",
                    "0.5,1", "--dv-grid", "0.5", "--alpha-range", "0.04:0.06"});
  };
  const auto first = evaluate((dir_ / "r1").string());
  ASSERT_EQ(first.code, cli::kExitOk) << first.err;
  EXPECT_NE(first.out.find("beta d_real="), std::string::npos);
  EXPECT_NE(first.out.find("k_est(0.05)="), std::string::npos);
  EXPECT_NE(first.out.find(" G="), std::string::npos);
  const auto second = evaluate((dir_ / "r2").string());
  ASSERT_EQ(second.code, cli::kExitOk);
  EXPECT_EQ(first.out, second.out);
  for (const char* stem : {"prediction", "positioning", "gain", "kest"})
    for (const char* ext : {".csv", ".json"}) {
      const std::string name = std::string(stem) + ext;
      ASSERT_TRUE(fs::exists(dir_ / "r1" / name)) << name;
      EXPECT_EQ(io::read_text(dir_ / "r1" / name), io::read_text(dir_ / "r2" / name)) << name;
    }
  EXPECT_EQ(read_kest_report(dir_ / "r1" / "kest.json").cells.size(), 2u);
}

TEST_F(CliTest, UsageErrors) {
  EXPECT_EQ(run_cli({"--help"}).code, cli::kExitOk);
  EXPECT_EQ(run_cli({"fit", "--no-such-flag"}).code, cli::kExitFailure);
  EXPECT_EQ(run_cli({"locate"}).code, cli::kExitFailure);
  EXPECT_EQ(run_cli({"--out-dir", data(), "simulate", "--template", "moon"}).code, cli::kExitFailure);
}

}  // namespace
}  // namespace vifi
