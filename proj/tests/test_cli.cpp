// Copyright 2026 The qndsynth Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "commands.hpp"
#include "experiment.hpp"
#include "qndsynth/io.hpp"
#include "support.hpp"

namespace qnd::cli {
namespace {

namespace fs = std::filesystem;
using io::json;
using std::numbers::pi;

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           (std::string("qndsynth_cli_") + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const json& j) {
    const fs::path path = dir_ / name;
    io::write_text_file(path, j.dump());
    return path;
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "qndsynth");
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  static json observable() { return io::to_json(testing::reference_p()); }

  static json experiment(double theta, const std::string& mode = "stochastic") {
    return json{{"mode", mode},
                {"observable", observable()},
                {"synthesis", {{"sparse", false}}},
                {"measurement", {{"photon_box", {{"n", 8}, {"phi0", 0.125}, {"theta", theta}}}}},
                {"controller", {{"kind", "quadratic"}, {"u_bar", 0.1}}},
                {"loop", {{"steps", 100}}},
                {"initial_state", {{"diag", {0.5, 0.5, 0, 0, 0, 0, 0, 0}}}},
                {"ensemble", {{"realizations", 6}, {"master_seed", 42}, {"success_floor", 0.0}}}};
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

TEST_F(CliTest, SynthesizeReference) {
  const auto p = write("p.json", observable());
  EXPECT_EQ(run({"synthesize", "--p-diag", p.string(), "--out-dir", dir_.string()}), kOk) << err_.str();
  const auto syn = io::read_json_file(dir_ / "synthesis.json");
  EXPECT_TRUE(syn["feasible"].get<bool>());
  EXPECT_EQ(syn["config_hash"].get<std::string>().size(), 16u);
  const auto h1 = io::hermitian_from_json(io::read_json_file(dir_ / "h1.json"));
  EXPECT_EQ(h1.dim(), 8u);
  EXPECT_NE(out_.str().find("lambda_tilde"), std::string::npos);
}

TEST_F(CliTest, SynthesizeSparse) {
  const auto p = write("p.json", observable());
  EXPECT_EQ(run({"synthesize", "--p-diag", p.string(), "--sparse", "--out-dir", dir_.string()}), kOk) << err_.str();
  const auto h1 = io::hermitian_from_json(io::read_json_file(dir_ / "h1.json"));
  int nonzero = 0;
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = i + 1; j < 8; ++j) nonzero += std::abs(h1.matrix()(i, j)) > 1e-6;
  EXPECT_LE(nonzero, 7);
}

TEST_F(CliTest, SynthesizeInfeasibleExitsTwo) {
  const auto p = write("p.json", json{{"diag", {1.0, 1.0, 1.0}}, {"n_star", 0}});
  EXPECT_EQ(run({"synthesize", "--p-diag", p.string(), "--out-dir", dir_.string()}), kInfeasible);
  EXPECT_FALSE(err_.str().empty());
}

TEST_F(CliTest, SynthesizeNeedsObservable) {
  EXPECT_EQ(run({"synthesize", "--out-dir", dir_.string()}), kIoOrValidation);
  EXPECT_EQ(run({"synthesize", "--p-diag", (dir_ / "missing.json").string()}), kIoOrValidation);
}

TEST_F(CliTest, ValidateFlagsIndistinguishablePairs) {
  EXPECT_EQ(run({"validate", "--config", write("a.json", experiment(pi / 4)).string()}), kIoOrValidation);
  EXPECT_NE(err_.str().find("distinguishability"), std::string::npos);
  EXPECT_NE(out_.str().find("(0,4)"), std::string::npos);
  EXPECT_EQ(run({"validate", "--config", write("b.json", experiment(pi / 10)).string()}), kOk) << err_.str();
}

TEST_F(CliTest, ValidateDeterministicNeedsConnectivity) {
  auto cfg = experiment(pi / 10, "deterministic");
  cfg["synthesis"]["sparse"] = true;
  cfg["controller"] = {{"kind", "linear"}, {"kappa", 0.05}};
  cfg["h0"] = {{"diag", {0.0, 0.31, 0.97, 1.73, 2.61, 3.59, 4.67, 5.83}}};
  EXPECT_EQ(run({"validate", "--config", write("c.json", cfg).string()}), kIoOrValidation);
  EXPECT_NE(err_.str().find("full-connectivity"), std::string::npos);
}

TEST_F(CliTest, RejectsUnknownKeys) {
  auto cfg = experiment(pi / 10);
  cfg["colour"] = "blue";
  EXPECT_EQ(run({"simulate", "--config", write("d.json", cfg).string(), "--out-dir", dir_.string()}),
            kIoOrValidation);
  EXPECT_NE(err_.str().find("colour"), std::string::npos);
}

TEST_F(CliTest, SimulateIsDeterministicAcrossThreads) {
  const auto cfg = write("e.json", experiment(pi / 10));
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out-dir", (dir_ / "one").string(), "--threads", "1"}),
            kOk)
      << err_.str();
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out-dir", (dir_ / "many").string(), "--threads", "4"}),
            kOk);
  const auto a = slurp(dir_ / "one" / "trajectories.csv");
  EXPECT_EQ(a, slurp(dir_ / "many" / "trajectories.csv"));
  EXPECT_EQ(slurp(dir_ / "one" / "summary.json"), slurp(dir_ / "many" / "summary.json"));
  EXPECT_NE(a.find("realization,k,u,outcome"), std::string::npos);
}

TEST_F(CliTest, SimulateSeedOverrideChangesOutput) {
  const auto cfg = write("f.json", experiment(pi / 10));
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out-dir", (dir_ / "a").string()}), kOk);
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out-dir", (dir_ / "b").string(), "--seed", "7"}), kOk);
  EXPECT_NE(slurp(dir_ / "a" / "trajectories.csv"), slurp(dir_ / "b" / "trajectories.csv"));
}

TEST_F(CliTest, SimulateBelowFloorExitsFour) {
  auto cfg = experiment(pi / 10);
  cfg["loop"]["steps"] = 1;
  cfg["ensemble"]["success_floor"] = 0.95;
  EXPECT_EQ(run({"simulate", "--config", write("g.json", cfg).string(), "--out-dir", dir_.string()}), kBelowFloor);
}

TEST_F(CliTest, StochasticNeedsSeed) {
  auto cfg = experiment(pi / 10);
  cfg["ensemble"].erase("master_seed");
  EXPECT_EQ(run({"simulate", "--config", write("h.json", cfg).string(), "--out-dir", dir_.string()}),
            kIoOrValidation);
}

TEST_F(CliTest, UnknownSubcommand) { EXPECT_NE(run({"frobnicate"}), kOk); }

}  // namespace
}  // namespace qnd::cli
