// Copyright 2026 The PTCB Authors
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

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "ptcb/config.hpp"
#include "ptcb/error.hpp"
#include "ptcb/gates.hpp"
#include "ptcb/io.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

fs::path ScratchDir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("ptcb_config_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string ConfigErrorOf(const json& j) {
  try {
    ptcb::parse_config(j);
  } catch (const ptcb::ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, MinimalUsesDefaults) {
  const auto c = ptcb::parse_config(json{{"gate", "toffoli"}, {"seed", 1}});
  const auto& e = c.experiment;
  EXPECT_EQ(e.gate, "toffoli");
  EXPECT_EQ(e.qubits, 3u);
  EXPECT_EQ(e.depths, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(e.outer_samples, 30u);
  EXPECT_EQ(e.inner_samples, 100u);
  EXPECT_EQ(e.shots, 0u);
  EXPECT_EQ(e.seed, 1u);
  EXPECT_EQ(e.estimator, ptcb::Estimator::Ratio);
  EXPECT_EQ(e.variant, ptcb::Variant::Standard);
  EXPECT_FALSE(e.noise.has_value());
}

TEST(Config, RoundTripIsStable) {
  const json j = {
      {"gate", "toffoli"},
      {"seed", 7},
      {"noise", {{"p", 0.01}, {"q", 0.02}, {"delta", 0.1}, {"control", 1}, {"target", 2}}},
      {"spam", {{"prep", 0.02}, {"meas", 0.01}}},
      {"depths", {0, 1, 2}},
      {"M", 50},
      {"M_prime", 20},
      {"shots", 1000},
      {"estimator", "fit"},
      {"pairs", json::array({json::array({"IIY", "IZY"})})},
      {"crb", {{"depths", {1, 3}}, {"M_prime", 10}, {"q_samples", 4}}}};
  const json once = ptcb::to_json(ptcb::parse_config(j));
  const json twice = ptcb::to_json(ptcb::parse_config(once));
  EXPECT_EQ(once.dump(), twice.dump());
  const auto c = ptcb::parse_config(once);
  EXPECT_EQ(c.experiment.noise->delta, 0.1);
  EXPECT_EQ(c.experiment.spam.prep_flip, 0.02);
  EXPECT_EQ(c.experiment.pairs.size(), 1u);
  EXPECT_EQ(c.experiment.estimator, ptcb::Estimator::Fit);
  EXPECT_EQ(c.crb.q_samples, 4u);
  EXPECT_EQ(c.crb.settings.depths, (std::vector<std::size_t>{1, 3}));
}

TEST(Config, RejectsTooManySegments) {
  const auto msg = ConfigErrorOf(json{{"gate", "toffoli"}, {"M", 300}});
  EXPECT_NE(msg.find("$.M"), std::string::npos) << msg;
  EXPECT_NE(msg.find("256"), std::string::npos) << msg;
  EXPECT_NO_THROW(ptcb::parse_config(json{{"M", 256}}));
}

TEST(Config, ReportsFieldPaths) {
  EXPECT_NE(ConfigErrorOf(json{{"gaet", "toffoli"}}).find("gaet"), std::string::npos);
  EXPECT_NE(ConfigErrorOf(json{{"noise", {{"p", 0.01}, {"x", 1}}}}).find("$.noise.x"),
            std::string::npos);
  EXPECT_NE(ConfigErrorOf(json{{"noise", {{"p", 1.5}}}}).find("$.noise"), std::string::npos);
  EXPECT_NE(ConfigErrorOf(json{{"M_prime", "many"}}).find("$.M_prime"), std::string::npos);
  EXPECT_NE(ConfigErrorOf(json{{"estimator", "median"}}).find("$.estimator"),
            std::string::npos);
  EXPECT_NE(ConfigErrorOf(json{{"pairs", json::array({json::array({"IIY", "ZZ"})})}}).find("$.pairs[0]"),
            std::string::npos);
  EXPECT_NE(ConfigErrorOf(json{{"threads", 4}}), "");
  EXPECT_NE(ConfigErrorOf(json::array()), "");
}

TEST(Config, LoadsTransferMatrixFiles) {
  const fs::path dir = ScratchDir("ptm");
  ptcb::io::write_ptm(dir / "noise.ptm", ptcb::dephasing_channel(0.05, 3));
  ptcb::io::write_text(dir / "run.json", R"({"gate": "toffoli", "noise_ptm": "noise.ptm"})");
  const auto c = ptcb::load_config(dir / "run.json");
  ASSERT_TRUE(c.experiment.noise_ptm.has_value());
  EXPECT_EQ(*c.experiment.noise_ptm, ptcb::dephasing_channel(0.05, 3));
  ptcb::io::write_text(dir / "bad.json", R"({"noise_ptm": "missing.ptm"})");
  EXPECT_THROW(ptcb::load_config(dir / "bad.json"), ptcb::ConfigError);
  ptcb::io::write_text(dir / "broken.json", "{not json");
  EXPECT_THROW(ptcb::load_config(dir / "broken.json"), ptcb::ConfigError);
}

TEST(Config, SweepPlanRoundTrip) {
  const json j = {{"kind", "spam-sweep"},
                  {"base", {{"M", 10}, {"M_prime", 5}}},
                  {"grid", {{"spam", {0.0, 0.02}}, {"shots", {100}}}},
                  {"ensemble", {{"size", 4}, {"low", 0.01}, {"high", 0.02}}},
                  {"seed", 3}};
  const auto plan = ptcb::parse_sweep_plan(j);
  EXPECT_EQ(plan.kind, ptcb::SweepKind::SpamSweep);
  EXPECT_EQ(plan.ensemble_size, 4u);
  EXPECT_EQ(plan.grid.spam.size(), 2u);
  EXPECT_EQ(ptcb::to_json(ptcb::parse_sweep_plan(ptcb::to_json(plan))).dump(),
            ptcb::to_json(plan).dump());
  json with_noise = j;
  with_noise["base"]["noise"] = {{"p", 0.01}};
  EXPECT_THROW(ptcb::parse_sweep_plan(with_noise), ptcb::ConfigError);
  json bad_kind = j;
  bad_kind["kind"] = "sideways";
  EXPECT_THROW(ptcb::parse_sweep_plan(bad_kind), ptcb::ConfigError);
}

TEST(Io, TransferMatrixTextRoundTrip) {
  const auto m = ptcb::composite_noise(ptcb::NoiseSpec{0.013, 0.021, 0.17, 0, 1, 0}, 2);
  EXPECT_EQ(ptcb::io::ptm_from_text(ptcb::io::ptm_to_text(m)), m);
  EXPECT_THROW(ptcb::io::ptm_from_text("2 16\n1 2 3"), ptcb::Error);
  EXPECT_EQ(ptcb::io::format_real(0.1), "0.1");
  EXPECT_EQ(ptcb::io::format_real(1.0), "1");
}

TEST(Io, CsvTablesParseBack) {
  ptcb::ExperimentConfig config;
  config.noise = ptcb::NoiseSpec{0.01, 0.01, 0.05, 0, 2, 0};
  config.inner_samples = 3;
  config.pairs = {{ptcb::PauliString::from_letters("IIY"), ptcb::PauliString::from_letters("IZY")}};
  const ptcb::Experiment e(config);
  std::vector<ptcb::SurvivalRecord> records;
  const auto pairs = ptcb::estimate_configured_pairs(e, &records);
  const auto table = ptcb::io::parse_csv(ptcb::io::records_csv(records, pairs));
  EXPECT_EQ(table.rows.size(), records.size());
  const auto col = table.column("probability");
  EXPECT_EQ(std::stod(table.rows[0][col]), records[0].probability);
  const auto pt = ptcb::io::parse_csv(ptcb::io::pairs_csv(pairs));
  ASSERT_EQ(pt.rows.size(), 1u);
  EXPECT_EQ(pt.rows[0][pt.column("p")], "IIY");
  EXPECT_THROW(table.column("nope"), ptcb::Error);
}

// --- command line ------------------------------------------------------------------

int RunCli(const std::string& args) {
  const std::string cmd = std::string(PTCB_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Cli, ExitCodes) {
  const fs::path dir = ScratchDir("cli");
  ptcb::io::write_text(dir / "ok.json",
                       R"({"gate": "toffoli", "M": 4, "M_prime": 3, "inner": "sampled",
                           "noise": {"p": 0.01, "q": 0.01, "delta": 0.05, "control": 0, "target": 2}})");
  ptcb::io::write_text(dir / "bad.json", R"({"gate": "toffoli", "M": 300})");
  ptcb::io::write_text(dir / "degenerate.json",
                       R"({"gate": "toffoli", "M": 4, "M_prime": 3,
                           "spam": {"prep": 0.5, "meas": 0.0}})");
  const std::string out = "--out " + (dir / "out").string();
  EXPECT_EQ(RunCli(out + " run-ptcb --config " + (dir / "ok.json").string()), 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "summary.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "pairs.csv"));
  EXPECT_TRUE(fs::exists(dir / "out" / "records.csv"));
  EXPECT_EQ(RunCli(out + " run-ptcb --config " + (dir / "bad.json").string()), 2);
  EXPECT_EQ(RunCli(out + " run-ptcb --config " + (dir / "missing.json").string()), 2);
  EXPECT_EQ(RunCli(out + " run-ptcb --config " + (dir / "degenerate.json").string()), 3);
  EXPECT_EQ(RunCli("run-ptcb"), 2);
  EXPECT_EQ(RunCli("no-such-command"), 2);
  EXPECT_EQ(RunCli("interleave --f-le 0.97 --f-e 0.999 --qubits 3"), 0);
  EXPECT_EQ(RunCli("interleave --f-le 0.97 --f-e 0.01 --qubits 3"), 3);
  EXPECT_EQ(RunCli("interleave --f-le 1.5 --f-e 0.99 --qubits 3"), 2);
  EXPECT_EQ(RunCli("dump-ptm --gate toffoli --file " + (dir / "t.ptm").string()), 0);
  EXPECT_EQ(ptcb::io::read_ptm(dir / "t.ptm"),
            ptcb::ptm_unitary(ptcb::gates::toffoli(), 3));
}

}  // namespace
