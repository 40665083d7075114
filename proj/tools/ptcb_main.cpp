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

// Command-line front end: single runs, character benchmarking, interleaved
// intervals, noise ensembles, sweeps and transfer-matrix dumps.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "ptcb/config.hpp"
#include "ptcb/crb.hpp"
#include "ptcb/error.hpp"
#include "ptcb/gates.hpp"
#include "ptcb/interleaved.hpp"
#include "ptcb/io.hpp"
#include "ptcb/noise.hpp"
#include "ptcb/protocol.hpp"
#include "ptcb/sweep.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kConfigExit = 2;
constexpr int kNumericalExit = 3;

struct Globals {
  std::optional<std::uint64_t> seed;
  unsigned threads = 1;
  std::string out = "ptcb-out";
};

struct ShotOptions {
  bool exact = false;
  std::optional<std::uint64_t> shots;
};

ptcb::RunConfig LoadRun(const std::string& path, const Globals& g, const ShotOptions& s) {
  ptcb::RunConfig run = ptcb::load_config(path);
  auto& e = run.experiment;
  if (g.seed) e.seed = *g.seed;
  if (s.exact) e.shots = 0;
  if (s.shots) e.shots = *s.shots;
  e.threads = g.threads;
  try {
    e.validate();
  } catch (const ptcb::ValidationError& err) {
    throw ptcb::ConfigError(fmt::format("$: {}", err.what()));
  }
  run.crb.settings.seed = e.seed;
  run.crb.settings.shots = e.shots;
  run.crb.settings.spam = e.spam;
  run.crb.settings.threads = g.threads;
  return run;
}

json PairsJson(const std::vector<ptcb::PairEstimate>& pairs) {
  json out = json::array();
  for (const auto& p : pairs) {
    out.push_back(json{{"p", p.p.letters()},
                       {"q", p.q.letters()},
                       {"ideal_entry", p.ideal_entry},
                       {"product", p.product},
                       {"exact_product", p.exact_product},
                       {"clifford_sign", p.clifford_sign},
                       {"status", p.failed ? "failed: " + p.error : "ok"}});
  }
  return out;
}

void WriteJson(const fs::path& path, const json& j) { ptcb::io::write_text(path, j.dump(2) + "\n"); }

int RunPtcb(const std::string& config_path, const ShotOptions& shots, bool dump_ptm,
            const Globals& g) {
  const ptcb::RunConfig run = LoadRun(config_path, g, shots);
  const ptcb::Experiment experiment(run.experiment);
  const fs::path out(g.out);
  json summary;
  summary["config"] = ptcb::to_json(run);
  summary["seed"] = run.experiment.seed;
  summary["true_fidelity"] = experiment.true_fidelity();
  summary["true_combined_fidelity"] = experiment.true_combined_fidelity();

  if (!run.experiment.pairs.empty()) {
    std::vector<ptcb::SurvivalRecord> records;
    const auto pairs = ptcb::estimate_configured_pairs(experiment, &records);
    ptcb::io::write_text(out / "records.csv", ptcb::io::records_csv(records, pairs));
    ptcb::io::write_text(out / "pairs.csv", ptcb::io::pairs_csv(pairs));
    summary["pairs"] = PairsJson(pairs);
    for (const auto& p : pairs) {
      std::cout << fmt::format("{} {}  product {:.10g}  exact {:.10g}\n", p.p.letters(),
                               p.q.letters(), p.product, p.exact_product);
    }
  } else {
    const ptcb::FidelityEstimate est = ptcb::estimate_fidelity(experiment);
    ptcb::io::write_text(out / "records.csv", ptcb::io::records_csv(est.records, est.pairs));
    ptcb::io::write_text(out / "pairs.csv", ptcb::io::pairs_csv(est.pairs, est.sampled));
    summary["estimate"] = est.estimate;
    summary["exact_bound"] = est.exact_bound;
    summary["clamp_count"] = est.clamp_count;
    std::size_t failed = 0;
    for (const auto& p : est.pairs) failed += p.failed ? 1 : 0;
    summary["failed_pairs"] = failed;
    summary["pairs"] = PairsJson(est.pairs);
    std::cout << fmt::format("F_hat {:.10g}  exact bound {:.10g}  F {:.10g}  clamps {}\n",
                             est.estimate, est.exact_bound, est.true_fidelity,
                             est.clamp_count);
  }
  WriteJson(out / "summary.json", summary);
  if (dump_ptm) {
    ptcb::io::write_ptm(out / "ideal.ptm", experiment.ideal());
    ptcb::io::write_ptm(out / "noise.ptm", experiment.noise());
    ptcb::io::write_ptm(out / "noisy_gate.ptm", experiment.noisy_gate());
    if (experiment.pauli_noise()) {
      ptcb::io::write_ptm(out / "pauli_noise.ptm", *experiment.pauli_noise());
    }
  }
  return 0;
}

int RunCrb(const std::string& config_path, const ShotOptions& shots, const Globals& g) {
  const ptcb::RunConfig run = LoadRun(config_path, g, shots);
  const ptcb::Experiment experiment(run.experiment);
  if (!experiment.pauli_noise()) {
    throw ptcb::ConfigError("$.pauli_noise: run-crb needs pauli_noise or pauli_noise_ptm");
  }
  const auto& noise = *experiment.pauli_noise();
  const ptcb::TwirlFidelityEstimate est =
      run.crb.qs.empty()
          ? ptcb::estimate_twirl_fidelity(noise, run.crb.q_samples, run.crb.settings, true)
          : ptcb::estimate_twirl_fidelity(noise, run.crb.qs, run.crb.settings, true);
  const fs::path out(g.out);
  ptcb::io::write_text(out / "crb_records.csv",
                       ptcb::io::crb_records_csv(est.records, est.eigenvalues));
  ptcb::io::write_text(out / "eigenvalues.csv", ptcb::io::eigenvalues_csv(est.eigenvalues));
  json summary;
  summary["config"] = ptcb::to_json(run);
  summary["seed"] = run.experiment.seed;
  summary["twirl_fidelity"] = est.estimate;
  summary["exact_twirl_fidelity"] = est.exact;
  json eig = json::array();
  for (const auto& e : est.eigenvalues) {
    eig.push_back(json{{"q", e.q.letters()},
                       {"eigenvalue", e.eigenvalue},
                       {"exact", e.exact},
                       {"status", e.failed ? "failed: " + e.error : "ok"}});
  }
  summary["eigenvalues"] = eig;
  WriteJson(out / "summary.json", summary);
  std::cout << fmt::format("F(E) estimate {:.10g}  exact {:.10g}\n", est.estimate, est.exact);
  return 0;
}

double ReadSummaryValue(const std::string& path, std::initializer_list<const char*> keys) {
  json j;
  try {
    j = json::parse(ptcb::io::read_text(path));
  } catch (const json::exception& e) {
    throw ptcb::ConfigError(fmt::format("{}: {}", path, e.what()));
  }
  for (const char* k : keys) {
    if (j.contains(k) && j[k].is_number()) return j[k].get<double>();
  }
  throw ptcb::ConfigError(fmt::format("{}: no fidelity field found", path));
}

std::size_t ReadSummaryQubits(const std::string& path) {
  try {
    const json j = json::parse(ptcb::io::read_text(path));
    return j.at("config").at("qubits").get<std::size_t>();
  } catch (const json::exception& e) {
    throw ptcb::ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

int Interleave(std::optional<double> f_le, std::optional<double> f_e,
               std::optional<std::size_t> qubits, const std::string& ptcb_summary,
               const std::string& crb_summary, bool write, const Globals& g) {
  if (!ptcb_summary.empty()) {
    f_le = ReadSummaryValue(ptcb_summary, {"estimate"});
    if (!qubits) qubits = ReadSummaryQubits(ptcb_summary);
  }
  if (!crb_summary.empty()) f_e = ReadSummaryValue(crb_summary, {"twirl_fidelity"});
  if (!f_le || !f_e || !qubits) {
    throw ptcb::ConfigError("interleave needs F(Lambda E), F(E) and the qubit count");
  }
  const std::size_t d = std::size_t{1} << *qubits;
  const ptcb::FidelityInterval iv = ptcb::fidelity_interval(*f_le, *f_e, d);
  std::cout << fmt::format("F(Lambda) in [{:.10g}, {:.10g}]  E {:.6g}  branch {}\n", iv.lower,
                           iv.upper, iv.e_bound, iv.branch);
  if (write) {
    WriteJson(fs::path(g.out) / "interval.json",
              json{{"f_le", *f_le},
                   {"f_e", *f_e},
                   {"d", d},
                   {"lower", iv.lower},
                   {"upper", iv.upper},
                   {"e_bound", iv.e_bound},
                   {"branch", iv.branch},
                   {"branches", iv.branches}});
  }
  return 0;
}

int SampleNoise(std::size_t count, std::size_t qubits, double low, double high, bool dump,
                const Globals& g) {
  const auto ensemble = ptcb::sample_noise_ensemble(count, qubits, low, high,
                                                    g.seed.value_or(1), {}, g.threads);
  std::string csv = "index,target_infidelity,infidelity,p,q,delta,control,target\n";
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const auto& s = ensemble[i];
    csv += fmt::format("{},{},{},{},{},{},{},{}\n", i, ptcb::io::format_real(s.target_infidelity),
                       ptcb::io::format_real(s.infidelity), ptcb::io::format_real(s.spec.p),
                       ptcb::io::format_real(s.spec.q), ptcb::io::format_real(s.spec.delta),
                       s.spec.control, s.spec.target);
    if (dump) {
      ptcb::io::write_ptm(fs::path(g.out) / fmt::format("channel_{}.ptm", i), s.channel);
    }
  }
  ptcb::io::write_text(fs::path(g.out) / "noise_ensemble.csv", csv);
  std::cout << fmt::format("{} channels written to {}\n", ensemble.size(), g.out);
  return 0;
}

int RunSweep(const std::string& plan_path, const Globals& g) {
  ptcb::SweepPlan plan = ptcb::load_sweep_plan(plan_path);
  if (g.seed) plan.seed = *g.seed;
  plan.threads = g.threads;
  const auto rows = ptcb::run_sweep(plan);
  ptcb::io::write_text(fs::path(g.out) / "sweep.csv", ptcb::sweep_csv(rows));
  WriteJson(fs::path(g.out) / "plan.json", ptcb::to_json(plan));
  std::size_t failed = 0;
  for (const auto& r : rows) failed += r.status == "ok" ? 0 : 1;
  std::cout << fmt::format("{} rows ({} failed) written to {}\n", rows.size(), failed, g.out);
  return 0;
}

int EmitPlotdata(const std::string& table, double low, double high, std::size_t bins,
                 const Globals& g) {
  const auto files = ptcb::emit_plotdata(ptcb::io::read_text(table), low, high, bins);
  for (const auto& [name, content] : files) {
    ptcb::io::write_text(fs::path(g.out) / name, content);
    std::cout << (fs::path(g.out) / name).string() << "\n";
  }
  return 0;
}

int DumpPtm(const std::string& config_path, const std::string& gate, std::size_t qubits,
            const std::string& which, const std::string& file, const Globals& g) {
  ptcb::TransferMatrix m;
  if (!config_path.empty()) {
    const ptcb::RunConfig run = LoadRun(config_path, g, {});
    const ptcb::Experiment experiment(run.experiment);
    if (which == "ideal") {
      m = experiment.ideal();
    } else if (which == "noise") {
      m = experiment.noise();
    } else if (which == "noisy") {
      m = experiment.noisy_gate();
    } else if (which == "pauli-noise") {
      if (!experiment.pauli_noise()) throw ptcb::ConfigError("$.pauli_noise: not set");
      m = *experiment.pauli_noise();
    } else {
      throw ptcb::ConfigError(fmt::format("unknown matrix '{}'", which));
    }
  } else {
    ptcb::ExperimentConfig c;
    c.gate = gate;
    c.qubits = gate == "identity" ? qubits : 3;
    try {
      c.validate();
    } catch (const ptcb::ValidationError& e) {
      throw ptcb::ConfigError(e.what());
    }
    m = ptcb::ptm_unitary(ptcb::resolve_gate_unitary(c), c.qubits);
  }
  const std::string text = ptcb::io::ptm_to_text(m);
  if (file.empty() || file == "-") {
    std::cout << text;
  } else {
    ptcb::io::write_text(file, text);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pauli transfer character benchmarking simulator"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "Override the random seed");
  app.add_option("--threads", g.threads, "Worker threads (results do not depend on it)")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", g.out, "Output directory (dump-ptm: output file)");

  std::string config_path;
  ShotOptions shots;
  std::uint64_t shot_value = 0;
  bool dump_ptm = false;

  auto* ptcb_cmd = app.add_subcommand("run-ptcb", "Estimate the fidelity bound of one gate");
  ptcb_cmd->add_option("--config", config_path, "Run configuration (JSON)")->required();
  auto* exact_flag = ptcb_cmd->add_flag("--exact", shots.exact, "Exact survival probabilities");
  auto* shots_opt = ptcb_cmd->add_option("--shots", shot_value, "Shots per circuit");
  exact_flag->excludes(shots_opt);
  ptcb_cmd->add_flag("--dump-ptm", dump_ptm, "Also write the transfer matrices");

  auto* crb_cmd = app.add_subcommand("run-crb", "Character benchmarking of the Pauli-gate noise");
  crb_cmd->add_option("--config", config_path, "Run configuration (JSON)")->required();
  auto* crb_exact = crb_cmd->add_flag("--exact", shots.exact, "Exact survival probabilities");
  auto* crb_shots = crb_cmd->add_option("--shots", shot_value, "Shots per circuit");
  crb_exact->excludes(crb_shots);

  std::optional<double> f_le, f_e;
  std::optional<std::size_t> inter_qubits;
  std::string ptcb_summary, crb_summary;
  auto* inter_cmd = app.add_subcommand("interleave", "Interval for F(Lambda)");
  inter_cmd->add_option("--f-le", f_le, "F(Lambda E)");
  inter_cmd->add_option("--f-e", f_e, "F(E)");
  inter_cmd->add_option("--qubits", inter_qubits, "Qubit count (d = 2^n)");
  inter_cmd->add_option("--ptcb-summary", ptcb_summary, "summary.json of a run-ptcb run");
  inter_cmd->add_option("--crb-summary", crb_summary, "summary.json of a run-crb run");

  std::size_t count = 100, noise_qubits = 3, bins = 3;
  double low = 0.01, high = 0.04;
  bool dump_channels = false;
  auto* noise_cmd = app.add_subcommand("sample-noise", "Calibrated noise ensemble");
  noise_cmd->add_option("--count", count, "Number of channels");
  noise_cmd->add_option("--qubits", noise_qubits, "Qubit count");
  noise_cmd->add_option("--low", low, "Lowest infidelity");
  noise_cmd->add_option("--high", high, "Highest infidelity");
  noise_cmd->add_flag("--dump-ptm", dump_channels, "Write each channel's PTM");

  std::string plan_path;
  auto* sweep_cmd = app.add_subcommand("run-sweep", "Ensemble sweep");
  sweep_cmd->add_option("--plan", plan_path, "Sweep plan (JSON)")->required();

  std::string table;
  auto* plot_cmd = app.add_subcommand("emit-plotdata", "Per-figure series from a sweep table");
  plot_cmd->add_option("--table", table, "sweep.csv")->required();
  plot_cmd->add_option("--low", low, "Lowest infidelity of the bins");
  plot_cmd->add_option("--high", high, "Highest infidelity of the bins");
  plot_cmd->add_option("--bins", bins, "Number of infidelity bins");

  std::string gate = "toffoli", which = "ideal", ptm_file;
  std::size_t dump_qubits = 3;
  auto* dump_cmd = app.add_subcommand("dump-ptm", "Print a transfer matrix");
  dump_cmd->add_option("--config", config_path, "Run configuration (JSON)");
  dump_cmd->add_option("--gate", gate, "toffoli, ccz or identity");
  dump_cmd->add_option("--qubits", dump_qubits, "Qubit count for identity");
  dump_cmd->add_option("--matrix", which, "ideal, noise, noisy or pauli-noise (with --config)");
  dump_cmd->add_option("--file", ptm_file, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }
  if (seed_opt->count()) g.seed = seed_value;
  if (shots_opt->count() || crb_shots->count()) shots.shots = shot_value;

  try {
    if (ptcb_cmd->parsed()) return RunPtcb(config_path, shots, dump_ptm, g);
    if (crb_cmd->parsed()) return RunCrb(config_path, shots, g);
    if (inter_cmd->parsed()) {
      return Interleave(f_le, f_e, inter_qubits, ptcb_summary, crb_summary,
                        app.get_option("--out")->count() > 0, g);
    }
    if (noise_cmd->parsed()) return SampleNoise(count, noise_qubits, low, high, dump_channels, g);
    if (sweep_cmd->parsed()) return RunSweep(plan_path, g);
    if (plot_cmd->parsed()) return EmitPlotdata(table, low, high, bins, g);
    if (dump_cmd->parsed()) return DumpPtm(config_path, gate, dump_qubits, which, ptm_file, g);
  } catch (const ptcb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigExit;
  } catch (const ptcb::ValidationError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigExit;
  } catch (const ptcb::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumericalExit;
  } catch (const ptcb::ProtocolError& e) {
    std::cerr << "protocol failure: " << e.what() << "\n";
    return kNumericalExit;
  } catch (const ptcb::DimensionError& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kConfigExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
