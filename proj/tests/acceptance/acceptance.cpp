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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero if any fails. The optional first argument is the path of the ptcb
// command-line binary, used by the determinism check.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>

#include "oracle/dense.hpp"
#include "ptcb/clifford.hpp"
#include "ptcb/crb.hpp"
#include "ptcb/gates.hpp"
#include "ptcb/interleaved.hpp"
#include "ptcb/io.hpp"
#include "ptcb/noise.hpp"
#include "ptcb/protocol.hpp"
#include "ptcb/sweep.hpp"

namespace {

namespace fs = std::filesystem;
using ptcb::PauliString;
using ptcb::TransferMatrix;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool pass = false;
  std::string detail;
};

unsigned Workers() { return std::max(1u, std::thread::hardware_concurrency()); }

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

// --- 1 -------------------------------------------------------------------------------

Outcome ToffoliStructure() {
  const auto start = Clock::now();
  const auto u = ptcb::ptm_unitary(ptcb::gates::toffoli(), 3);
  int nonzero = 0, ones = 0, halves = 0, other = 0;
  for (double v : u.data()) {
    if (std::abs(v) <= 1e-12) continue;
    ++nonzero;
    if (std::abs(v - 1.0) <= 1e-12) {
      ++ones;
    } else if (std::abs(std::abs(v) - 0.5) <= 1e-12) {
      ++halves;
    } else {
      ++other;
    }
  }
  const double t = Seconds(start);
  return {nonzero == 232 && ones == 8 && halves == 224 && other == 0 && t < 1.0,
          fmt::format("{} nonzero, {} ones, {} halves, {} other, {:.3f} s", nonzero, ones,
                      halves, other, t)};
}

// --- 2 -------------------------------------------------------------------------------

Outcome EstimationGap() {
  const auto start = Clock::now();
  ptcb::SweepPlan plan;
  plan.kind = ptcb::SweepKind::EstimationGap;
  plan.ensemble_size = 100;
  plan.seed = 2026;
  plan.threads = Workers();
  const auto rows = ptcb::run_sweep(plan);
  double lo = 1.0, hi = -1.0;
  int outside = 0;
  bool ok = rows.size() == 100;
  for (const auto& r : rows) {
    ok = ok && r.status == "ok" && r.infidelity >= 0.01 - 1e-5 && r.infidelity <= 0.04 + 1e-5;
    lo = std::min(lo, r.discrepancy);
    hi = std::max(hi, r.discrepancy);
    outside += r.discrepancy < 0.0 || r.discrepancy > 1e-4;
  }
  const double t = Seconds(start);
  ok = ok && outside == 0 && t < 60.0;
  return {ok, fmt::format("{} channels, F - F_hat in [{:.3e}, {:.3e}], {} outside [0, 1e-4], "
                          "{:.1f} s",
                          rows.size(), lo, hi, outside, t)};
}

// --- 3 -------------------------------------------------------------------------------

// Random channel from the first d columns of a Haar unitary on system (x) env.
std::vector<oracle::Mat> RandomKraus(std::size_t d, std::size_t env, std::mt19937_64& rng) {
  const oracle::Mat v = oracle::haar_unitary(d * env, rng);
  std::vector<oracle::Mat> kraus;
  for (std::size_t i = 0; i < env; ++i) {
    kraus.push_back(v.block(static_cast<Eigen::Index>(i * d), 0, static_cast<Eigen::Index>(d),
                            static_cast<Eigen::Index>(d)));
  }
  return kraus;
}

Outcome CharacterAverageOracle() {
  const auto start = Clock::now();
  std::mt19937_64 rng(33);
  double worst = 0.0;
  int checks = 0;
  for (int channel = 0; channel < 20; ++channel) {
    const std::size_t n = channel < 10 ? 1 : 2;
    const std::size_t d = std::size_t{1} << n;
    ptcb::ExperimentConfig config;
    config.gate = "custom";
    config.qubits = n;
    config.unitary = n == 1 ? oracle::hadamard() : oracle::cnot(0, 1, 2);
    config.noise_ptm = TransferMatrix(n, oracle::ptm(RandomKraus(d, 3, rng), n));
    config.inner = ptcb::InnerMode::Exhaustive;
    const ptcb::Experiment e(config);
    const std::size_t dim = d * d;
    for (int k = 0; k < 10; ++k) {
      std::uniform_int_distribution<std::size_t> pick(1, dim - 1);
      const auto p = PauliString::from_index(n, pick(rng));
      const auto q = PauliString::from_index(n, pick(rng));
      const auto pair = ptcb::make_pair_context(p, q);
      const double g1 = ptcb::g_of_m(e, pair, 1);
      const auto io = ptcb::prepare_spam(q, config.spam);
      const double projected = ptcb::expectation(io.effect, ptcb::projector_matrix(q), io.state);
      const double want = projected * e.effective_gate().at(p, q) * e.effective_gate().at(q, p);
      worst = std::max(worst, std::abs(g1 - want));
      ++checks;
    }
  }
  const double t = Seconds(start);
  return {worst <= 1e-12 && t < 60.0,
          fmt::format("{} channel/pair checks, max |g(1) - closed form| = {:.2e}, {:.1f} s",
                      checks, worst, t)};
}

// --- 4 -------------------------------------------------------------------------------

ptcb::ExperimentConfig NoisyToffoli() {
  ptcb::ExperimentConfig config;
  config.noise = ptcb::NoiseSpec{0.012, 0.018, 0.12, 0, 2, 0};
  return config;
}

Outcome SpamRobustness() {
  const double rates[] = {0.0, 0.02, 0.05};
  const auto pairs = ptcb::importance_sample_pairs(12, 4);
  double exact_spread = 0.0;
  for (const auto& sp : pairs) {
    if (sp.p.is_identity()) continue;
    double first = 0.0;
    for (double s : rates) {
      auto config = NoisyToffoli();
      config.inner = ptcb::InnerMode::Exact;
      config.spam = ptcb::SpamSpec{s, s};
      const double r = ptcb::estimate_pair(ptcb::Experiment(config), sp.p, sp.q).product;
      if (s == 0.0) first = r;
      exact_spread = std::max(exact_spread, std::abs(r - first));
    }
  }

  // Shot mode: every tuple enumerated, so binomial counts are the only noise.
  const auto p = PauliString::from_letters("IIY"), q = PauliString::from_letters("IZY");
  const std::uint64_t shots = 10000;
  std::vector<double> ratio, sigma;
  for (double s : rates) {
    auto config = NoisyToffoli();
    config.inner = ptcb::InnerMode::Exhaustive;
    config.shots = shots;
    config.spam = ptcb::SpamSpec{s, s};
    std::vector<ptcb::SurvivalRecord> records;
    const auto est = ptcb::estimate_pair(ptcb::Experiment(config), p, q, 0, &records);
    double var[2] = {0.0, 0.0};
    std::size_t count[2] = {0, 0};
    for (const auto& r : records) {
      var[r.depth] += r.probability * (1.0 - r.probability) / static_cast<double>(shots);
      ++count[r.depth];
    }
    const double v0 = var[0] / (static_cast<double>(count[0]) * count[0]);
    const double v1 = var[1] / (static_cast<double>(count[1]) * count[1]);
    ratio.push_back(est.product);
    sigma.push_back(std::sqrt(v1 + est.product * est.product * v0) / std::abs(est.g0));
  }
  double worst_z = 0.0;
  for (std::size_t i = 1; i < ratio.size(); ++i) {
    worst_z = std::max(worst_z, std::abs(ratio[i] - ratio[0]) /
                                    std::sqrt(sigma[i] * sigma[i] + sigma[0] * sigma[0]));
  }
  return {exact_spread <= 1e-12 && worst_z <= 3.0,
          fmt::format("exact ratio spread {:.2e}; shot ratios {:.5f} / {:.5f} / {:.5f}, "
                      "max |z| = {:.2f}",
                      exact_spread, ratio[0], ratio[1], ratio[2], worst_z)};
}

// --- 5 -------------------------------------------------------------------------------

PauliString RandomNonIdentity(std::size_t n, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> pick(1, (std::size_t{1} << (2 * n)) - 1);
  return PauliString::from_index(n, pick(rng));
}

ptcb::CliffordTableau PauliTableau(const PauliString& r) {
  std::vector<PauliString> xs, zs;
  for (std::size_t k = 0; k < r.size(); ++k) {
    PauliString x(r.size()), z(r.size());
    x.set_letter(k, ptcb::Letter::X);
    z.set_letter(k, ptcb::Letter::Z);
    xs.push_back(ptcb::commutes(r, x) ? x : x.with_phase(2));
    zs.push_back(ptcb::commutes(r, z) ? z : z.with_phase(2));
  }
  return ptcb::CliffordTableau(xs, zs);
}

Outcome CliffordSearch() {
  std::mt19937_64 rng(55);
  int passed = 0, total = 0;
  for (std::size_t n = 1; n <= 5; ++n) {
    for (int i = 0; i < 1000; ++i) {
      const auto p = RandomNonIdentity(n, rng), q = RandomNonIdentity(n, rng);
      const auto mapping = ptcb::find_clifford_mapping(p, q);
      const auto image = mapping.tableau.conjugate(p);
      ++total;
      if (image.phase_free() == q && image.sign() == mapping.sign) ++passed;
    }
  }

  auto config = NoisyToffoli();
  config.inner = ptcb::InnerMode::Exact;
  const ptcb::Experiment e(config);
  const auto pairs = ptcb::importance_sample_pairs(40, 8);
  double worst = 0.0;
  int spots = 0;
  for (const auto& sp : pairs) {
    if (sp.p.is_identity() || spots == 20) continue;
    const auto base = ptcb::make_pair_context(sp.p, sp.q);
    // Alternative: the inverse of the reverse mapping, then a random Pauli.
    auto other = base;
    other.mapping.tableau = ptcb::find_clifford_mapping(sp.q, sp.p)
                                .tableau.inverse()
                                .then(PauliTableau(RandomNonIdentity(3, rng)));
    const auto image = other.mapping.tableau.conjugate(sp.p);
    if (image.phase_free() != sp.q) return {false, "alternative tableau does not map P to Q"};
    other.mapping.sign = image.sign();
    const double a = ptcb::g_of_m(e, base, 1) / ptcb::g_of_m(e, base, 0);
    const double b = ptcb::g_of_m(e, other, 1) / ptcb::g_of_m(e, other, 0);
    worst = std::max(worst, std::abs(a - b));
    ++spots;
  }
  return {passed == total && spots == 20 && worst < 1e-12,
          fmt::format("{}/{} mappings verified; {} alternative tableaus, max ratio change {:.2e}",
                      passed, total, spots, worst)};
}

// --- 6 -------------------------------------------------------------------------------

Outcome CrbRecovery() {
  const double p = 0.05;
  ptcb::CrbSettings exact;
  exact.inner = ptcb::InnerMode::Exact;
  exact.threads = Workers();
  double worst = 0.0;
  for (std::size_t n = 1; n <= 3; ++n) {
    const auto noise = ptcb::dephasing_channel(p, n);
    const auto est = ptcb::estimate_twirl_fidelity(noise, 0, exact);
    for (const auto& ev : est.eigenvalues) {
      int flips = 0;
      for (std::size_t k = 0; k < n; ++k) {
        const auto l = ev.q.letter(k);
        flips += l == ptcb::Letter::X || l == ptcb::Letter::Y;
      }
      worst = std::max(worst, std::abs(ev.eigenvalue - std::pow(1 - 2 * p, flips)));
    }
  }

  // RMSE of the subset-sampled F(E) against the exact value.
  const auto noise = ptcb::dephasing_channel(p, 2);
  const double truth = ptcb::process_fidelity(noise);
  const std::size_t sizes[] = {4, 16, 64, 256};
  const int reps = 200;
  std::vector<double> xs, ys;
  std::string rmses;
  for (std::size_t s : sizes) {
    double sq = 0.0;
    for (int r = 0; r < reps; ++r) {
      auto settings = exact;
      settings.seed = 1000 + static_cast<std::uint64_t>(r);
      const double f = ptcb::estimate_twirl_fidelity(noise, s, settings).estimate;
      sq += (f - truth) * (f - truth);
    }
    const double rmse = std::sqrt(sq / reps);
    xs.push_back(std::log(static_cast<double>(s)));
    ys.push_back(std::log(rmse));
    rmses += fmt::format("{}{:.2e}", rmses.empty() ? "" : "/", rmse);
  }
  const double mx = (xs[0] + xs[1] + xs[2] + xs[3]) / 4, my = (ys[0] + ys[1] + ys[2] + ys[3]) / 4;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  const double slope = sxy / sxx;
  return {worst <= 1e-10 && std::abs(slope + 0.5) <= 0.1,
          fmt::format("max eigenvalue error {:.2e}; RMSE {} at 4/16/64/256 samples, slope {:.3f}",
                      worst, rmses, slope)};
}

// --- 7 -------------------------------------------------------------------------------

Outcome InterleavedContainment() {
  const std::size_t n = 3, d = 8;
  const auto gates = ptcb::sample_noise_ensemble(100, n, 0.01, 0.04, 71, {}, Workers());
  const auto twirls = ptcb::sample_noise_ensemble(100, n, 0.0001, 0.01, 72, {}, Workers());
  int inside = 0, total = 0;
  for (std::size_t i = 0; i < gates.size(); ++i) {
    for (std::size_t k = 0; k < 10; ++k) {
      const auto& e = twirls[(i * 7 + k * 10) % twirls.size()].channel;
      const auto& lambda = gates[i].channel;
      const double fe = ptcb::process_fidelity(e);
      const double fle = ptcb::process_fidelity(ptcb::compose(lambda, e));
      const auto iv = ptcb::fidelity_interval(fle, fe, d);
      const double f = ptcb::process_fidelity(lambda);
      ++total;
      if (f >= iv.lower && f <= iv.upper) ++inside;
    }
  }

  const auto& lambda = gates.front().channel;
  std::vector<double> widths;
  for (double fe : {0.99, 0.999, 0.9999}) {
    const auto e = ptcb::dephasing_channel(1.0 - std::cbrt(fe), n);
    const double fle = ptcb::process_fidelity(ptcb::compose(lambda, e));
    const auto iv = ptcb::fidelity_interval(fle, ptcb::process_fidelity(e), d);
    widths.push_back(iv.upper - iv.lower);
  }
  const bool shrinking = widths[0] > widths[1] && widths[1] > widths[2];
  return {inside == total && total >= 1000 && shrinking,
          fmt::format("{}/{} contained; widths {:.4f} / {:.4f} / {:.4f} at F(E) = 0.99 / "
                      "0.999 / 0.9999",
                      inside, total, widths[0], widths[1], widths[2])};
}

// --- 8 -------------------------------------------------------------------------------

Outcome OuterConvergence() {
  const auto channel = ptcb::sample_noise_ensemble(1, 3, 0.01, 0.04, 81).front();
  ptcb::ExperimentConfig config;
  config.noise_ptm = channel.channel;
  const ptcb::Experiment e(config);
  const auto table = ptcb::build_segments(e.ideal());
  auto estimate = [&](std::size_t m, std::uint64_t seed) {
    const auto pairs = ptcb::importance_sample_pairs(table, e.ideal(), m, seed);
    std::vector<double> products;
    for (const auto& sp : pairs) {
      products.push_back(ptcb::exact_pair_product(e, sp.p, sp.q, ptcb::Variant::Standard));
    }
    return ptcb::outer_estimate(pairs, products);
  };
  const double reference = estimate(table.size(), 0);
  std::vector<double> rmse;
  for (std::size_t m : {10, 30, 100, 256}) {
    double sq = 0.0;
    for (std::uint64_t r = 0; r < 200; ++r) {
      const double v = estimate(m, r + 1);
      sq += (v - reference) * (v - reference);
    }
    rmse.push_back(std::sqrt(sq / 200));
  }
  const bool decreasing = rmse[0] > rmse[1] && rmse[1] > rmse[2] && rmse[2] > rmse[3];
  const bool exact = rmse[3] == 0.0 && std::abs(reference - ptcb::exact_fidelity_bound(e)) < 1e-12;
  return {decreasing && exact,
          fmt::format("RMSE {:.2e} / {:.2e} / {:.2e} / {:.2e} at M = 10 / 30 / 100 / 256",
                      rmse[0], rmse[1], rmse[2], rmse[3])};
}

// --- 9 -------------------------------------------------------------------------------

bool SameTree(const fs::path& a, const fs::path& b, std::string& why) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (entry.is_regular_file()) files.push_back(fs::relative(entry.path(), a));
  }
  std::size_t other = 0;
  for (const auto& entry : fs::recursive_directory_iterator(b)) other += entry.is_regular_file();
  if (files.empty() || files.size() != other) {
    why = fmt::format("{} vs {} files", files.size(), other);
    return false;
  }
  for (const auto& f : files) {
    if (ptcb::io::read_text(a / f) != ptcb::io::read_text(b / f)) {
      why = f.string() + " differs";
      return false;
    }
  }
  return true;
}

Outcome Determinism(const std::string& cli) {
  if (cli.empty()) return {false, "no CLI path given"};
  const fs::path dir = fs::temp_directory_path() / "ptcb_acceptance";
  fs::remove_all(dir);
  ptcb::io::write_text(dir / "run.json", R"({
  "gate": "toffoli", "seed": 9, "M": 16, "M_prime": 12, "shots": 400,
  "noise": {"p": 0.01, "q": 0.015, "delta": 0.1, "control": 0, "target": 2},
  "pauli_noise": {"p": 0.002, "q": 0.001, "delta": 0.01, "control": 1, "target": 0},
  "spam": {"prep": 0.02, "meas": 0.01},
  "crb": {"depths": [1, 2, 4], "M_prime": 10, "q_samples": 8}
})");
  ptcb::io::write_text(dir / "plan.json", R"({
  "kind": "inner-sweep", "seed": 4,
  "base": {"M": 6, "shots": 300},
  "grid": {"M_prime": [4, 8]},
  "ensemble": {"size": 4, "low": 0.01, "high": 0.04}
})");
  const std::string commands[] = {
      "run-ptcb --config " + (dir / "run.json").string(),
      "run-crb --config " + (dir / "run.json").string(),
      "run-sweep --plan " + (dir / "plan.json").string(),
      "sample-noise --count 5 --qubits 3 --low 0.01 --high 0.04",
  };
  int index = 0;
  for (const auto& cmd : commands) {
    std::vector<fs::path> outs;
    for (int threads : {1, 4}) {
      const fs::path out = dir / fmt::format("c{}_t{}", index, threads);
      const std::string line = fmt::format("{} --seed 11 --threads {} --out {} {} >/dev/null 2>&1",
                                           cli, threads, out.string(), cmd);
      const int status = std::system(line.c_str());
      if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        return {false, fmt::format("'{}' exited with {}", cmd, status)};
      }
      outs.push_back(out);
    }
    std::string why;
    if (!SameTree(outs[0], outs[1], why)) return {false, cmd + ": " + why};
    // A repeat with the same thread count must also match.
    const fs::path again = dir / fmt::format("c{}_again", index);
    std::system(fmt::format("{} --seed 11 --threads 4 --out {} {} >/dev/null 2>&1", cli,
                            again.string(), cmd)
                    .c_str());
    if (!SameTree(outs[1], again, why)) return {false, cmd + " (repeat): " + why};
    ++index;
  }
  fs::remove_all(dir);
  return {true, fmt::format("{} subcommands byte-identical across --threads 1/4 and reruns",
                            index)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"Toffoli transfer-matrix structure", ToffoliStructure},
      {"estimation gap over the noise ensemble", EstimationGap},
      {"exhaustive character average against closed form", CharacterAverageOracle},
      {"SPAM robustness", SpamRobustness},
      {"Clifford search and sign cancellation", CliffordSearch},
      {"character benchmarking recovery", CrbRecovery},
      {"interleaved interval containment", InterleavedContainment},
      {"outer-sampling convergence", OuterConvergence},
      {"determinism across runs and threads", [&] { return Determinism(cli); }},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto start = Clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    fmt::print("criterion {}: {}  {} ({}) [{:.1f} s]\n", i + 1, o.pass ? "PASS" : "FAIL",
               criteria[i].first, o.detail, Seconds(start));
    std::fflush(stdout);
  }
  fmt::print("{}/{} criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
