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

#include "ptcb/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

#include <fmt/format.h>

#include "ptcb/error.hpp"
#include "ptcb/io.hpp"
#include "ptcb/parallel.hpp"
#include "ptcb/random.hpp"

namespace ptcb {
namespace {

std::string_view InnerName(InnerMode m) {
  switch (m) {
    case InnerMode::Sampled: return "sampled";
    case InnerMode::Exhaustive: return "exhaustive";
    case InnerMode::Exact: return "exact";
  }
  return "";
}

std::size_t BinOf(double infidelity, const SweepPlan& plan) {
  const double span = plan.infidelity_high - plan.infidelity_low;
  if (!(span > 0.0)) return 0;
  const double x = (infidelity - plan.infidelity_low) / span * static_cast<double>(plan.bins);
  return static_cast<std::size_t>(
      std::clamp(std::floor(x), 0.0, static_cast<double>(plan.bins - 1)));
}

template <typename T>
std::vector<T> AxisOr(const std::vector<T>& axis, T fallback) {
  return axis.empty() ? std::vector<T>{fallback} : axis;
}

}  // namespace

std::string_view to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::EstimationGap: return "estimation-gap";
    case SweepKind::OuterSweep: return "outer-sweep";
    case SweepKind::RepetitionSweep: return "repetition-sweep";
    case SweepKind::SpamSweep: return "spam-sweep";
    case SweepKind::InnerSweep: return "inner-sweep";
  }
  return "";
}

SweepKind parse_sweep_kind(std::string_view text) {
  for (SweepKind k : {SweepKind::EstimationGap, SweepKind::OuterSweep,
                      SweepKind::RepetitionSweep, SweepKind::SpamSweep,
                      SweepKind::InnerSweep}) {
    if (to_string(k) == text) return k;
  }
  throw ValidationError(fmt::format("unknown sweep kind '{}'", text));
}

void SweepPlan::validate() const {
  if (ensemble_size < 1) throw ValidationError("ensemble size must be at least 1");
  if (!(infidelity_low >= 0.0 && infidelity_low <= infidelity_high && infidelity_high < 1.0)) {
    throw ValidationError("infidelity range must satisfy 0 <= low <= high < 1");
  }
  if (repeats < 1) throw ValidationError("repeats must be at least 1");
  if (bins < 1) throw ValidationError("bins must be at least 1");
  switch (kind) {
    case SweepKind::EstimationGap: break;
    case SweepKind::OuterSweep:
      if (grid.outer_samples.empty()) throw ValidationError("outer-sweep needs a grid over M");
      break;
    case SweepKind::RepetitionSweep:
      if (grid.shots.empty()) throw ValidationError("repetition-sweep needs a grid over shots");
      break;
    case SweepKind::SpamSweep:
      if (grid.spam.empty()) throw ValidationError("spam-sweep needs a grid over spam");
      break;
    case SweepKind::InnerSweep:
      if (grid.inner_samples.empty()) {
        throw ValidationError("inner-sweep needs a grid over M_prime");
      }
      break;
  }
  for (double s : grid.spam) SpamSpec{s, s}.validate();
  if (base.noise || base.noise_ptm) {
    throw ValidationError("sweep noise comes from the ensemble; drop it from the base");
  }
}

std::vector<SweepCell> sweep_cells(const SweepPlan& plan) {
  std::vector<SweepCell> cells;
  const SpamSpec base_spam = plan.base.spam;
  const auto outer = AxisOr(plan.grid.outer_samples, plan.base.outer_samples);
  const auto inner = AxisOr(plan.grid.inner_samples, plan.base.inner_samples);
  const auto shots = AxisOr(plan.grid.shots, plan.base.shots);
  std::vector<SpamSpec> spams;
  if (plan.grid.spam.empty()) {
    spams.push_back(base_spam);
  } else {
    for (double s : plan.grid.spam) spams.push_back(SpamSpec{s, s});
  }
  for (std::size_t m : outer) {
    for (std::size_t mp : inner) {
      for (std::uint64_t sh : shots) {
        for (const SpamSpec& sp : spams) cells.push_back(SweepCell{m, mp, sh, sp});
      }
    }
  }
  return cells;
}

ExperimentConfig cell_config(const SweepPlan& plan, const SweepCell& cell,
                             const NoiseSpec& noise, std::uint64_t seed) {
  ExperimentConfig c = plan.base;
  c.noise = noise;
  c.outer_samples = cell.outer_samples;
  c.inner_samples = cell.inner_samples;
  c.shots = cell.shots;
  c.spam = cell.spam;
  c.seed = seed;
  c.threads = 1;
  if (plan.kind == SweepKind::EstimationGap) {
    c.products = ProductSource::Exact;
    c.outer_samples = 0;
  } else if (plan.kind == SweepKind::OuterSweep) {
    c.products = ProductSource::Exact;
  }
  return c;
}

std::vector<SweepRow> run_sweep(const SweepPlan& plan) {
  plan.validate();
  const std::size_t n = plan.base.qubits;
  const std::vector<NoiseSample> ensemble =
      sample_noise_ensemble(plan.ensemble_size, n, plan.infidelity_low, plan.infidelity_high,
                            plan.seed, plan.ranges, plan.threads);
  const std::vector<SweepCell> cells = sweep_cells(plan);
  const std::size_t tasks = ensemble.size() * cells.size() * plan.repeats;
  std::vector<std::vector<SweepRow>> out(tasks);

  parallel_for(tasks, plan.threads, [&](std::size_t task) {
    const std::size_t repeat = task % plan.repeats;
    const std::size_t cell_index = (task / plan.repeats) % cells.size();
    const std::size_t channel = task / (plan.repeats * cells.size());
    const NoiseSample& sample = ensemble[channel];
    const SweepCell& cell = cells[cell_index];
    const std::uint64_t seed = Rng({plan.seed, channel, cell_index, repeat}).bits() >> 1;
    const ExperimentConfig config = cell_config(plan, cell, sample.spec, seed);

    SweepRow proto;
    proto.kind = plan.kind;
    proto.channel = channel;
    proto.infidelity = sample.infidelity;
    proto.bin = BinOf(sample.infidelity, plan);
    proto.noise = sample.spec;
    proto.cell = SweepCell{config.outer_samples, config.inner_samples, config.shots,
                           config.spam};
    proto.inner = config.inner;
    proto.products = config.products;
    proto.estimator = config.estimator;
    proto.repeat = repeat;
    proto.seed = seed;

    std::vector<SweepRow>& rows = out[task];
    try {
      const Experiment experiment(config);
      if (!config.pairs.empty()) {
        const auto estimates = estimate_configured_pairs(experiment, nullptr);
        for (const PairEstimate& e : estimates) {
          SweepRow row = proto;
          row.quantity = "pair";
          row.pair_p = e.p.letters();
          row.pair_q = e.q.letters();
          row.actual = std::sqrt(std::max(e.exact_product, 0.0));
          row.estimate = std::sqrt(std::max(e.product, 0.0));
          row.clamps = e.product < 0.0 ? 1 : 0;
          row.discrepancy = row.estimate - row.actual;
          row.exact_bound = exact_fidelity_bound(experiment);
          rows.push_back(std::move(row));
        }
      } else {
        const FidelityEstimate est = estimate_fidelity(experiment);
        SweepRow row = proto;
        row.actual = 1.0 - est.true_fidelity;
        row.estimate = 1.0 - est.estimate;
        row.discrepancy = row.estimate - row.actual;
        row.exact_bound = est.exact_bound;
        row.clamps = est.clamp_count;
        rows.push_back(std::move(row));
      }
    } catch (const Error& e) {
      SweepRow row = proto;
      row.actual = row.estimate = row.discrepancy = std::nan("");
      row.status = fmt::format("error: {}", e.what());
      rows.push_back(std::move(row));
    }
  });

  std::vector<SweepRow> flat;
  for (auto& rows : out) {
    for (auto& r : rows) flat.push_back(std::move(r));
  }
  return flat;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out =
      "kind,channel,infidelity,bin,noise_p,noise_q,noise_delta,noise_control,noise_target,"
      "M,M_prime,shots,spam_prep,spam_meas,inner,products,estimator,repeat,seed,quantity,"
      "pair_p,pair_q,actual,estimate,discrepancy,exact_bound,clamps,status\n";
  for (const SweepRow& r : rows) {
    std::string status = r.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    out += fmt::format(
        "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        to_string(r.kind), r.channel, io::format_real(r.infidelity), r.bin,
        io::format_real(r.noise.p), io::format_real(r.noise.q), io::format_real(r.noise.delta),
        r.noise.control, r.noise.target, r.cell.outer_samples, r.cell.inner_samples,
        r.cell.shots, io::format_real(r.cell.spam.prep_flip),
        io::format_real(r.cell.spam.meas_flip), InnerName(r.inner),
        r.products == ProductSource::Exact ? "exact" : "protocol",
        r.estimator == Estimator::Fit ? "fit" : "ratio", r.repeat, r.seed, r.quantity,
        r.pair_p, r.pair_q, io::format_real(r.actual), io::format_real(r.estimate),
        io::format_real(r.discrepancy), io::format_real(r.exact_bound), r.clamps, status);
  }
  return out;
}

std::map<std::string, std::string> emit_plotdata(std::string_view sweep_table,
                                                 double infidelity_low,
                                                 double infidelity_high, std::size_t bins) {
  const io::CsvTable table = io::parse_csv(sweep_table);
  const std::size_t c_kind = table.column("kind");
  const std::size_t c_bin = table.column("bin");
  const std::size_t c_status = table.column("status");
  const std::size_t c_quantity = table.column("quantity");
  const std::size_t c_actual = table.column("actual");
  const std::size_t c_estimate = table.column("estimate");
  const std::size_t c_disc = table.column("discrepancy");
  const std::vector<std::string> cell_cols = {"M",         "M_prime",  "shots",
                                              "spam_prep", "spam_meas", "inner",
                                              "products",  "estimator", "pair_p",
                                              "pair_q"};
  std::vector<std::size_t> cell_idx;
  for (const auto& c : cell_cols) cell_idx.push_back(table.column(c));

  struct Acc {
    std::size_t count = 0, failed = 0;
    double sum_actual = 0, sum_estimate = 0, sum_d = 0, sum_d2 = 0, max_abs = 0;
  };
  // kind -> (cell key, quantity, bin) -> accumulator; std::map keeps a
  // stable order.
  std::map<std::string, std::map<std::tuple<std::vector<std::string>, std::string, std::size_t>,
                                 Acc>>
      groups;
  for (const auto& row : table.rows) {
    std::vector<std::string> key;
    for (std::size_t i : cell_idx) key.push_back(row[i]);
    const std::size_t bin = std::stoul(row[c_bin]);
    Acc& a = groups[row[c_kind]][{key, row[c_quantity], bin}];
    if (row[c_status] != "ok") {
      ++a.failed;
      continue;
    }
    const double d = std::stod(row[c_disc]);
    ++a.count;
    a.sum_actual += std::stod(row[c_actual]);
    a.sum_estimate += std::stod(row[c_estimate]);
    a.sum_d += d;
    a.sum_d2 += d * d;
    a.max_abs = std::max(a.max_abs, std::abs(d));
  }

  std::map<std::string, std::string> files;
  const double width = (infidelity_high - infidelity_low) / static_cast<double>(bins);
  for (const auto& [kind, series] : groups) {
    std::string out;
    for (const auto& c : cell_cols) out += c + ",";
    out +=
        "quantity,bin,bin_low,bin_high,count,failed,mean_actual,mean_estimate,"
        "mean_discrepancy,rms_discrepancy,std_discrepancy,max_abs_discrepancy\n";
    for (const auto& [key, a] : series) {
      const auto& [cell, quantity, bin] = key;
      for (const auto& v : cell) out += v + ",";
      const double cnt = static_cast<double>(a.count);
      const double mean = a.count ? a.sum_d / cnt : std::nan("");
      const double rms = a.count ? std::sqrt(a.sum_d2 / cnt) : std::nan("");
      const double var =
          a.count > 1 ? std::max(0.0, (a.sum_d2 - cnt * mean * mean) / (cnt - 1.0)) : 0.0;
      out += fmt::format(
          "{},{},{},{},{},{},{},{},{},{},{},{}\n", quantity, bin,
          io::format_real(infidelity_low + width * static_cast<double>(bin)),
          io::format_real(infidelity_low + width * static_cast<double>(bin + 1)), a.count,
          a.failed, io::format_real(a.count ? a.sum_actual / cnt : std::nan("")),
          io::format_real(a.count ? a.sum_estimate / cnt : std::nan("")),
          io::format_real(mean), io::format_real(rms), io::format_real(std::sqrt(var)),
          io::format_real(a.max_abs));
    }
    files[fmt::format("plot_{}.csv", kind)] = std::move(out);
  }
  return files;
}

}  // namespace ptcb
