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

#pragma once

// Figure-style sweeps: a calibrated noise ensemble crossed with a grid of
// protocol settings, one self-describing row per (channel, cell, repeat).

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ptcb/noise.hpp"
#include "ptcb/protocol.hpp"

namespace ptcb {

enum class SweepKind { EstimationGap, OuterSweep, RepetitionSweep, SpamSweep, InnerSweep };

std::string_view to_string(SweepKind kind);
SweepKind parse_sweep_kind(std::string_view text);

/// Empty axes keep the base configuration's value.
struct SweepGrid {
  std::vector<std::size_t> outer_samples;  // M
  std::vector<std::size_t> inner_samples;  // M'
  std::vector<std::uint64_t> shots;
  std::vector<double> spam;  // preparation and measurement flip rate
};

struct SweepPlan {
  SweepKind kind = SweepKind::EstimationGap;
  ExperimentConfig base;
  SweepGrid grid;
  std::size_t ensemble_size = 100;
  double infidelity_low = 0.01;
  double infidelity_high = 0.04;
  NoiseRanges ranges;
  std::uint64_t seed = 1;
  std::size_t repeats = 1;
  std::size_t bins = 3;
  unsigned threads = 1;  // not part of any output

  /// Throws ValidationError when the axis the kind varies is empty, or the
  /// ensemble or bin settings are out of range.
  void validate() const;
};

struct SweepCell {
  std::size_t outer_samples = 0;
  std::size_t inner_samples = 0;
  std::uint64_t shots = 0;
  SpamSpec spam;
};

/// Cartesian product of the grid axes, in axis order M, M', shots, spam.
std::vector<SweepCell> sweep_cells(const SweepPlan& plan);

/// The configuration one task runs, with kind-specific settings applied:
/// estimation-gap reads products off the exact PTM over every pair (M = 0);
/// outer-sweep reads them off the exact PTM for each M.
ExperimentConfig cell_config(const SweepPlan& plan, const SweepCell& cell,
                             const NoiseSpec& noise, std::uint64_t seed);

struct SweepRow {
  SweepKind kind = SweepKind::EstimationGap;
  std::size_t channel = 0;
  double infidelity = 0.0;  // 1 - F(Lambda)
  std::size_t bin = 0;
  NoiseSpec noise;
  SweepCell cell;
  InnerMode inner = InnerMode::Sampled;
  ProductSource products = ProductSource::Protocol;
  Estimator estimator = Estimator::Ratio;
  std::size_t repeat = 0;
  std::uint64_t seed = 0;
  /// "fidelity" rows compare infidelities 1 - F and 1 - F_hat; "pair" rows
  /// compare sqrt of the exact and estimated products for one pair.
  std::string quantity = "fidelity";
  std::string pair_p;
  std::string pair_q;
  double actual = 0.0;
  double estimate = 0.0;
  double discrepancy = 0.0;  // estimate - actual
  double exact_bound = 0.0;  // F_hat on the exact PTM
  std::size_t clamps = 0;
  std::string status = "ok";
};

std::vector<SweepRow> run_sweep(const SweepPlan& plan);

std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Per-figure series from a sweep table: rows grouped by kind, grid cell,
/// quantity and infidelity bin, with count, mean and spread of the
/// discrepancy. Keys are output file names.
std::map<std::string, std::string> emit_plotdata(std::string_view sweep_table,
                                                 double infidelity_low = 0.01,
                                                 double infidelity_high = 0.04,
                                                 std::size_t bins = 3);

}  // namespace ptcb
