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

// JSON run descriptions. Parsing is strict: unknown keys, wrong types and
// out-of-range values raise ConfigError naming the offending field path
// ("$.noise.p"). Serialization writes every field with defaults resolved, so
// a run's outputs echo its complete configuration.

#include <cstddef>
#include <filesystem>
#include <vector>

#include <json.hpp>

#include "ptcb/crb.hpp"
#include "ptcb/protocol.hpp"
#include "ptcb/sweep.hpp"

namespace ptcb {

struct CrbRunConfig {
  CrbSettings settings;  // seed, shots and spam follow the experiment
  std::size_t q_samples = 0;  // 0 = every Pauli
  std::vector<PauliString> qs;  // explicit list; overrides q_samples
};

struct RunConfig {
  ExperimentConfig experiment;
  CrbRunConfig crb;
};

/// Relative PTM file paths resolve against `base_dir`.
RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const RunConfig& config);

/// A sweep file: {"kind", "base": <run config without noise>, "grid",
/// "ensemble", "seed", "repeats", "bins"}.
SweepPlan parse_sweep_plan(const nlohmann::json& j,
                           const std::filesystem::path& base_dir = {});
SweepPlan load_sweep_plan(const std::filesystem::path& path);
nlohmann::json to_json(const SweepPlan& plan);

nlohmann::json to_json(const NoiseSpec& spec);
nlohmann::json to_json(const SpamSpec& spam);

}  // namespace ptcb
