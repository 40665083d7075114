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

#include <cstddef>
#include <cstdint>
#include <vector>

#include "ptcb/pauli.hpp"
#include "ptcb/ptm.hpp"

namespace ptcb {

/// Parameters of one composite noise channel: per-qubit dephasing p and
/// amplitude damping q, and a controlled exp(i delta X) between two qubits.
struct NoiseSpec {
  double p = 0.0;
  double q = 0.0;
  double delta = 0.0;
  std::size_t control = 0;
  std::size_t target = 1;
  std::uint64_t seed = 0;

  /// Throws ValidationError unless 0 <= p, q <= 1, delta is finite and the
  /// qubit indices are distinct and < n.
  void validate(std::size_t n) const;

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;
};

struct SpamSpec {
  double prep_flip = 0.0;
  double meas_flip = 0.0;

  void validate() const;
  friend bool operator==(const SpamSpec&, const SpamSpec&) = default;
};

/// Raw draw intervals used before calibrating an ensemble member.
struct NoiseRanges {
  double p_max = 0.02;
  double q_max = 0.02;
  double delta_max = 0.15;
};

TransferMatrix dephasing_channel(double p, std::size_t n);
TransferMatrix damping_channel(double q, std::size_t n);
/// PTM of |0><0| (x) I + |1><1| (x) exp(i delta X) on (control, target).
TransferMatrix unitary_noise(double delta, std::size_t control, std::size_t target,
                             std::size_t n);
ComplexMatrix controlled_rotation(double delta, std::size_t control, std::size_t target,
                                  std::size_t n);

/// dephasing o unitary o damping (damping acts first).
TransferMatrix composite_noise(const NoiseSpec& spec, std::size_t n);

struct NoiseSample {
  NoiseSpec spec;
  TransferMatrix channel;
  double target_infidelity = 0.0;
  double infidelity = 0.0;
};

/// `count` channels with process infidelity uniform on [low, high]. Each
/// member draws a target infidelity and raw (p, q, delta, control, target)
/// from its own substream (seed, index), then bisects a global strength
/// multiplier until |1 - F - target| < 1e-5.
std::vector<NoiseSample> sample_noise_ensemble(std::size_t count, std::size_t n,
                                               double infidelity_low,
                                               double infidelity_high,
                                               std::uint64_t seed,
                                               const NoiseRanges& ranges = {},
                                               unsigned threads = 1);

/// Calibrates a single raw spec to the target infidelity.
NoiseSample calibrate_noise(const NoiseSpec& raw, std::size_t n, double target_infidelity);

/// Applies preparation and measurement flips on the qubits where q has a
/// non-identity letter: each is a Pauli channel conjugating by a Pauli that
/// anticommutes with q's letter, mixing the eigenstate (effect) with its
/// orthogonal partner (complement). Transfer matrices are never touched.
StateAndEffect apply_spam(const PauliString& q, const StateAndEffect& ideal,
                          const SpamSpec& spam);

}  // namespace ptcb
