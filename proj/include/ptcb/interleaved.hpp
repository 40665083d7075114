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

// Interleaved bounds: the interval that must contain F(Lambda) given the
// fidelity F(Lambda E) of the gate noise composed with the Pauli-gate noise
// and the fidelity F(E) of the Pauli-gate noise alone.

#include <array>
#include <cstddef>

#include "ptcb/crb.hpp"
#include "ptcb/protocol.hpp"

namespace ptcb {

struct FidelityInterval {
  double lower = 0.0;
  double upper = 1.0;
  double e_bound = 0.0;  // smallest of the three error bounds
  int branch = 1;        // 1, 2 or 3: which bound was smallest
  std::array<double, 3> branches{};
};

/// Error bounds
///   1: 4(d+1) sqrt(1 - F_E) + 2(d+1)/d (1 - F_E)
///   2: (A + (d^2 F_E - 1)(1 - F_E)) / (d^2 - 1)
///   3: (A + (d^2 F_E - 1)(F_E - F_LE)) / (d^2 - 1)
/// with A = |d^2 (F_LE - F_E) + 2 F_E - F_LE - 1|, and the interval
///   (d^2 (F_LE -+ E) - 1) / (d^2 F_E - 1) (1 - 1/d^2) + 1/d^2
/// clipped to [0, 1]. `d` is the Hilbert-space dimension 2^n. Throws
/// NumericalError when d^2 F_E <= 1 and ValidationError for fidelities
/// outside [0, 1].
FidelityInterval fidelity_interval(double f_le, double f_e, std::size_t d);

struct CombinedFidelity {
  double f_le = 0.0;  // estimated F(Lambda E)
  double f_e = 0.0;   // estimated F(E)
  double true_f_le = 0.0;
  double true_f_e = 1.0;
  double true_f = 0.0;  // F(Lambda)
  FidelityEstimate ptcb;
  TwirlFidelityEstimate crb;
};

/// Runs the benchmark on U Lambda E (the experiment's Pauli noise E) for
/// F(Lambda E), and character benchmarking on E for F(E); without Pauli
/// noise F(E) is 1. `q_samples` = 0 estimates every Pauli eigenvalue.
CombinedFidelity combined_fidelity(const Experiment& experiment, const CrbSettings& crb,
                                   std::size_t q_samples = 0);

}  // namespace ptcb
