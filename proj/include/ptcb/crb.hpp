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

// Character randomized benchmarking over the Pauli group: estimates the
// Pauli eigenvalues E_QQ of the noise that accompanies every Pauli gate, and
// from them the process fidelity F(E).

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ptcb/noise.hpp"
#include "ptcb/pauli.hpp"
#include "ptcb/protocol.hpp"
#include "ptcb/ptm.hpp"

namespace ptcb {

struct CrbSettings {
  std::vector<std::size_t> depths{1, 2, 4, 8};
  std::size_t inner_samples = 100;  // M' per depth
  std::uint64_t shots = 0;
  std::uint64_t seed = 1;
  InnerMode inner = InnerMode::Sampled;
  SpamSpec spam;
  unsigned threads = 1;

  void validate() const;
};

struct CrbRecord {
  std::size_t q_index = 0;  // position of Q in the run
  std::size_t depth = 0;
  std::vector<PauliString> paulis;  // P_0 ... P_m
  int lambda = 1;
  double probability = 0.0;
};

/// Gate list for the tuple (P_0, ..., P_m): P_1 P_0, P_2 P_1, ..., P_m; each
/// gate is followed by one application of the noise E.
std::vector<PauliString> crb_layers(std::span<const PauliString> paulis);

/// Exact survival probability of one sequence.
double crb_survival(const TransferMatrix& noise, const StateAndEffect& spam_io,
                    std::span<const PauliString> paulis);

/// Character-weighted average f(m); m = 0 is always exhaustive over P_0.
double f_of_m(const TransferMatrix& noise, const PauliString& q, std::size_t m,
              const CrbSettings& settings, std::size_t q_index = 0,
              std::vector<CrbRecord>* records = nullptr);

struct EigenvalueEstimate {
  PauliString q;
  std::vector<std::size_t> depths;
  std::vector<double> f;
  double eigenvalue = 1.0;
  double prefactor = 1.0;
  double fit_residual = 0.0;
  double exact = 1.0;  // diagonal entry of the twirled noise
  bool failed = false;
  std::string error;
};

/// Log-linear fit of f(m) over the configured depths. Q = I returns 1
/// without circuits. Throws ProtocolError when some f(m) is not positive.
EigenvalueEstimate estimate_pauli_eigenvalue(const TransferMatrix& noise,
                                             const PauliString& q,
                                             const CrbSettings& settings,
                                             std::size_t q_index = 0,
                                             std::vector<CrbRecord>* records = nullptr);

struct TwirlFidelityEstimate {
  double estimate = 0.0;
  double exact = 0.0;  // F(E)
  std::vector<EigenvalueEstimate> eigenvalues;
  std::vector<CrbRecord> records;
};

/// Mean of estimated eigenvalues over `samples` Paulis drawn uniformly with
/// replacement (Q = I included), or over all 4^n Paulis when samples = 0.
/// Failed fits are reported per Q; the mean runs over the successful ones.
TwirlFidelityEstimate estimate_twirl_fidelity(const TransferMatrix& noise,
                                              std::size_t samples,
                                              const CrbSettings& settings,
                                              bool keep_records = false);

/// Same, for an explicit list of Paulis.
TwirlFidelityEstimate estimate_twirl_fidelity(const TransferMatrix& noise,
                                              std::span<const PauliString> qs,
                                              const CrbSettings& settings,
                                              bool keep_records = false);

}  // namespace ptcb
