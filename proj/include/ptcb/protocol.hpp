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

// Pauli transfer character benchmarking: estimates products of symmetric
// transfer-matrix entries U_PQ * U_QP of a noisy gate using only Pauli
// twirls, a virtual Clifford pair, and Pauli-basis state preparation and
// measurement; combines them into a lower bound on the gate fidelity.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ptcb/clifford.hpp"
#include "ptcb/noise.hpp"
#include "ptcb/pauli.hpp"
#include "ptcb/ptm.hpp"
#include "ptcb/random.hpp"

namespace ptcb {

enum class Estimator { Ratio, Fit };
enum class Variant { Standard, Inverse };
/// Where per-pair products come from: simulated circuits, or read straight
/// off the noisy transfer matrix.
enum class ProductSource { Protocol, Exact };
/// How g(m) averages over Pauli tuples: M' distinct random tuples, every
/// tuple one by one, or the exact average over all tuples factorized per
/// random Pauli.
enum class InnerMode { Sampled, Exhaustive, Exact };

struct ExperimentConfig {
  std::string gate = "toffoli";  // toffoli | ccz | identity | custom
  std::size_t qubits = 3;
  ComplexMatrix unitary;  // custom gates only

  std::optional<NoiseSpec> noise;
  std::string noise_ptm_file;
  std::optional<TransferMatrix> noise_ptm;

  std::optional<NoiseSpec> pauli_noise;
  std::string pauli_noise_ptm_file;
  std::optional<TransferMatrix> pauli_noise_ptm;

  SpamSpec spam;
  std::vector<std::size_t> depths{0, 1};
  std::size_t outer_samples = 30;   // M; 0 means every pair with U_PQ != 0
  std::size_t inner_samples = 100;  // M'
  std::uint64_t shots = 0;          // 0 = exact survival probabilities
  std::uint64_t seed = 1;
  Estimator estimator = Estimator::Ratio;
  Variant variant = Variant::Standard;
  ProductSource products = ProductSource::Protocol;
  InnerMode inner = InnerMode::Sampled;
  /// Explicit (P, Q) pairs; when set, run-ptcb estimates only these.
  std::vector<std::pair<PauliString, PauliString>> pairs;
  unsigned threads = 1;  // not part of any output

  void validate() const;
};

/// Resolved transfer matrices for one configuration.
class Experiment {
 public:
  explicit Experiment(ExperimentConfig config);

  const ExperimentConfig& config() const { return config_; }
  std::size_t qubits() const { return config_.qubits; }

  /// Ideal gate U.
  const TransferMatrix& ideal() const { return ideal_; }
  /// Gate noise Lambda.
  const TransferMatrix& noise() const { return noise_; }
  /// U * Lambda.
  const TransferMatrix& noisy_gate() const { return noisy_; }
  /// Noisy implementation of U^dag, modelled as the transpose of U * Lambda.
  const TransferMatrix& noisy_inverse() const { return noisy_inverse_; }
  /// Noise E after every Pauli layer, if any.
  const std::optional<TransferMatrix>& pauli_noise() const { return pauli_noise_; }

  /// F(Lambda).
  double true_fidelity() const;
  /// F(Lambda E), equal to F(Lambda) without Pauli noise.
  double true_combined_fidelity() const;
  /// Gate seen by the estimator: U * Lambda, times E when Pauli noise is set.
  const TransferMatrix& effective_gate() const { return effective_; }
  /// Second gate of the inverse variant: (U * Lambda)^T, times E.
  const TransferMatrix& effective_inverse_gate() const { return effective_inverse_; }

  bool ideal_is_symmetric(double tol = 1e-12) const;

 private:
  ExperimentConfig config_;
  TransferMatrix ideal_;
  TransferMatrix noise_;
  TransferMatrix noisy_;
  TransferMatrix noisy_inverse_;
  std::optional<TransferMatrix> pauli_noise_;
  TransferMatrix effective_;
  TransferMatrix effective_inverse_;
};

ComplexMatrix resolve_gate_unitary(const ExperimentConfig& config);

// --- circuits ---------------------------------------------------------------

struct Layer {
  enum class Kind { Pauli, Gate, InverseGate };
  Kind kind = Kind::Pauli;
  PauliString pauli;  // phase-free; set for Pauli layers

  friend bool operator==(const Layer&, const Layer&) = default;
};

/// Compiled circuit for the tuple (P_0, ..., P_2m): P_1 P_0, then per period
/// U, C^dag P_2i P_2i-1 C, U, P_2i+1 P_2i (finally P_2m). Every Pauli layer is
/// certified phase-free; the inverse variant swaps the second gate of each
/// period for the noisy inverse.
std::vector<Layer> build_sequence(const PauliString& p, const PauliString& q,
                                  const CliffordTableau& c,
                                  std::span<const PauliString> paulis,
                                  Variant variant = Variant::Standard);

/// Ideal state and effect for measuring q, with SPAM applied.
StateAndEffect prepare_spam(const PauliString& q, const SpamSpec& spam);

/// Exact survival probability <<M| layers |rho>>, with Pauli noise E after
/// every Pauli layer when present.
double survival_probability(const Experiment& experiment, const StateAndEffect& spam_io,
                            std::span<const Layer> layers);

/// Empirical frequency of `shots` Bernoulli draws at probability `p`.
double sample_frequency(double p, std::uint64_t shots, Rng& rng);

struct SurvivalRecord {
  std::size_t pair_index = 0;
  std::size_t depth = 0;
  std::vector<PauliString> paulis;  // P_0 ... P_2m
  int lambda = 1;
  double probability = 0.0;
};

/// Everything g_of_m needs about one (P, Q) pair.
struct PairContext {
  PauliString p;
  PauliString q;
  CliffordMapping mapping;
  std::size_t pair_index = 0;
  Variant variant = Variant::Standard;
};

PairContext make_pair_context(const PauliString& p, const PauliString& q,
                              std::size_t pair_index = 0,
                              Variant variant = Variant::Standard);

/// Character-weighted average g(m) = E[lambda_P0 * g(m, {P_i})]. m = 0 is
/// always an exhaustive average over P_0. Records of every evaluated
/// sequence are appended when `records` is non-null (not in Exact mode).
double g_of_m(const Experiment& experiment, const PairContext& pair, std::size_t m,
              std::vector<SurvivalRecord>* records = nullptr);

/// Same, forcing the inner mode.
double g_of_m(const Experiment& experiment, const PairContext& pair, std::size_t m,
              InnerMode mode, std::vector<SurvivalRecord>* records = nullptr);

struct PairEstimate {
  PauliString p;
  PauliString q;
  int clifford_sign = 1;
  CliffordTableau clifford;
  std::vector<std::size_t> depths;
  std::vector<double> g;  // g(m) per depth
  double g0 = 0.0;
  double g1 = 0.0;
  double product = 0.0;        // estimate of U_PQ U_QP (or U_PQ^2)
  double ideal_entry = 0.0;    // U_PQ of the ideal gate
  double exact_product = 0.0;  // read off the effective noisy gate
  bool failed = false;         // set by the outer loop when this pair threw
  std::string error;
};

/// Algorithm run for one pair: g at the configured depths, product from
/// g(1)/g(0) or a log-linear fit. Throws ProtocolError when |g(0)| < 1e-6.
PairEstimate estimate_pair(const Experiment& experiment, const PauliString& p,
                           const PauliString& q, std::size_t pair_index = 0,
                           std::vector<SurvivalRecord>* records = nullptr);

/// Variant with the second gate replaced by the noisy inverse; estimates
/// U_PQ^2.
PairEstimate estimate_pair_inverse_variant(const Experiment& experiment,
                                           const PauliString& p, const PauliString& q,
                                           std::size_t pair_index = 0,
                                           std::vector<SurvivalRecord>* records = nullptr);

/// Exact product for a pair read from the effective gate: U_PQ U_QP, or U_PQ^2
/// for the inverse variant.
double exact_pair_product(const Experiment& experiment, const PauliString& p,
                          const PauliString& q, Variant variant);

// --- outer sampling ---------------------------------------------------------

/// Partition of the importance distribution U_PQ^2 / d^2 into equal
/// segments. For gates whose squared entries sit on a grid (Toffoli: 256
/// segments, 4 per unit entry and 1 per +-1/2 entry) the map is exact;
/// otherwise each pair gets round(4096 * share) segments, at least one.
struct SegmentTable {
  std::size_t qubits = 0;
  std::vector<std::pair<std::size_t, std::size_t>> segments;  // (P index, Q index)
  bool exact = false;

  std::size_t size() const { return segments.size(); }
};

SegmentTable build_segments(const TransferMatrix& ideal);

struct SampledPair {
  PauliString p;
  PauliString q;
  double weight = 0.0;  // |U_PQ|
  /// Contribution per unit sqrt(product): 1/|U_PQ| on exact tables, the
  /// general importance ratio |U_PQ| / (d^2 * segment share) otherwise.
  double factor = 0.0;
  std::size_t segment = 0;
};

/// M distinct segments drawn uniformly without replacement.
std::vector<SampledPair> importance_sample_pairs(const SegmentTable& table,
                                                 const TransferMatrix& ideal,
                                                 std::size_t m, std::uint64_t seed);
/// Toffoli segments.
std::vector<SampledPair> importance_sample_pairs(std::size_t m, std::uint64_t seed);

/// All pairs with U_PQ != 0 (one entry each, weight |U_PQ|).
std::vector<SampledPair> all_weighted_pairs(const TransferMatrix& ideal);

/// (1/M) sum factor_i * sqrt(product_i), i.e. sqrt(product_i) / |U_PiQi| on
/// exact tables, radicands clamped at 0. Returns the
/// number of clamped radicands through `clamped`.
double outer_estimate(std::span<const SampledPair> pairs, std::span<const double> products,
                      std::size_t* clamped = nullptr);

/// Full double sum (1/d^2) sum_PQ |U_PQ| sqrt(Ut_PQ Ut_QP) over the effective
/// gate (|Ut_PQ| for the inverse variant).
double exact_fidelity_bound(const Experiment& experiment);

struct FidelityEstimate {
  double estimate = 0.0;
  double true_fidelity = 0.0;           // F(Lambda)
  double true_combined_fidelity = 0.0;  // F(Lambda E)
  double exact_bound = 0.0;             // full double sum on the exact PTM
  std::size_t clamp_count = 0;
  std::vector<SampledPair> sampled;
  std::vector<PairEstimate> pairs;
  std::vector<SurvivalRecord> records;
};

/// Outer loop: sample pairs (or take all of them when M = 0), obtain each
/// product from circuits or from the exact PTM, and average. The standard
/// variant refuses gates with an asymmetric ideal transfer matrix.
FidelityEstimate estimate_fidelity(const Experiment& experiment);

/// Explicit pair list from the configuration; no outer average. Pairs run in
/// parallel with index-keyed random streams.
std::vector<PairEstimate> estimate_configured_pairs(const Experiment& experiment,
                                                    std::vector<SurvivalRecord>* records);

/// Least-squares line through (depth, ln value). Throws ProtocolError on
/// non-positive values or fewer than two distinct depths.
struct LogLinearFit {
  double rate = 0.0;       // exp(slope)
  double prefactor = 0.0;  // exp(intercept)
  double max_residual = 0.0;
};
LogLinearFit fit_exponential(std::span<const std::size_t> depths,
                             std::span<const double> values);

}  // namespace ptcb
