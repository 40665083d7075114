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

#include "ptcb/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include <fmt/format.h>

#include "detail/basis.hpp"
#include "ptcb/error.hpp"
#include "ptcb/gates.hpp"
#include "ptcb/kernels.hpp"
#include "ptcb/parallel.hpp"

namespace ptcb {
namespace {

// Stream tags keep the random substreams of different stages apart.
constexpr std::uint64_t kTupleStream = 0x7475706c65;
constexpr std::uint64_t kShotStream = 0x73686f7473;
constexpr std::uint64_t kOuterStream = 0x6f75746572;

constexpr std::size_t kMaxSegments = 4096;

using detail::Basis;

double Saturate(double a) { return std::clamp(a, 0.0, 1.0); }

// Runs compiled layers on Pauli-Liouville vectors with reusable scratch space.
class Simulator {
 public:
  Simulator(const Experiment& experiment, const StateAndEffect& io)
      : experiment_(experiment), io_(io), basis_(experiment.qubits()),
        v_(basis_.size()), w_(basis_.size()) {}

  const Basis& basis() const { return basis_; }

  double run(std::span<const Layer> layers) {
    const auto& k = kernels::active();
    const std::size_t dim = basis_.size();
    std::copy(io_.state.coeffs().begin(), io_.state.coeffs().end(), v_.begin());
    const auto& noise = experiment_.pauli_noise();
    for (const Layer& layer : layers) {
      switch (layer.kind) {
        case Layer::Kind::Pauli:
          basis_.apply(layer.pauli, v_);
          if (noise) {
            k.matvec(noise->data().data(), v_.data(), w_.data(), dim, dim);
            v_.swap(w_);
          }
          break;
        case Layer::Kind::Gate:
          k.matvec(experiment_.noisy_gate().data().data(), v_.data(), w_.data(), dim, dim);
          v_.swap(w_);
          break;
        case Layer::Kind::InverseGate:
          k.matvec(experiment_.noisy_inverse().data().data(), v_.data(), w_.data(), dim,
                   dim);
          v_.swap(w_);
          break;
      }
    }
    const double p = k.dot(io_.effect.coeffs().data(), v_.data(), dim);
    if (!(p >= -1e-12 && p <= 1.0 + 1e-12)) {
      throw NumericalError(fmt::format("survival probability {} outside [0, 1]", p));
    }
    return p;
  }

 private:
  const Experiment& experiment_;
  const StateAndEffect& io_;
  Basis basis_;
  std::vector<double> v_;
  std::vector<double> w_;
};

// Evaluates one tuple, optionally sampling shots and recording it.
double EvaluateTuple(Simulator& sim, const PairContext& pair, std::size_t m,
                     const std::vector<PauliString>& paulis, std::uint64_t seq,
                     const ExperimentConfig& config,
                     std::vector<SurvivalRecord>* records) {
  const std::vector<Layer> layers =
      build_sequence(pair.p, pair.q, pair.mapping.tableau, paulis, pair.variant);
  double prob = sim.run(layers);
  if (config.shots > 0) {
    Rng rng({config.seed, kShotStream, pair.pair_index, m, seq});
    prob = sample_frequency(prob, config.shots, rng);
  }
  const int lambda = character_coefficient(paulis.front(), pair.q);
  if (records) {
    records->push_back(SurvivalRecord{pair.pair_index, m, paulis, lambda, prob});
  }
  return lambda * prob;
}

double ExactG(const Experiment& experiment, const PairContext& pair, std::size_t m) {
  const auto& k = kernels::active();
  const std::size_t n = experiment.qubits();
  const Basis basis(n);
  const std::size_t dim = basis.size();
  const double inv = 1.0 / static_cast<double>(dim);
  const CliffordTableau c_inv = pair.mapping.tableau.inverse();

  // chi[P][R] = character of P at R; chi_c[P][R] = character of C^dag P C at R.
  std::vector<double> chi(dim * dim), chi_c(dim * dim);
  for (std::size_t pi = 0; pi < dim; ++pi) {
    const PauliString p = PauliString::from_index(n, pi);
    const PauliString pc = c_inv.conjugate(p).phase_free();
    for (std::size_t r = 0; r < dim; ++r) {
      chi[pi * dim + r] = basis.character(p, r);
      chi_c[pi * dim + r] = basis.character(pc, r);
    }
  }
  // avg_a[R][S] = (1/d^2) sum_P chi_c[P][R] chi[P][S]; the second sandwich
  // uses its transpose.
  std::vector<double> chi_c_t(dim * dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) chi_c_t[j * dim + i] = chi_c[i * dim + j];
  }
  std::vector<double> avg_a(dim * dim), avg_b(dim * dim);
  k.matmul(chi_c_t.data(), chi.data(), avg_a.data(), dim, dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = 0; j < dim; ++j) {
      avg_a[i * dim + j] *= inv;
      avg_b[j * dim + i] = avg_a[i * dim + j];
    }
  }

  const TransferMatrix& first = experiment.effective_gate();
  const TransferMatrix& second = pair.variant == Variant::Inverse
                                     ? experiment.effective_inverse_gate()
                                     : experiment.effective_gate();
  std::vector<double> k_a(dim * dim), k_b(dim * dim);
  k.hadamard(first.data().data(), avg_a.data(), k_a.data(), dim * dim);
  k.hadamard(second.data().data(), avg_b.data(), k_b.data(), dim * dim);

  const StateAndEffect io = prepare_spam(pair.q, experiment.config().spam);
  // Character-weighted average of P_0 is the projector onto sigma_Q.
  const std::size_t qi = pair.q.index();
  std::vector<double> v(dim), w(dim);
  for (std::size_t r = 0; r < dim; ++r) {
    double s = 0.0;
    for (std::size_t pi = 0; pi < dim; ++pi) s += chi[pi * dim + qi] * chi[pi * dim + r];
    v[r] = s * inv * io.state[r];
  }
  for (std::size_t i = 0; i < m; ++i) {
    k.matvec(k_a.data(), v.data(), w.data(), dim, dim);
    k.matvec(k_b.data(), w.data(), v.data(), dim, dim);
  }
  if (const auto& e = experiment.pauli_noise()) {
    k.matvec(e->data().data(), v.data(), w.data(), dim, dim);
    v.swap(w);
  }
  return k.dot(io.effect.coeffs().data(), v.data(), dim);
}

void CheckQubits(const PauliString& p, std::size_t n, const char* what) {
  if (p.size() != n) {
    throw DimensionError(fmt::format("{} has {} qubits, expected {}", what, p.size(), n));
  }
}

PairEstimate EvaluatePair(const Experiment& experiment, const PauliString& p,
                          const PauliString& q, std::size_t pair_index, Variant variant,
                          std::vector<SurvivalRecord>* records) {
  const ExperimentConfig& config = experiment.config();
  CheckQubits(p, experiment.qubits(), "P");
  CheckQubits(q, experiment.qubits(), "Q");
  PairEstimate out;
  out.p = p.phase_free();
  out.q = q.phase_free();
  out.ideal_entry = experiment.ideal().at(out.p, out.q);
  out.exact_product = exact_pair_product(experiment, out.p, out.q, variant);

  if (out.p.is_identity() && out.q.is_identity()) {
    // Trace preservation fixes this entry; no circuits are needed.
    out.clifford = CliffordTableau(experiment.qubits());
    out.product = 1.0;
    out.g0 = out.g1 = 1.0;
    return out;
  }
  if (out.p.is_identity() || out.q.is_identity()) {
    throw ValidationError("pairs with exactly one identity Pauli carry no signal");
  }
  const PairContext ctx = make_pair_context(out.p, out.q, pair_index, variant);
  out.clifford = ctx.mapping.tableau;
  out.clifford_sign = ctx.mapping.sign;

  if (config.products == ProductSource::Exact) {
    out.product = out.exact_product;
    return out;
  }

  out.depths = config.depths;
  out.g.reserve(config.depths.size());
  for (std::size_t m : config.depths) {
    out.g.push_back(g_of_m(experiment, ctx, m, records));
  }
  auto at_depth = [&](std::size_t m) -> std::optional<double> {
    for (std::size_t i = 0; i < out.depths.size(); ++i) {
      if (out.depths[i] == m) return out.g[i];
    }
    return std::nullopt;
  };
  const auto g0 = at_depth(0);
  const auto g1 = at_depth(1);
  out.g0 = g0.value_or(std::nan(""));
  out.g1 = g1.value_or(std::nan(""));
  if (g0 && std::abs(*g0) < 1e-6) {
    throw ProtocolError(fmt::format("degenerate signal for ({}, {}): |g(0)| = {}",
                                    out.p.letters(), out.q.letters(), std::abs(*g0)));
  }
  if (config.estimator == Estimator::Ratio) {
    out.product = *g1 / *g0;
  } else {
    out.product = fit_exponential(out.depths, out.g).rate;
  }
  return out;
}

}  // namespace

// --- configuration and experiment -------------------------------------------

void ExperimentConfig::validate() const {
  if (qubits < 1 || qubits > kMaxQubits) {
    throw ValidationError(fmt::format("qubits must be in [1, {}]", kMaxQubits));
  }
  if (gate == "toffoli" || gate == "ccz") {
    if (qubits != 3) throw ValidationError(fmt::format("gate {} needs 3 qubits", gate));
  } else if (gate == "custom") {
    const auto d = static_cast<Eigen::Index>(std::size_t{1} << qubits);
    if (unitary.rows() != d || unitary.cols() != d) {
      throw ValidationError(fmt::format("custom unitary must be {}x{}", d, d));
    }
  } else if (gate != "identity") {
    throw ValidationError(fmt::format("unknown gate '{}'", gate));
  }
  if (noise) noise->validate(qubits);
  if (pauli_noise) pauli_noise->validate(qubits);
  if (noise && noise_ptm) throw ValidationError("noise given both as parameters and as a PTM");
  if (pauli_noise && pauli_noise_ptm) {
    throw ValidationError("Pauli noise given both as parameters and as a PTM");
  }
  spam.validate();
  if (depths.empty()) throw ValidationError("depths must be non-empty");
  if (inner_samples < 1) throw ValidationError("inner_samples must be at least 1");
  const bool has0 = std::find(depths.begin(), depths.end(), 0) != depths.end();
  const bool has1 = std::find(depths.begin(), depths.end(), 1) != depths.end();
  if (estimator == Estimator::Ratio && !(has0 && has1)) {
    throw ValidationError("the ratio estimator needs depths 0 and 1");
  }
  if (estimator == Estimator::Fit) {
    std::vector<std::size_t> distinct = depths;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 2) throw ValidationError("the fit estimator needs two distinct depths");
  }
  if (inner == InnerMode::Exact && shots > 0) {
    throw ValidationError("exact inner averaging has no circuits to sample shots from");
  }
  for (const auto& [p, q] : pairs) {
    if (p.size() != qubits || q.size() != qubits) {
      throw ValidationError(fmt::format("pair ({}, {}) does not act on {} qubits",
                                        p.letters(), q.letters(), qubits));
    }
  }
}

ComplexMatrix resolve_gate_unitary(const ExperimentConfig& config) {
  if (config.gate == "toffoli") return gates::toffoli();
  if (config.gate == "ccz") return gates::ccz();
  if (config.gate == "identity") return gates::identity(config.qubits);
  if (config.gate == "custom") return config.unitary;
  throw ValidationError(fmt::format("unknown gate '{}'", config.gate));
}

Experiment::Experiment(ExperimentConfig config) : config_(std::move(config)) {
  config_.validate();
  const std::size_t n = config_.qubits;
  ideal_ = ptm_unitary(resolve_gate_unitary(config_), n);
  if (config_.noise_ptm) {
    if (config_.noise_ptm->qubits() != n) throw DimensionError("noise PTM qubit count");
    if (!config_.noise_ptm->is_trace_preserving(1e-10)) {
      throw ValidationError("noise PTM is not trace preserving");
    }
    noise_ = *config_.noise_ptm;
  } else if (config_.noise) {
    noise_ = composite_noise(*config_.noise, n);
  } else {
    noise_ = TransferMatrix::identity(n);
  }
  noisy_ = compose(ideal_, noise_);
  noisy_inverse_ = noisy_.transpose();
  if (config_.pauli_noise_ptm) {
    if (config_.pauli_noise_ptm->qubits() != n) {
      throw DimensionError("Pauli noise PTM qubit count");
    }
    if (!config_.pauli_noise_ptm->is_trace_preserving(1e-10)) {
      throw ValidationError("Pauli noise PTM is not trace preserving");
    }
    pauli_noise_ = *config_.pauli_noise_ptm;
  } else if (config_.pauli_noise) {
    pauli_noise_ = composite_noise(*config_.pauli_noise, n);
  }
  effective_ = pauli_noise_ ? compose(noisy_, *pauli_noise_) : noisy_;
  effective_inverse_ = pauli_noise_ ? compose(noisy_inverse_, *pauli_noise_) : noisy_inverse_;
}

double Experiment::true_fidelity() const { return process_fidelity(noise_); }

double Experiment::true_combined_fidelity() const {
  return pauli_noise_ ? process_fidelity(compose(noise_, *pauli_noise_)) : true_fidelity();
}

bool Experiment::ideal_is_symmetric(double tol) const {
  return ideal_.max_abs_diff(ideal_.transpose()) <= tol;
}

// --- circuits ---------------------------------------------------------------

std::vector<Layer> build_sequence(const PauliString& p, const PauliString& q,
                                  const CliffordTableau& c,
                                  std::span<const PauliString> paulis, Variant variant) {
  if (paulis.size() % 2 != 1) {
    throw ValidationError("a depth-m sequence takes 2m + 1 Paulis");
  }
  if (c.conjugate(p).phase_free() != q.phase_free()) {
    throw ValidationError(fmt::format("Clifford does not map {} to +-{}", p.str(), q.str()));
  }
  const std::size_t m = paulis.size() / 2;
  auto pauli_layer = [](const PauliString& op) {
    return Layer{Layer::Kind::Pauli, op.phase_free()};
  };
  std::vector<Layer> layers;
  layers.reserve(4 * m + 1);
  if (m == 0) {
    layers.push_back(pauli_layer(paulis[0]));
    return layers;
  }
  const CliffordTableau c_inv = c.inverse();
  layers.push_back(pauli_layer(paulis[1] * paulis[0]));
  for (std::size_t i = 1; i <= m; ++i) {
    layers.push_back(Layer{Layer::Kind::Gate, {}});
    // C^dag (P_2i P_2i-1) C must again be a Pauli carrying the same overall
    // phase up to sign; anything else means the tableau is broken.
    const PauliString inner = paulis[2 * i] * paulis[2 * i - 1];
    const PauliString middle = c_inv.conjugate(inner);
    if ((middle.phase() - inner.phase() + 4) % 2 != 0) {
      throw NumericalError(fmt::format("internal consistency: C^dag {} C = {} is not a Pauli",
                                       inner.str(), middle.str()));
    }
    layers.push_back(pauli_layer(middle));
    layers.push_back(Layer{variant == Variant::Inverse ? Layer::Kind::InverseGate
                                                        : Layer::Kind::Gate,
                           {}});
    layers.push_back(pauli_layer(i < m ? paulis[2 * i + 1] * paulis[2 * i] : paulis[2 * i]));
  }
  return layers;
}

StateAndEffect prepare_spam(const PauliString& q, const SpamSpec& spam) {
  return apply_spam(q, stabilizer_state_and_effect(q.phase_free()), spam);
}

double survival_probability(const Experiment& experiment, const StateAndEffect& spam_io,
                            std::span<const Layer> layers) {
  Simulator sim(experiment, spam_io);
  return sim.run(layers);
}

double sample_frequency(double p, std::uint64_t shots, Rng& rng) {
  if (shots == 0) throw ValidationError("shot count must be positive");
  return static_cast<double>(rng.binomial(shots, Saturate(p))) / static_cast<double>(shots);
}

PairContext make_pair_context(const PauliString& p, const PauliString& q,
                              std::size_t pair_index, Variant variant) {
  return PairContext{p, q, find_clifford_mapping(p, q), pair_index, variant};
}

double g_of_m(const Experiment& experiment, const PairContext& pair, std::size_t m,
              std::vector<SurvivalRecord>* records) {
  return g_of_m(experiment, pair, m, experiment.config().inner, records);
}

double g_of_m(const Experiment& experiment, const PairContext& pair, std::size_t m,
              InnerMode mode, std::vector<SurvivalRecord>* records) {
  const ExperimentConfig& config = experiment.config();
  const std::size_t n = experiment.qubits();
  CheckQubits(pair.p, n, "P");
  CheckQubits(pair.q, n, "Q");
  if (mode == InnerMode::Exact && m > 0) return ExactG(experiment, pair, m);

  const StateAndEffect io = prepare_spam(pair.q, config.spam);
  Simulator sim(experiment, io);
  const std::size_t dim = sim.basis().size();
  const std::size_t length = 2 * m + 1;
  std::vector<PauliString> paulis(length, PauliString(n));

  if (m == 0 || mode == InnerMode::Exhaustive || mode == InnerMode::Exact) {
    const std::size_t total = detail::saturating_pow(dim, length);
    if (total > detail::kMaxEnumeratedTuples) {
      throw ValidationError(fmt::format("{} tuples are too many to enumerate", total));
    }
    double sum = 0.0;
    for (std::size_t t = 0; t < total; ++t) {
      std::size_t rest = t;
      for (std::size_t j = length; j-- > 0;) {
        paulis[j] = PauliString::from_index(n, rest % dim);
        rest /= dim;
      }
      sum += EvaluateTuple(sim, pair, m, paulis, t, config, records);
    }
    return sum / static_cast<double>(total);
  }

  const std::size_t total = detail::saturating_pow(dim, length);
  if (config.inner_samples > total) {
    throw ValidationError(fmt::format(
        "inner_samples = {} exceeds the {} distinct tuples at depth {}", config.inner_samples,
        total, m));
  }
  Rng rng({config.seed, kTupleStream, pair.pair_index, m});
  std::unordered_set<std::string> seen;
  std::string key(2 * length, '\0');
  std::vector<std::size_t> digits(length);
  double sum = 0.0;
  for (std::size_t s = 0; s < config.inner_samples;) {
    for (std::size_t j = 0; j < length; ++j) {
      digits[j] = static_cast<std::size_t>(rng.below(dim));
      key[2 * j] = static_cast<char>(digits[j] & 0xff);
      key[2 * j + 1] = static_cast<char>(digits[j] >> 8);
    }
    if (!seen.insert(key).second) continue;
    for (std::size_t j = 0; j < length; ++j) paulis[j] = PauliString::from_index(n, digits[j]);
    sum += EvaluateTuple(sim, pair, m, paulis, s, config, records);
    ++s;
  }
  return sum / static_cast<double>(config.inner_samples);
}

PairEstimate estimate_pair(const Experiment& experiment, const PauliString& p,
                           const PauliString& q, std::size_t pair_index,
                           std::vector<SurvivalRecord>* records) {
  return EvaluatePair(experiment, p, q, pair_index, Variant::Standard, records);
}

PairEstimate estimate_pair_inverse_variant(const Experiment& experiment,
                                           const PauliString& p, const PauliString& q,
                                           std::size_t pair_index,
                                           std::vector<SurvivalRecord>* records) {
  return EvaluatePair(experiment, p, q, pair_index, Variant::Inverse, records);
}

double exact_pair_product(const Experiment& experiment, const PauliString& p,
                          const PauliString& q, Variant variant) {
  const std::size_t pi = p.index();
  const std::size_t qi = q.index();
  const TransferMatrix& first = experiment.effective_gate();
  const TransferMatrix& second = variant == Variant::Inverse
                                     ? experiment.effective_inverse_gate()
                                     : experiment.effective_gate();
  return first(pi, qi) * second(qi, pi);
}

// --- outer sampling ---------------------------------------------------------

SegmentTable build_segments(const TransferMatrix& ideal) {
  const std::size_t dim = ideal.dim();
  std::vector<std::size_t> support;
  std::vector<double> share;
  double total = 0.0;
  for (std::size_t i = 0; i < dim * dim; ++i) {
    const double u = ideal.data()[i];
    if (std::abs(u) > 1e-12) {
      support.push_back(i);
      share.push_back(u * u);
      total += u * u;
    }
  }
  if (support.empty()) throw ValidationError("ideal transfer matrix is zero");
  for (double& s : share) s /= total;

  SegmentTable table;
  table.qubits = ideal.qubits();
  for (std::size_t segments = 1; segments <= kMaxSegments; ++segments) {
    bool on_grid = true;
    std::size_t used = 0;
    for (double s : share) {
      const double c = s * static_cast<double>(segments);
      const double r = std::round(c);
      if (r < 1.0 || std::abs(c - r) > 1e-9) {
        on_grid = false;
        break;
      }
      used += static_cast<std::size_t>(r);
    }
    if (!on_grid || used != segments) continue;
    table.exact = true;
    for (std::size_t k = 0; k < support.size(); ++k) {
      const auto copies =
          static_cast<std::size_t>(std::round(share[k] * static_cast<double>(segments)));
      for (std::size_t c = 0; c < copies; ++c) {
        table.segments.emplace_back(support[k] / dim, support[k] % dim);
      }
    }
    return table;
  }

  // Off-grid weights: each pair gets round(share * kMaxSegments) segments,
  // and at least one, so every pair stays reachable; sample factors use the
  // actual segment counts.
  for (std::size_t k = 0; k < support.size(); ++k) {
    const auto copies = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(share[k] * static_cast<double>(kMaxSegments))));
    for (std::size_t c = 0; c < copies; ++c) {
      table.segments.emplace_back(support[k] / dim, support[k] % dim);
    }
  }
  return table;
}

std::vector<SampledPair> importance_sample_pairs(const SegmentTable& table,
                                                 const TransferMatrix& ideal,
                                                 std::size_t m, std::uint64_t seed) {
  const std::size_t total = table.size();
  if (m > total) {
    throw ValidationError(
        fmt::format("cannot draw {} distinct segments out of {}", m, total));
  }
  if (ideal.qubits() != table.qubits) throw DimensionError("segment table qubit count");
  std::vector<std::size_t> order(total);
  std::iota(order.begin(), order.end(), 0);
  Rng rng({seed, kOuterStream});
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(total - i));
    std::swap(order[i], order[j]);
  }
  order.resize(m);
  std::sort(order.begin(), order.end());

  std::vector<std::size_t> copies;
  if (!table.exact) {
    copies.assign(ideal.dim() * ideal.dim(), 0);
    for (const auto& [r, c] : table.segments) ++copies[r * ideal.dim() + c];
  }
  const double d2 = static_cast<double>(ideal.dim());
  std::vector<SampledPair> out;
  out.reserve(m);
  for (std::size_t seg : order) {
    const auto [r, c] = table.segments[seg];
    SampledPair sp;
    sp.p = PauliString::from_index(table.qubits, r);
    sp.q = PauliString::from_index(table.qubits, c);
    sp.weight = std::abs(ideal(r, c));
    sp.segment = seg;
    if (table.exact) {
      sp.factor = 1.0 / sp.weight;
    } else {
      const double share =
          static_cast<double>(copies[r * ideal.dim() + c]) / static_cast<double>(total);
      sp.factor = sp.weight / (d2 * share);
    }
    out.push_back(sp);
  }
  return out;
}

std::vector<SampledPair> importance_sample_pairs(std::size_t m, std::uint64_t seed) {
  const TransferMatrix ideal = ptm_unitary(gates::toffoli(), 3);
  return importance_sample_pairs(build_segments(ideal), ideal, m, seed);
}

std::vector<SampledPair> all_weighted_pairs(const TransferMatrix& ideal) {
  const std::size_t dim = ideal.dim();
  const double d2 = static_cast<double>(dim);
  std::vector<SampledPair> out;
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      const double u = ideal(r, c);
      if (std::abs(u) <= 1e-12) continue;
      SampledPair sp;
      sp.p = PauliString::from_index(ideal.qubits(), r);
      sp.q = PauliString::from_index(ideal.qubits(), c);
      sp.weight = std::abs(u);
      sp.factor = sp.weight;  // summed, then divided by M = count below
      sp.segment = out.size();
      out.push_back(sp);
    }
  }
  // With every pair taken once, (1/M) sum factor * sqrt = (1/d^2) sum |U| sqrt.
  const double scale = static_cast<double>(out.size()) / d2;
  for (auto& sp : out) sp.factor *= scale;
  return out;
}

double outer_estimate(std::span<const SampledPair> pairs, std::span<const double> products,
                      std::size_t* clamped) {
  if (pairs.size() != products.size()) throw DimensionError("pairs and products differ");
  if (pairs.empty()) throw ProtocolError("no pairs to average");
  std::size_t clamps = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    double radicand = products[i];
    if (radicand < 0.0) {
      radicand = 0.0;
      ++clamps;
    }
    sum += pairs[i].factor * std::sqrt(radicand);
  }
  if (clamped) *clamped = clamps;
  return sum / static_cast<double>(pairs.size());
}

double exact_fidelity_bound(const Experiment& experiment) {
  const TransferMatrix& u = experiment.ideal();
  const Variant variant = experiment.config().variant;
  const std::size_t dim = u.dim();
  double sum = 0.0;
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      const double w = std::abs(u(r, c));
      if (w <= 1e-12) continue;
      const double prod =
          exact_pair_product(experiment, PauliString::from_index(u.qubits(), r),
                             PauliString::from_index(u.qubits(), c), variant);
      sum += w * std::sqrt(std::max(prod, 0.0));
    }
  }
  return sum / static_cast<double>(dim);
}

FidelityEstimate estimate_fidelity(const Experiment& experiment) {
  const ExperimentConfig& config = experiment.config();
  if (config.variant == Variant::Standard && !experiment.ideal_is_symmetric()) {
    throw ProtocolError(
        "the ideal transfer matrix is not symmetric; use the inverse-gate variant");
  }
  FidelityEstimate out;
  out.true_fidelity = experiment.true_fidelity();
  out.true_combined_fidelity = experiment.true_combined_fidelity();
  out.exact_bound = exact_fidelity_bound(experiment);

  if (config.outer_samples == 0) {
    out.sampled = all_weighted_pairs(experiment.ideal());
  } else {
    const SegmentTable table = build_segments(experiment.ideal());
    out.sampled =
        importance_sample_pairs(table, experiment.ideal(), config.outer_samples, config.seed);
  }

  const std::size_t count = out.sampled.size();
  std::vector<PairEstimate> estimates(count);
  std::vector<std::vector<SurvivalRecord>> records(count);
  parallel_for(count, config.threads, [&](std::size_t i) {
    const SampledPair& sp = out.sampled[i];
    try {
      estimates[i] = EvaluatePair(experiment, sp.p, sp.q, i, config.variant, &records[i]);
    } catch (const ProtocolError& e) {
      estimates[i].p = sp.p;
      estimates[i].q = sp.q;
      estimates[i].ideal_entry = experiment.ideal().at(sp.p, sp.q);
      estimates[i].failed = true;
      estimates[i].error = e.what();
    }
  });

  std::vector<SampledPair> kept;
  std::vector<double> products;
  for (std::size_t i = 0; i < count; ++i) {
    if (estimates[i].failed) continue;
    kept.push_back(out.sampled[i]);
    products.push_back(estimates[i].product);
  }
  if (kept.empty()) throw ProtocolError("every sampled pair was degenerate");
  if (config.outer_samples == 0 && kept.size() != count) {
    // Factors were scaled for the full pair count.
    for (auto& sp : kept) sp.factor *= static_cast<double>(kept.size()) / count;
  }
  out.estimate = outer_estimate(kept, products, &out.clamp_count);
  out.pairs = std::move(estimates);
  for (auto& r : records) {
    out.records.insert(out.records.end(), std::make_move_iterator(r.begin()),
                       std::make_move_iterator(r.end()));
  }
  return out;
}

std::vector<PairEstimate> estimate_configured_pairs(const Experiment& experiment,
                                                    std::vector<SurvivalRecord>* records) {
  const ExperimentConfig& config = experiment.config();
  const std::size_t count = config.pairs.size();
  std::vector<PairEstimate> estimates(count);
  std::vector<std::vector<SurvivalRecord>> per_pair(count);
  parallel_for(count, config.threads, [&](std::size_t i) {
    const auto& [p, q] = config.pairs[i];
    estimates[i] =
        EvaluatePair(experiment, p, q, i, config.variant, records ? &per_pair[i] : nullptr);
  });
  if (records) {
    for (auto& r : per_pair) records->insert(records->end(), r.begin(), r.end());
  }
  return estimates;
}

LogLinearFit fit_exponential(std::span<const std::size_t> depths,
                             std::span<const double> values) {
  if (depths.size() != values.size()) throw DimensionError("depths and values differ");
  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (!(values[i] > 0.0)) {
      throw ProtocolError(fmt::format("cannot fit ln f at depth {}: value {} is not positive",
                                      depths[i], values[i]));
    }
    xs.push_back(static_cast<double>(depths[i]));
    ys.push_back(std::log(values[i]));
  }
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx == 0.0) throw ProtocolError("fit needs at least two distinct depths");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  LogLinearFit fit{std::exp(slope), std::exp(intercept), 0.0};
  for (std::size_t i = 0; i < xs.size(); ++i) {
    fit.max_residual =
        std::max(fit.max_residual, std::abs(ys[i] - (intercept + slope * xs[i])));
  }
  return fit;
}

}  // namespace ptcb
