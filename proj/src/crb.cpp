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

#include "ptcb/crb.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <unordered_set>

#include <fmt/format.h>

#include "detail/basis.hpp"
#include "ptcb/error.hpp"
#include "ptcb/kernels.hpp"
#include "ptcb/parallel.hpp"
#include "ptcb/random.hpp"

namespace ptcb {
namespace {

constexpr std::uint64_t kTupleStream = 0x6372627475706c;
constexpr std::uint64_t kShotStream = 0x63726273686f74;
constexpr std::uint64_t kQStream = 0x6372627100;

class CrbSimulator {
 public:
  CrbSimulator(const TransferMatrix& noise, const StateAndEffect& io)
      : noise_(noise), io_(io), basis_(noise.qubits()), v_(basis_.size()),
        w_(basis_.size()) {}

  const detail::Basis& basis() const { return basis_; }

  double run(std::span<const PauliString> gates) {
    const auto& k = kernels::active();
    const std::size_t dim = basis_.size();
    std::copy(io_.state.coeffs().begin(), io_.state.coeffs().end(), v_.begin());
    for (const PauliString& g : gates) {
      basis_.apply(g, v_);
      k.matvec(noise_.data().data(), v_.data(), w_.data(), dim, dim);
      v_.swap(w_);
    }
    const double p = k.dot(io_.effect.coeffs().data(), v_.data(), dim);
    if (!(p >= -1e-12 && p <= 1.0 + 1e-12)) {
      throw NumericalError(fmt::format("survival probability {} outside [0, 1]", p));
    }
    return p;
  }

 private:
  const TransferMatrix& noise_;
  const StateAndEffect& io_;
  detail::Basis basis_;
  std::vector<double> v_;
  std::vector<double> w_;
};

double EvaluateTuple(CrbSimulator& sim, const PauliString& q, std::size_t m,
                     const std::vector<PauliString>& paulis, std::uint64_t seq,
                     const CrbSettings& settings, std::size_t q_index,
                     std::vector<CrbRecord>* records) {
  double prob = sim.run(crb_layers(paulis));
  if (settings.shots > 0) {
    Rng rng({settings.seed, kShotStream, q_index, m, seq});
    prob = sample_frequency(prob, settings.shots, rng);
  }
  const int lambda = character_coefficient(paulis.front(), q);
  if (records) records->push_back(CrbRecord{q_index, m, paulis, lambda, prob});
  return lambda * prob;
}

// <<M| E T^m Pi_Q |rho>> with T the character average of P E P.
double ExactF(const TransferMatrix& noise, const StateAndEffect& io, const PauliString& q,
              std::size_t m) {
  const auto& k = kernels::active();
  const std::size_t n = noise.qubits();
  const detail::Basis basis(n);
  const std::size_t dim = basis.size();
  const double inv = 1.0 / static_cast<double>(dim);
  std::vector<double> chi(dim * dim), chi_t(dim * dim), avg(dim * dim), t(dim * dim);
  for (std::size_t pi = 0; pi < dim; ++pi) {
    const PauliString p = PauliString::from_index(n, pi);
    for (std::size_t r = 0; r < dim; ++r) {
      chi[pi * dim + r] = basis.character(p, r);
      chi_t[r * dim + pi] = chi[pi * dim + r];
    }
  }
  k.matmul(chi_t.data(), chi.data(), avg.data(), dim, dim, dim);
  for (double& a : avg) a *= inv;
  k.hadamard(noise.data().data(), avg.data(), t.data(), dim * dim);

  const std::size_t qi = q.index();
  std::vector<double> v(dim), w(dim);
  for (std::size_t r = 0; r < dim; ++r) v[r] = avg[qi * dim + r] * io.state[r];
  for (std::size_t i = 0; i < m; ++i) {
    k.matvec(t.data(), v.data(), w.data(), dim, dim);
    v.swap(w);
  }
  k.matvec(noise.data().data(), v.data(), w.data(), dim, dim);
  return k.dot(io.effect.coeffs().data(), w.data(), dim);
}

void CheckNoise(const TransferMatrix& noise) {
  if (noise.qubits() == 0) throw ValidationError("noise transfer matrix is empty");
  if (!noise.is_trace_preserving(1e-10)) {
    throw ValidationError("noise transfer matrix is not trace preserving");
  }
}

}  // namespace

void CrbSettings::validate() const {
  if (depths.empty()) throw ValidationError("depths must be non-empty");
  std::vector<std::size_t> distinct = depths;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (distinct.size() < 2) throw ValidationError("the fit needs two distinct depths");
  if (inner_samples < 1) throw ValidationError("inner_samples must be at least 1");
  if (inner == InnerMode::Exact && shots > 0) {
    throw ValidationError("exact inner averaging has no circuits to sample shots from");
  }
  spam.validate();
}

std::vector<PauliString> crb_layers(std::span<const PauliString> paulis) {
  if (paulis.empty()) throw ValidationError("a depth-m sequence takes m + 1 Paulis");
  std::vector<PauliString> gates;
  const std::size_t m = paulis.size() - 1;
  if (m == 0) {
    gates.push_back(paulis[0].phase_free());
    return gates;
  }
  gates.reserve(m + 1);
  for (std::size_t i = 1; i <= m; ++i) gates.push_back((paulis[i] * paulis[i - 1]).phase_free());
  gates.push_back(paulis[m].phase_free());
  return gates;
}

double crb_survival(const TransferMatrix& noise, const StateAndEffect& spam_io,
                    std::span<const PauliString> paulis) {
  CrbSimulator sim(noise, spam_io);
  return sim.run(crb_layers(paulis));
}

double f_of_m(const TransferMatrix& noise, const PauliString& q, std::size_t m,
              const CrbSettings& settings, std::size_t q_index,
              std::vector<CrbRecord>* records) {
  CheckNoise(noise);
  const std::size_t n = noise.qubits();
  if (q.size() != n) throw DimensionError("Q does not match the noise qubit count");
  const StateAndEffect io = prepare_spam(q, settings.spam);
  if (settings.inner == InnerMode::Exact && m > 0) return ExactF(noise, io, q, m);

  CrbSimulator sim(noise, io);
  const std::size_t dim = sim.basis().size();
  const std::size_t length = m + 1;
  const std::size_t total = detail::saturating_pow(dim, length);
  std::vector<PauliString> paulis(length, PauliString(n));

  if (m == 0 || settings.inner != InnerMode::Sampled) {
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
      sum += EvaluateTuple(sim, q, m, paulis, t, settings, q_index, records);
    }
    return sum / static_cast<double>(total);
  }

  if (settings.inner_samples > total) {
    throw ValidationError(fmt::format(
        "inner_samples = {} exceeds the {} distinct tuples at depth {}",
        settings.inner_samples, total, m));
  }
  Rng rng({settings.seed, kTupleStream, q_index, m});
  std::unordered_set<std::string> seen;
  std::string key(2 * length, '\0');
  std::vector<std::size_t> digits(length);
  double sum = 0.0;
  for (std::size_t s = 0; s < settings.inner_samples;) {
    for (std::size_t j = 0; j < length; ++j) {
      digits[j] = static_cast<std::size_t>(rng.below(dim));
      key[2 * j] = static_cast<char>(digits[j] & 0xff);
      key[2 * j + 1] = static_cast<char>(digits[j] >> 8);
    }
    if (!seen.insert(key).second) continue;
    for (std::size_t j = 0; j < length; ++j) paulis[j] = PauliString::from_index(n, digits[j]);
    sum += EvaluateTuple(sim, q, m, paulis, s, settings, q_index, records);
    ++s;
  }
  return sum / static_cast<double>(settings.inner_samples);
}

EigenvalueEstimate estimate_pauli_eigenvalue(const TransferMatrix& noise,
                                             const PauliString& q,
                                             const CrbSettings& settings,
                                             std::size_t q_index,
                                             std::vector<CrbRecord>* records) {
  settings.validate();
  CheckNoise(noise);
  EigenvalueEstimate out;
  out.q = q.phase_free();
  out.exact = noise.at(out.q, out.q);
  if (out.q.is_identity()) return out;  // trace preservation
  out.depths = settings.depths;
  for (std::size_t m : settings.depths) {
    out.f.push_back(f_of_m(noise, out.q, m, settings, q_index, records));
  }
  const LogLinearFit fit = fit_exponential(out.depths, out.f);
  out.eigenvalue = fit.rate;
  out.prefactor = fit.prefactor;
  out.fit_residual = fit.max_residual;
  return out;
}

TwirlFidelityEstimate estimate_twirl_fidelity(const TransferMatrix& noise,
                                              std::span<const PauliString> qs,
                                              const CrbSettings& settings,
                                              bool keep_records) {
  settings.validate();
  CheckNoise(noise);
  if (qs.empty()) throw ValidationError("no Paulis to estimate");
  TwirlFidelityEstimate out;
  out.exact = process_fidelity(noise);
  const std::size_t count = qs.size();
  out.eigenvalues.resize(count);
  std::vector<std::vector<CrbRecord>> records(count);
  parallel_for(count, settings.threads, [&](std::size_t i) {
    try {
      out.eigenvalues[i] = estimate_pauli_eigenvalue(noise, qs[i], settings, i,
                                                     keep_records ? &records[i] : nullptr);
    } catch (const ProtocolError& e) {
      out.eigenvalues[i].q = qs[i].phase_free();
      out.eigenvalues[i].exact = noise.at(out.eigenvalues[i].q, out.eigenvalues[i].q);
      out.eigenvalues[i].failed = true;
      out.eigenvalues[i].error = e.what();
    }
  });
  double sum = 0.0;
  std::size_t used = 0;
  for (const auto& e : out.eigenvalues) {
    if (e.failed) continue;
    sum += e.eigenvalue;
    ++used;
  }
  if (used == 0) throw ProtocolError("every eigenvalue fit failed");
  out.estimate = sum / static_cast<double>(used);
  for (auto& r : records) {
    out.records.insert(out.records.end(), std::make_move_iterator(r.begin()),
                       std::make_move_iterator(r.end()));
  }
  return out;
}

TwirlFidelityEstimate estimate_twirl_fidelity(const TransferMatrix& noise,
                                              std::size_t samples,
                                              const CrbSettings& settings,
                                              bool keep_records) {
  CheckNoise(noise);
  const std::size_t n = noise.qubits();
  const std::size_t dim = pauli_count(n);
  std::vector<PauliString> qs;
  if (samples == 0) {
    for (std::size_t i = 0; i < dim; ++i) qs.push_back(PauliString::from_index(n, i));
  } else {
    Rng rng({settings.seed, kQStream});
    for (std::size_t i = 0; i < samples; ++i) {
      qs.push_back(PauliString::from_index(n, static_cast<std::size_t>(rng.below(dim))));
    }
  }
  return estimate_twirl_fidelity(noise, qs, settings, keep_records);
}

}  // namespace ptcb
