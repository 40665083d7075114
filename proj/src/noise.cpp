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

#include "ptcb/noise.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <fmt/format.h>

#include "ptcb/error.hpp"
#include "ptcb/parallel.hpp"
#include "ptcb/random.hpp"

namespace ptcb {
namespace {

constexpr double kCalibrationTolerance = 1e-5;
constexpr int kMaxBisection = 100;

void CheckProbability(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ValidationError(fmt::format("{} = {} outside [0, 1]", name, v));
  }
}

TransferMatrix SingleQubitFromKraus(std::initializer_list<ComplexMatrix> kraus) {
  const std::vector<ComplexMatrix> ops(kraus);
  return ptm_from_kraus(ops, 1);
}

}  // namespace

void NoiseSpec::validate(std::size_t n) const {
  CheckProbability(p, "p");
  CheckProbability(q, "q");
  if (!std::isfinite(delta)) throw ValidationError("delta must be finite");
  if (control >= n || target >= n) {
    throw ValidationError(
        fmt::format("control {} / target {} out of range for {} qubits", control, target, n));
  }
  if (control == target) throw ValidationError("control and target must differ");
}

void SpamSpec::validate() const {
  CheckProbability(prep_flip, "prep_flip");
  CheckProbability(meas_flip, "meas_flip");
}

TransferMatrix dephasing_channel(double p, std::size_t n) {
  CheckProbability(p, "dephasing p");
  ComplexMatrix k0 = ComplexMatrix::Identity(2, 2) * std::sqrt(1.0 - p);
  ComplexMatrix k1 = ComplexMatrix::Zero(2, 2);
  k1(0, 0) = std::sqrt(p);
  k1(1, 1) = -std::sqrt(p);
  return tensor_power(SingleQubitFromKraus({k0, k1}), n);
}

TransferMatrix damping_channel(double q, std::size_t n) {
  CheckProbability(q, "damping q");
  ComplexMatrix k2 = ComplexMatrix::Zero(2, 2);
  k2(0, 0) = 1.0;
  k2(1, 1) = std::sqrt(1.0 - q);
  ComplexMatrix k3 = ComplexMatrix::Zero(2, 2);
  k3(0, 1) = std::sqrt(q);
  return tensor_power(SingleQubitFromKraus({k2, k3}), n);
}

ComplexMatrix controlled_rotation(double delta, std::size_t control, std::size_t target,
                                  std::size_t n) {
  if (control >= n || target >= n || control == target) {
    throw ValidationError(fmt::format(
        "invalid control/target ({}, {}) for {} qubits", control, target, n));
  }
  const Eigen::Index d = Eigen::Index{1} << n;
  const Eigen::Index cbit = Eigen::Index{1} << (n - 1 - control);
  const Eigen::Index tbit = Eigen::Index{1} << (n - 1 - target);
  const std::complex<double> c(std::cos(delta), 0.0);
  const std::complex<double> is(0.0, std::sin(delta));
  ComplexMatrix v = ComplexMatrix::Zero(d, d);
  for (Eigen::Index b = 0; b < d; ++b) {
    if ((b & cbit) == 0) {
      v(b, b) = 1.0;
    } else {
      v(b, b) = c;
      v(b ^ tbit, b) = is;
    }
  }
  return v;
}

TransferMatrix unitary_noise(double delta, std::size_t control, std::size_t target,
                             std::size_t n) {
  if (!std::isfinite(delta)) throw ValidationError("delta must be finite");
  return ptm_unitary(controlled_rotation(delta, control, target, n), n);
}

TransferMatrix composite_noise(const NoiseSpec& spec, std::size_t n) {
  spec.validate(n);
  const TransferMatrix damp = damping_channel(spec.q, n);
  const TransferMatrix rot = unitary_noise(spec.delta, spec.control, spec.target, n);
  const TransferMatrix dephase = dephasing_channel(spec.p, n);
  return compose(dephase, compose(rot, damp));
}

NoiseSample calibrate_noise(const NoiseSpec& raw, std::size_t n, double target) {
  raw.validate(n);
  auto scaled = [&](double s) {
    NoiseSpec spec = raw;
    spec.p = std::min(1.0, s * raw.p);
    spec.q = std::min(1.0, s * raw.q);
    spec.delta = s * raw.delta;
    return spec;
  };
  auto infidelity = [&](double s) {
    return 1.0 - process_fidelity(composite_noise(scaled(s), n));
  };

  double lo = 0.0;
  double hi = 1.0;
  int grow = 0;
  while (infidelity(hi) < target) {
    lo = hi;
    hi *= 2.0;
    if (++grow > 60) {
      throw NumericalError(
          fmt::format("noise calibration cannot reach infidelity {}", target));
    }
  }
  double mid = hi;
  double value = infidelity(hi);
  for (int it = 0; it < kMaxBisection; ++it) {
    mid = 0.5 * (lo + hi);
    value = infidelity(mid);
    if (std::abs(value - target) < 1e-12) break;
    (value < target ? lo : hi) = mid;
  }
  if (std::abs(value - target) >= kCalibrationTolerance) {
    throw NumericalError(fmt::format(
        "noise calibration did not converge: infidelity {} vs target {}", value, target));
  }
  NoiseSample sample;
  sample.spec = scaled(mid);
  sample.channel = composite_noise(sample.spec, n);
  sample.target_infidelity = target;
  sample.infidelity = 1.0 - process_fidelity(sample.channel);
  return sample;
}

std::vector<NoiseSample> sample_noise_ensemble(std::size_t count, std::size_t n,
                                               double low, double high,
                                               std::uint64_t seed,
                                               const NoiseRanges& ranges,
                                               unsigned threads) {
  if (!(low > 0.0 && low < high && high < 1.0)) {
    throw ValidationError(
        fmt::format("infidelity band [{}, {}] must satisfy 0 < low < high < 1", low, high));
  }
  if (n < 2) throw ValidationError("composite noise needs at least two qubits");
  std::vector<NoiseSample> out(count);
  parallel_for(count, threads, [&](std::size_t i) {
    Rng rng({seed, i});
    const double target = rng.uniform(low, high);
    NoiseSpec raw;
    raw.p = rng.uniform(0.0, ranges.p_max);
    raw.q = rng.uniform(0.0, ranges.q_max);
    raw.delta = rng.uniform(0.0, ranges.delta_max);
    const std::size_t pair = rng.below(n * (n - 1));
    raw.control = pair / (n - 1);
    raw.target = pair % (n - 1);
    if (raw.target >= raw.control) ++raw.target;
    raw.seed = seed;
    out[i] = calibrate_noise(raw, n, target);
    out[i].spec.seed = seed;
  });
  return out;
}

StateAndEffect apply_spam(const PauliString& q, const StateAndEffect& ideal,
                          const SpamSpec& spam) {
  spam.validate();
  const std::size_t n = q.size();
  if (ideal.state.qubits() != n || ideal.effect.qubits() != n) {
    throw DimensionError("SPAM target and state sizes differ");
  }
  // Flip Pauli per measured qubit: X for a Z eigenbasis, Z otherwise.
  PauliString flips(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Letter l = q.letter(k);
    if (l == Letter::I) continue;
    flips.set_letter(k, l == Letter::Z ? Letter::X : Letter::Z);
  }
  StateAndEffect out = ideal;
  const double prep_factor = 1.0 - 2.0 * spam.prep_flip;
  const double meas_factor = 1.0 - 2.0 * spam.meas_flip;
  for (std::size_t idx = 0; idx < out.state.dim(); ++idx) {
    const PauliString term = PauliString::from_index(n, idx);
    int anticommuting = 0;
    for (std::size_t k = 0; k < n; ++k) {
      if (q.letter(k) == Letter::I) continue;
      PauliString a(n), b(n);
      a.set_letter(k, term.letter(k));
      b.set_letter(k, flips.letter(k));
      if (!commutes(a, b)) ++anticommuting;
    }
    out.state[idx] *= std::pow(prep_factor, anticommuting);
    out.effect[idx] *= std::pow(meas_factor, anticommuting);
  }
  return out;
}

}  // namespace ptcb
