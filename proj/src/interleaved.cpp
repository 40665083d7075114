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

#include "ptcb/interleaved.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "ptcb/error.hpp"

namespace ptcb {

FidelityInterval fidelity_interval(double f_le, double f_e, std::size_t d) {
  constexpr double kSlack = 1e-12;
  if (d < 2) throw ValidationError("dimension must be at least 2");
  for (double f : {f_le, f_e}) {
    if (!(f >= -kSlack && f <= 1.0 + kSlack)) {
      throw ValidationError(fmt::format("fidelity {} outside [0, 1]", f));
    }
  }
  f_le = std::clamp(f_le, 0.0, 1.0);
  f_e = std::clamp(f_e, 0.0, 1.0);
  const double dd = static_cast<double>(d);
  const double d2 = dd * dd;
  const double denom = d2 * f_e - 1.0;
  if (!(denom > 0.0)) {
    throw NumericalError(
        fmt::format("d^2 F(E) - 1 = {} is not positive; the interval is undefined", denom));
  }

  FidelityInterval out;
  const double shared = std::abs(d2 * (f_le - f_e) + 2.0 * f_e - f_le - 1.0);
  out.branches[0] = 4.0 * (dd + 1.0) * std::sqrt(1.0 - f_e) + 2.0 * (dd + 1.0) / dd * (1.0 - f_e);
  out.branches[1] = (shared + denom * (1.0 - f_e)) / (d2 - 1.0);
  out.branches[2] = (shared + denom * (f_e - f_le)) / (d2 - 1.0);
  const auto best = std::min_element(out.branches.begin(), out.branches.end());
  out.e_bound = *best;
  out.branch = static_cast<int>(best - out.branches.begin()) + 1;

  auto endpoint = [&](double f) {
    const double v = (d2 * f - 1.0) / denom * (1.0 - 1.0 / d2) + 1.0 / d2;
    return std::clamp(v, 0.0, 1.0);
  };
  out.lower = endpoint(f_le - out.e_bound);
  out.upper = endpoint(f_le + out.e_bound);
  return out;
}

CombinedFidelity combined_fidelity(const Experiment& experiment, const CrbSettings& crb,
                                   std::size_t q_samples) {
  CombinedFidelity out;
  out.true_f = experiment.true_fidelity();
  out.true_f_le = experiment.true_combined_fidelity();
  out.ptcb = estimate_fidelity(experiment);
  out.f_le = out.ptcb.estimate;
  if (const auto& e = experiment.pauli_noise()) {
    out.true_f_e = process_fidelity(*e);
    out.crb = estimate_twirl_fidelity(*e, q_samples, crb);
    out.f_e = out.crb.estimate;
  } else {
    out.f_e = 1.0;
    out.crb.estimate = out.crb.exact = 1.0;
  }
  return out;
}

}  // namespace ptcb
