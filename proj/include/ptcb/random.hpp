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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <vector>

namespace ptcb {

/// Deterministic random stream. Substreams are keyed by an arbitrary tuple of
/// integers (seed, pair index, depth, ...) through std::seed_seq, whose mixing
/// algorithm is fixed by the standard. Distributions are implemented here
/// rather than taken from <random> because the standard leaves their
/// algorithms unspecified.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : Rng({seed}) {}
  Rng(std::initializer_list<std::uint64_t> key)
      : Rng(std::span<const std::uint64_t>(key.begin(), key.size())) {}
  explicit Rng(std::span<const std::uint64_t> key) {
    std::vector<std::uint32_t> words;
    words.reserve(2 * key.size());
    for (std::uint64_t k : key) {
      words.push_back(static_cast<std::uint32_t>(k));
      words.push_back(static_cast<std::uint32_t>(k >> 32));
    }
    std::seed_seq seq(words.begin(), words.end());
    engine_.seed(seq);
  }

  std::uint64_t bits() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound). Rejection keeps it unbiased.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  bool bernoulli(double p) { return uniform() < p; }

  /// Number of successes in `trials` Bernoulli(p) draws. Large counts use
  /// inversion with the outcomes visited outward from the mode (m, m+1, m-1,
  /// m+2, ...), which costs O(sqrt(trials)) steps and one uniform.
  std::uint64_t binomial(std::uint64_t trials, double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    if (trials <= 32) {
      std::uint64_t hits = 0;
      for (std::uint64_t i = 0; i < trials; ++i) hits += bernoulli(p) ? 1 : 0;
      return hits;
    }
    const double n = static_cast<double>(trials);
    const auto mode = static_cast<std::uint64_t>(std::floor((n + 1.0) * p));
    const std::uint64_t m = std::min(mode, trials);
    const double md = static_cast<double>(m);
    const double odds = p / (1.0 - p);
    const double at_mode = std::exp(std::lgamma(n + 1.0) - std::lgamma(md + 1.0) -
                                    std::lgamma(n - md + 1.0) + md * std::log(p) +
                                    (n - md) * std::log1p(-p));
    const double u = uniform();
    double cumulative = at_mode;
    if (u < cumulative) return m;
    double up = at_mode, down = at_mode;
    std::uint64_t hi = m, lo = m;
    while (hi < trials || lo > 0) {
      if (hi < trials) {
        up *= odds * static_cast<double>(trials - hi) / static_cast<double>(hi + 1);
        ++hi;
        cumulative += up;
        if (u < cumulative) return hi;
      }
      if (lo > 0) {
        down *= static_cast<double>(lo) / (odds * static_cast<double>(trials - lo + 1));
        --lo;
        cumulative += down;
        if (u < cumulative) return lo;
      }
      if (up < 1e-300 && down < 1e-300) break;
    }
    return m;  // u fell into the rounding deficit of the total mass
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ptcb
