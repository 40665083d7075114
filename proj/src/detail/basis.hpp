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

#include <bit>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "ptcb/pauli.hpp"

namespace ptcb::detail {

// x/z bit masks of every basis Pauli, indexed canonically.
struct Basis {
  std::vector<std::uint32_t> x;
  std::vector<std::uint32_t> z;

  explicit Basis(std::size_t n) {
    const std::size_t count = pauli_count(n);
    x.resize(count);
    z.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
      const PauliString p = PauliString::from_index(n, i);
      x[i] = p.x_bits();
      z[i] = p.z_bits();
    }
  }
  std::size_t size() const { return x.size(); }
  int character(const PauliString& p, std::size_t r) const {
    return (std::popcount((p.x_bits() & z[r]) ^ (p.z_bits() & x[r])) & 1) ? -1 : 1;
  }
  void apply(const PauliString& p, std::vector<double>& v) const {
    for (std::size_t r = 0; r < v.size(); ++r) {
      if (character(p, r) < 0) v[r] = -v[r];
    }
  }
};

inline std::size_t saturating_pow(std::size_t base, std::size_t exp) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < exp; ++i) {
    if (r > std::numeric_limits<std::size_t>::max() / base) {
      return std::numeric_limits<std::size_t>::max();
    }
    r *= base;
  }
  return r;
}

inline constexpr std::size_t kMaxEnumeratedTuples = std::size_t{1} << 26;

}  // namespace ptcb::detail
