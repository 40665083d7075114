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

#include "ptcb/pauli.hpp"

#include <bit>

#include <fmt/format.h>

#include "ptcb/error.hpp"

namespace ptcb {
namespace {

void CheckQubitCount(std::size_t n) {
  if (n == 0 || n > kMaxQubits) {
    throw ValidationError(
        fmt::format("qubit count {} outside supported range [1, {}]", n, kMaxQubits));
  }
}

void CheckSameSize(const PauliString& a, const PauliString& b) {
  if (a.size() != b.size()) {
    throw DimensionError(fmt::format("Pauli strings act on {} and {} qubits",
                                     a.size(), b.size()));
  }
}

// Exponent g such that letter(x1,z1) * letter(x2,z2) = i^g letter(x1^x2, z1^z2).
int ProductPhase(unsigned x1, unsigned z1, unsigned x2, unsigned z2) {
  const int x2i = static_cast<int>(x2);
  const int z2i = static_cast<int>(z2);
  if (x1 == 0 && z1 == 0) return 0;
  if (x1 == 1 && z1 == 1) return z2i - x2i;
  if (x1 == 1) return z2i * (2 * x2i - 1);
  return x2i * (1 - 2 * z2i);
}

}  // namespace

PauliString::PauliString(std::size_t n) {
  CheckQubitCount(n);
  n_ = static_cast<std::uint8_t>(n);
}

PauliString PauliString::from_bits(std::size_t n, std::uint32_t x, std::uint32_t z,
                                   int phase) {
  PauliString p(n);
  const std::uint32_t mask = (1u << n) - 1u;
  if ((x & ~mask) != 0 || (z & ~mask) != 0) {
    throw DimensionError("Pauli bit mask exceeds qubit count");
  }
  p.x_ = x;
  p.z_ = z;
  p.phase_ = static_cast<std::uint8_t>(((phase % 4) + 4) % 4);
  return p;
}

PauliString PauliString::from_letters(std::string_view letters) {
  PauliString p(letters.size());
  for (std::size_t k = 0; k < letters.size(); ++k) {
    switch (letters[k]) {
      case 'I': break;
      case 'X': p.set_letter(k, Letter::X); break;
      case 'Y': p.set_letter(k, Letter::Y); break;
      case 'Z': p.set_letter(k, Letter::Z); break;
      default:
        throw ValidationError(
            fmt::format("invalid Pauli letter '{}' in \"{}\"", letters[k], letters));
    }
  }
  return p;
}

PauliString PauliString::parse(std::string_view text) {
  int phase = 0;
  if (text.starts_with("+i")) {
    phase = 1;
    text.remove_prefix(2);
  } else if (text.starts_with("-i")) {
    phase = 3;
    text.remove_prefix(2);
  } else if (text.starts_with('+')) {
    text.remove_prefix(1);
  } else if (text.starts_with('-')) {
    phase = 2;
    text.remove_prefix(1);
  }
  return from_letters(text).with_phase(phase);
}

PauliString PauliString::from_index(std::size_t n, std::size_t index) {
  PauliString p(n);
  if (index >= pauli_count(n)) {
    throw ValidationError(fmt::format("Pauli index {} out of range for {} qubits", index, n));
  }
  for (std::size_t k = n; k-- > 0;) {
    p.set_letter(k, static_cast<Letter>(index & 3u));
    index >>= 2;
  }
  return p;
}

std::size_t PauliString::index() const {
  std::size_t idx = 0;
  for (std::size_t k = 0; k < n_; ++k) {
    idx = (idx << 2) | static_cast<std::size_t>(letter(k));
  }
  return idx;
}

Letter PauliString::letter(std::size_t qubit) const {
  const unsigned x = (x_ >> qubit) & 1u;
  const unsigned z = (z_ >> qubit) & 1u;
  if (x == 0) return z == 0 ? Letter::I : Letter::Z;
  return z == 0 ? Letter::X : Letter::Y;
}

void PauliString::set_letter(std::size_t qubit, Letter l) {
  if (qubit >= n_) throw DimensionError("qubit index out of range");
  const std::uint32_t bit = 1u << qubit;
  x_ &= ~bit;
  z_ &= ~bit;
  if (l == Letter::X || l == Letter::Y) x_ |= bit;
  if (l == Letter::Z || l == Letter::Y) z_ |= bit;
}

PauliString PauliString::with_phase(int k) const {
  PauliString p = *this;
  p.phase_ = static_cast<std::uint8_t>(((k % 4) + 4) % 4);
  return p;
}

int PauliString::sign() const {
  if (phase_ == 0) return 1;
  if (phase_ == 2) return -1;
  throw NumericalError(fmt::format("Pauli string {} is not Hermitian", str()));
}

std::size_t PauliString::weight() const {
  return static_cast<std::size_t>(std::popcount(x_ | z_));
}

std::string PauliString::letters() const {
  static constexpr char kChars[] = {'I', 'X', 'Y', 'Z'};
  std::string s(n_, 'I');
  for (std::size_t k = 0; k < n_; ++k) s[k] = kChars[static_cast<int>(letter(k))];
  return s;
}

std::string PauliString::str() const {
  static constexpr const char* kPrefix[] = {"", "+i", "-", "-i"};
  return kPrefix[phase_] + letters();
}

PauliString multiply(const PauliString& a, const PauliString& b) {
  CheckSameSize(a, b);
  int phase = a.phase() + b.phase();
  for (std::size_t k = 0; k < a.size(); ++k) {
    phase += ProductPhase((a.x_bits() >> k) & 1u, (a.z_bits() >> k) & 1u,
                          (b.x_bits() >> k) & 1u, (b.z_bits() >> k) & 1u);
  }
  return PauliString::from_bits(a.size(), a.x_bits() ^ b.x_bits(),
                                a.z_bits() ^ b.z_bits(), phase);
}

bool commutes(const PauliString& a, const PauliString& b) {
  CheckSameSize(a, b);
  const std::uint32_t anti = (a.x_bits() & b.z_bits()) ^ (a.z_bits() & b.x_bits());
  return std::popcount(anti) % 2 == 0;
}

int character_coefficient(const PauliString& p, const PauliString& q) {
  return commutes(p, q) ? 1 : -1;
}

std::size_t pauli_count(std::size_t n) { return std::size_t{1} << (2 * n); }

std::ostream& operator<<(std::ostream& os, const PauliString& p) {
  return os << p.str();
}

}  // namespace ptcb
