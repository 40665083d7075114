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

#include <cstddef>
#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace ptcb {

/// Single-qubit Pauli letters, numbered in the canonical enumeration order.
enum class Letter : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

inline constexpr std::size_t kMaxQubits = 8;

/// An n-qubit Pauli operator i^phase * (P_0 (x) P_1 (x) ... (x) P_{n-1}),
/// with Y the Hermitian Pauli Y. Qubit 0 is the leftmost letter.
///
/// Each qubit is stored as an (x, z) bit pair: I=(0,0), X=(1,0), Y=(1,1),
/// Z=(0,1). The canonical index of the letter string reads the letters as
/// base-4 digits (I<X<Y<Z), qubit 0 most significant; it is the row/column
/// index used by every transfer matrix.
class PauliString {
 public:
  PauliString() = default;

  /// Identity on n qubits.
  explicit PauliString(std::size_t n);

  /// Letters only ("XIZ"), no phase prefix.
  static PauliString from_letters(std::string_view letters);

  /// Text form: optional "+", "-", "+i" or "-i" followed by the letters.
  static PauliString parse(std::string_view text);

  /// Inverse of index(); the result is phase-free.
  static PauliString from_index(std::size_t n, std::size_t index);

  std::size_t size() const { return n_; }
  std::size_t index() const;

  Letter letter(std::size_t qubit) const;
  void set_letter(std::size_t qubit, Letter l);

  /// Phase exponent k in i^k, k in {0, 1, 2, 3}.
  int phase() const { return phase_; }
  PauliString with_phase(int k) const;
  PauliString phase_free() const { return with_phase(0); }

  /// +1 or -1 for Hermitian strings. Throws if the phase is +-i.
  int sign() const;

  bool is_identity() const { return (x_ | z_) == 0; }
  std::size_t weight() const;

  std::uint32_t x_bits() const { return x_; }
  std::uint32_t z_bits() const { return z_; }

  /// Builds from raw bit masks (bit k <-> qubit k).
  static PauliString from_bits(std::size_t n, std::uint32_t x, std::uint32_t z,
                               int phase = 0);

  std::string letters() const;
  std::string str() const;

  friend bool operator==(const PauliString& a, const PauliString& b) {
    return a.n_ == b.n_ && a.x_ == b.x_ && a.z_ == b.z_ && a.phase_ == b.phase_;
  }

 private:
  std::uint8_t n_ = 0;
  std::uint8_t phase_ = 0;
  std::uint32_t x_ = 0;
  std::uint32_t z_ = 0;
};

/// Group product a*b with the accumulated i^k structure phase.
PauliString multiply(const PauliString& a, const PauliString& b);
inline PauliString operator*(const PauliString& a, const PauliString& b) {
  return multiply(a, b);
}

/// True iff ab = ba (symplectic inner product is even).
bool commutes(const PauliString& a, const PauliString& b);

/// +1 if p commutes with q, else -1. These are the signs lambda_P with
/// (1/d^2) sum_P lambda_P * PTM(P) = projector onto sigma_Q.
int character_coefficient(const PauliString& p, const PauliString& q);

/// 4^n.
std::size_t pauli_count(std::size_t n);

std::ostream& operator<<(std::ostream& os, const PauliString& p);

}  // namespace ptcb

template <>
struct std::hash<ptcb::PauliString> {
  std::size_t operator()(const ptcb::PauliString& p) const noexcept {
    return (static_cast<std::size_t>(p.x_bits()) << 32) ^
           (static_cast<std::size_t>(p.z_bits()) << 4) ^
           static_cast<std::size_t>(p.phase()) ^ (p.size() << 60);
  }
};
