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
#include <vector>

#include "ptcb/pauli.hpp"

namespace ptcb {

/// Clifford unitary C stored by its action on the Pauli generators:
/// x_image(k) = C X_k C^dag and z_image(k) = C Z_k C^dag, each a Hermitian
/// Pauli string with sign +-1.
class CliffordTableau {
 public:
  CliffordTableau() = default;

  /// Identity on n qubits.
  explicit CliffordTableau(std::size_t n);

  /// Validates that the images are Hermitian and satisfy the symplectic
  /// commutation relations.
  CliffordTableau(std::vector<PauliString> x_images, std::vector<PauliString> z_images);

  static CliffordTableau hadamard(std::size_t n, std::size_t qubit);
  static CliffordTableau phase(std::size_t n, std::size_t qubit);
  static CliffordTableau phase_dagger(std::size_t n, std::size_t qubit);
  static CliffordTableau cnot(std::size_t n, std::size_t control, std::size_t target);

  std::size_t size() const { return x_images_.size(); }
  const PauliString& x_image(std::size_t k) const { return x_images_.at(k); }
  const PauliString& z_image(std::size_t k) const { return z_images_.at(k); }

  /// C p C^dag by linear extension from the generator images.
  PauliString conjugate(const PauliString& p) const;

  /// The Clifford "apply this, then next".
  CliffordTableau then(const CliffordTableau& next) const;

  CliffordTableau inverse() const;

  friend bool operator==(const CliffordTableau&, const CliffordTableau&) = default;

 private:
  std::vector<PauliString> x_images_;
  std::vector<PauliString> z_images_;
};

inline PauliString conjugate(const CliffordTableau& t, const PauliString& p) {
  return t.conjugate(p);
}

/// A Clifford with C p C^dag = sign * q.
struct CliffordMapping {
  CliffordTableau tableau;
  int sign = 1;
};

/// Deterministic construction: each side is reduced to Z on qubit 0 with
/// single-qubit H/S moves and a CNOT chain, then one reduction is composed
/// with the inverse of the other. Both inputs must be non-identity and
/// phase-free.
CliffordMapping find_clifford_mapping(const PauliString& p, const PauliString& q);

}  // namespace ptcb
