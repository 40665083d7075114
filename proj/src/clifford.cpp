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

#include "ptcb/clifford.hpp"

#include <array>
#include <cstdint>
#include <utility>

#include <fmt/format.h>

#include "ptcb/error.hpp"

namespace ptcb {
namespace {

PauliString SingleQubit(std::size_t n, std::size_t qubit, Letter l) {
  PauliString p(n);
  p.set_letter(qubit, l);
  return p;
}

void CheckQubit(std::size_t n, std::size_t qubit) {
  if (qubit >= n) {
    throw DimensionError(fmt::format("qubit {} out of range for {} qubits", qubit, n));
  }
}

// Gauss-Jordan inversion over GF(2). Row r of `rows` is a bitmask over
// columns; returns the inverse in the same layout.
std::vector<std::uint32_t> InvertGf2(std::vector<std::uint32_t> rows) {
  const std::size_t m = rows.size();
  std::vector<std::uint32_t> inv(m);
  for (std::size_t r = 0; r < m; ++r) inv[r] = 1u << r;
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t pivot = col;
    while (pivot < m && ((rows[pivot] >> col) & 1u) == 0) ++pivot;
    if (pivot == m) throw ValidationError("Clifford tableau is singular");
    std::swap(rows[pivot], rows[col]);
    std::swap(inv[pivot], inv[col]);
    for (std::size_t r = 0; r < m; ++r) {
      if (r != col && ((rows[r] >> col) & 1u) != 0) {
        rows[r] ^= rows[col];
        inv[r] ^= inv[col];
      }
    }
  }
  return inv;
}

}  // namespace

CliffordTableau::CliffordTableau(std::size_t n) {
  PauliString probe(n);  // validates n
  x_images_.reserve(n);
  z_images_.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    x_images_.push_back(SingleQubit(n, k, Letter::X));
    z_images_.push_back(SingleQubit(n, k, Letter::Z));
  }
}

CliffordTableau::CliffordTableau(std::vector<PauliString> x_images,
                                 std::vector<PauliString> z_images)
    : x_images_(std::move(x_images)), z_images_(std::move(z_images)) {
  const std::size_t n = x_images_.size();
  if (n == 0 || z_images_.size() != n) {
    throw DimensionError("tableau needs n X-images and n Z-images");
  }
  for (std::size_t k = 0; k < n; ++k) {
    if (x_images_[k].size() != n || z_images_[k].size() != n) {
      throw DimensionError("tableau image has the wrong qubit count");
    }
    if (x_images_[k].phase() % 2 != 0 || z_images_[k].phase() % 2 != 0) {
      throw ValidationError("tableau images must be Hermitian (phase +-1)");
    }
  }
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = 0; b < n; ++b) {
      const bool xz_should_commute = a != b;
      if (commutes(x_images_[a], z_images_[b]) != xz_should_commute ||
          (a != b && (!commutes(x_images_[a], x_images_[b]) ||
                      !commutes(z_images_[a], z_images_[b])))) {
        throw ValidationError("tableau images violate the symplectic condition");
      }
    }
  }
}

CliffordTableau CliffordTableau::hadamard(std::size_t n, std::size_t qubit) {
  CliffordTableau t(n);
  CheckQubit(n, qubit);
  std::swap(t.x_images_[qubit], t.z_images_[qubit]);
  return t;
}

CliffordTableau CliffordTableau::phase(std::size_t n, std::size_t qubit) {
  CliffordTableau t(n);
  CheckQubit(n, qubit);
  t.x_images_[qubit] = SingleQubit(n, qubit, Letter::Y);
  return t;
}

CliffordTableau CliffordTableau::phase_dagger(std::size_t n, std::size_t qubit) {
  CliffordTableau t(n);
  CheckQubit(n, qubit);
  t.x_images_[qubit] = SingleQubit(n, qubit, Letter::Y).with_phase(2);
  return t;
}

CliffordTableau CliffordTableau::cnot(std::size_t n, std::size_t control,
                                      std::size_t target) {
  CliffordTableau t(n);
  CheckQubit(n, control);
  CheckQubit(n, target);
  if (control == target) throw ValidationError("CNOT control equals target");
  // X_c -> X_c X_t, Z_t -> Z_c Z_t.
  t.x_images_[control].set_letter(target, Letter::X);
  t.z_images_[target].set_letter(control, Letter::Z);
  return t;
}

PauliString CliffordTableau::conjugate(const PauliString& p) const {
  const std::size_t n = size();
  if (p.size() != n) {
    throw DimensionError(
        fmt::format("tableau on {} qubits applied to {}-qubit Pauli", n, p.size()));
  }
  // Y = i X Z, so p = i^(phase + #Y) * prod_k X_k^x_k Z_k^z_k.
  int phase = p.phase();
  PauliString out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const bool x = ((p.x_bits() >> k) & 1u) != 0;
    const bool z = ((p.z_bits() >> k) & 1u) != 0;
    if (x && z) phase += 1;
    if (x) out = out * x_images_[k];
    if (z) out = out * z_images_[k];
  }
  return out.with_phase(out.phase() + phase);
}

CliffordTableau CliffordTableau::then(const CliffordTableau& next) const {
  if (next.size() != size()) throw DimensionError("composing tableaux of different sizes");
  CliffordTableau out = *this;
  for (std::size_t k = 0; k < size(); ++k) {
    out.x_images_[k] = next.conjugate(x_images_[k]);
    out.z_images_[k] = next.conjugate(z_images_[k]);
  }
  return out;
}

CliffordTableau CliffordTableau::inverse() const {
  const std::size_t n = size();
  const std::size_t m = 2 * n;
  // Column j of the symplectic matrix is the (x | z) bit vector of the image
  // of generator j (X_0..X_{n-1}, Z_0..Z_{n-1}). Build it row-wise.
  auto image = [&](std::size_t j) -> const PauliString& {
    return j < n ? x_images_[j] : z_images_[j - n];
  };
  std::vector<std::uint32_t> rows(m, 0);
  for (std::size_t j = 0; j < m; ++j) {
    const std::uint32_t bits = image(j).x_bits() | (image(j).z_bits() << n);
    for (std::size_t r = 0; r < m; ++r) {
      if ((bits >> r) & 1u) rows[r] |= 1u << j;
    }
  }
  const std::vector<std::uint32_t> inv = InvertGf2(std::move(rows));

  CliffordTableau out(n);
  for (std::size_t g = 0; g < m; ++g) {
    // Preimage bits of generator g: column g of the inverse.
    std::uint32_t pre = 0;
    for (std::size_t r = 0; r < m; ++r) {
      if ((inv[r] >> g) & 1u) pre |= 1u << r;
    }
    const std::uint32_t mask = (1u << n) - 1u;
    const PauliString candidate = PauliString::from_bits(n, pre & mask, pre >> n);
    const PauliString generator =
        g < n ? SingleQubit(n, g, Letter::X) : SingleQubit(n, g - n, Letter::Z);
    const PauliString forward = conjugate(candidate);
    if (forward.phase_free() != generator) {
      throw NumericalError("tableau inversion produced an inconsistent preimage");
    }
    const PauliString signed_pre = candidate.with_phase(forward.phase());
    if (g < n) {
      out.x_images_[g] = signed_pre;
    } else {
      out.z_images_[g - n] = signed_pre;
    }
  }
  return out;
}

namespace {

// Clifford taking the phase-free, non-identity p to +-Z on qubit 0.
CliffordTableau ReduceToZ0(const PauliString& p) {
  const std::size_t n = p.size();
  CliffordTableau t(n);
  std::vector<std::size_t> support;
  for (std::size_t k = 0; k < n; ++k) {
    switch (p.letter(k)) {
      case Letter::I: continue;
      case Letter::X: t = t.then(CliffordTableau::hadamard(n, k)); break;
      case Letter::Y:
        t = t.then(CliffordTableau::phase(n, k)).then(CliffordTableau::hadamard(n, k));
        break;
      case Letter::Z: break;
    }
    support.push_back(k);
  }
  const std::size_t pivot = support.front();
  for (std::size_t i = 1; i < support.size(); ++i) {
    t = t.then(CliffordTableau::cnot(n, support[i], pivot));
  }
  if (pivot != 0) {
    t = t.then(CliffordTableau::cnot(n, 0, pivot)).then(CliffordTableau::cnot(n, pivot, 0));
  }
  return t;
}

void CheckMappable(const PauliString& p, const char* which) {
  if (p.is_identity()) {
    throw ValidationError(fmt::format("{} must be a non-identity Pauli", which));
  }
  if (p.phase() != 0) {
    throw ValidationError(fmt::format("{} must be phase-free", which));
  }
}

}  // namespace

CliffordMapping find_clifford_mapping(const PauliString& p, const PauliString& q) {
  if (p.size() != q.size()) {
    throw DimensionError(
        fmt::format("cannot map {}-qubit Pauli to {}-qubit Pauli", p.size(), q.size()));
  }
  CheckMappable(p, "source Pauli");
  CheckMappable(q, "target Pauli");
  CliffordMapping mapping;
  mapping.tableau = ReduceToZ0(p).then(ReduceToZ0(q).inverse());
  const PauliString image = mapping.tableau.conjugate(p);
  if (image.phase_free() != q) {
    throw NumericalError(fmt::format("Clifford search mapped {} to {}, expected +-{}",
                                     p.str(), image.str(), q.str()));
  }
  mapping.sign = image.sign();
  return mapping;
}

}  // namespace ptcb
