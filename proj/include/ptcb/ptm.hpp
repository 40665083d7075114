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
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ptcb/clifford.hpp"
#include "ptcb/pauli.hpp"

namespace ptcb {

using ComplexMatrix = Eigen::MatrixXcd;

/// Pauli transfer matrix Lambda_PQ = <<sigma_P | Lambda(sigma_Q)>> with
/// sigma_P = P / sqrt(d). Dense, row-major, d^2 x d^2, rows and columns in
/// the canonical Pauli order.
class TransferMatrix {
 public:
  TransferMatrix() = default;
  TransferMatrix(std::size_t n, std::vector<double> entries);

  static TransferMatrix identity(std::size_t n);
  static TransferMatrix zeros(std::size_t n);

  std::size_t qubits() const { return n_; }
  /// d^2, the side length.
  std::size_t dim() const { return dim_; }

  double operator()(std::size_t row, std::size_t col) const {
    return entries_[row * dim_ + col];
  }
  double& operator()(std::size_t row, std::size_t col) {
    return entries_[row * dim_ + col];
  }
  double at(const PauliString& row, const PauliString& col) const {
    return (*this)(row.index(), col.index());
  }

  std::span<const double> data() const { return entries_; }
  std::span<double> data() { return entries_; }

  TransferMatrix transpose() const;
  std::vector<double> diagonal() const;
  double max_abs_diff(const TransferMatrix& other) const;

  /// (I,I) = 1 and (I,P) = 0 for P != I.
  bool is_trace_preserving(double tol = 1e-12) const;
  /// (P,I) = 0 for P != I.
  bool is_unital(double tol = 1e-12) const;
  /// M^T M = identity.
  bool is_orthogonal(double tol = 1e-10) const;

  friend bool operator==(const TransferMatrix&, const TransferMatrix&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> entries_;
};

/// Coefficient vector over the normalized Pauli basis. StateTag vectors hold
/// <<sigma_P|rho>>; EffectTag vectors hold <<sigma_P|M>> and act as row
/// vectors <<M|.
template <typename Tag>
class PauliVector {
 public:
  PauliVector() = default;
  PauliVector(std::size_t n, std::vector<double> coeffs);

  std::size_t qubits() const { return n_; }
  std::size_t dim() const { return coeffs_.size(); }
  double operator[](std::size_t i) const { return coeffs_[i]; }
  double& operator[](std::size_t i) { return coeffs_[i]; }
  std::span<const double> coeffs() const { return coeffs_; }
  std::span<double> coeffs() { return coeffs_; }

  friend bool operator==(const PauliVector&, const PauliVector&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> coeffs_;
};

struct StateTag {};
struct EffectTag {};
using StateVectorPL = PauliVector<StateTag>;
using EffectPL = PauliVector<EffectTag>;

extern template class PauliVector<StateTag>;
extern template class PauliVector<EffectTag>;

/// Dense d x d matrix of a Pauli string (qubit 0 is the most significant
/// bit of the computational-basis index).
ComplexMatrix pauli_matrix(const PauliString& p);

/// Entry (P,Q) = tr(sigma_P^dag sum_i K_i sigma_Q K_i^dag). Requires
/// sum_i K_i^dag K_i = identity within 1e-10.
TransferMatrix ptm_from_kraus(std::span<const ComplexMatrix> kraus, std::size_t n);

/// Single-Kraus case. Requires u unitary within 1e-10.
TransferMatrix ptm_unitary(const ComplexMatrix& u, std::size_t n);

/// Diagonal +-1 matrix; entry Q is character_coefficient(p, Q).
TransferMatrix pauli_ptm(const PauliString& p);

/// Signed permutation with column P holding the sign of C P C^dag at row
/// index of C P C^dag.
TransferMatrix clifford_ptm(const CliffordTableau& t);

/// a * b, i.e. apply b first.
TransferMatrix compose(const TransferMatrix& a, const TransferMatrix& b);

/// Kronecker product; a acts on the leading (leftmost) qubits.
TransferMatrix tensor(const TransferMatrix& a, const TransferMatrix& b);
TransferMatrix tensor_power(const TransferMatrix& single, std::size_t copies);

/// F = tr(M) / d^2.
double process_fidelity(const TransferMatrix& m);
/// F_avg = (d F + 1) / (d + 1).
double average_fidelity(double process_fidelity, std::size_t n);
double average_fidelity(const TransferMatrix& m);

/// Keeps the diagonal, zeroes everything else.
TransferMatrix pauli_twirl(const TransferMatrix& m);

/// Rank-1 projector onto sigma_q.
TransferMatrix projector_matrix(const PauliString& q);

StateVectorPL apply(const TransferMatrix& m, const StateVectorPL& v);
/// <<M| m, returned as an effect.
EffectPL apply(const EffectPL& e, const TransferMatrix& m);
/// <<M|rho>>.
double overlap(const EffectPL& e, const StateVectorPL& v);
/// <<M| m |rho>>.
double expectation(const EffectPL& e, const TransferMatrix& m, const StateVectorPL& v);

StateVectorPL state_from_density(const ComplexMatrix& rho, std::size_t n);
EffectPL effect_from_operator(const ComplexMatrix& m, std::size_t n);
ComplexMatrix density_from_state(const StateVectorPL& v);

struct StateAndEffect {
  StateVectorPL state;
  EffectPL effect;
};

/// Product of +1 eigenstates of the letters of q (|0> on identity slots) and
/// the effect (I + q) / 2. q must be phase-free and non-identity.
StateAndEffect stabilizer_state_and_effect(const PauliString& q);

}  // namespace ptcb
