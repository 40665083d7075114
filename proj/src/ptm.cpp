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

#include "ptcb/ptm.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>

#include <fmt/format.h>

#include "ptcb/error.hpp"
#include "ptcb/kernels.hpp"

namespace ptcb {
namespace {

constexpr double kImagTolerance = 1e-12;
constexpr double kTraceTolerance = 1e-10;

std::size_t SideFor(std::size_t n) { return pauli_count(n); }

void CheckSameShape(const TransferMatrix& a, const TransferMatrix& b) {
  if (a.qubits() != b.qubits()) {
    throw DimensionError(fmt::format("transfer matrices act on {} and {} qubits",
                                     a.qubits(), b.qubits()));
  }
}

// Qubit k lives in computational-basis bit (n - 1 - k).
std::uint32_t BasisMask(std::uint32_t qubit_mask, std::size_t n) {
  std::uint32_t out = 0;
  for (std::size_t k = 0; k < n; ++k) {
    if ((qubit_mask >> k) & 1u) out |= 1u << (n - 1 - k);
  }
  return out;
}

const std::complex<double> kIPow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};

// Pauli as a monomial matrix: column b has a single entry coeff(b) at row
// b ^ flip.
struct Monomial {
  std::uint32_t flip;
  std::uint32_t zmask;
  int base_phase;
  std::complex<double> coeff(std::uint32_t col) const {
    const int minus = std::popcount(col & zmask) & 1;
    return kIPow[(base_phase + 2 * minus) & 3];
  }
};

Monomial ToMonomial(const PauliString& p) {
  const std::size_t n = p.size();
  const int y_count = std::popcount(p.x_bits() & p.z_bits());
  return Monomial{BasisMask(p.x_bits(), n), BasisMask(p.z_bits(), n),
                  (p.phase() + y_count) & 3};
}

}  // namespace

// --- TransferMatrix -------------------------------------------------------

TransferMatrix::TransferMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), dim_(SideFor(n)), entries_(std::move(entries)) {
  if (n == 0 || n > kMaxQubits) {
    throw ValidationError(fmt::format("qubit count {} unsupported", n));
  }
  if (entries_.size() != dim_ * dim_) {
    throw DimensionError(fmt::format("{} entries given for a {}x{} transfer matrix",
                                     entries_.size(), dim_, dim_));
  }
}

TransferMatrix TransferMatrix::zeros(std::size_t n) {
  const std::size_t side = SideFor(n);
  return TransferMatrix(n, std::vector<double>(side * side, 0.0));
}

TransferMatrix TransferMatrix::identity(std::size_t n) {
  TransferMatrix m = zeros(n);
  for (std::size_t i = 0; i < m.dim(); ++i) m(i, i) = 1.0;
  return m;
}

TransferMatrix TransferMatrix::transpose() const {
  TransferMatrix t = zeros(n_);
  for (std::size_t r = 0; r < dim_; ++r) {
    for (std::size_t c = 0; c < dim_; ++c) t(c, r) = (*this)(r, c);
  }
  return t;
}

std::vector<double> TransferMatrix::diagonal() const {
  std::vector<double> d(dim_);
  for (std::size_t i = 0; i < dim_; ++i) d[i] = (*this)(i, i);
  return d;
}

double TransferMatrix::max_abs_diff(const TransferMatrix& other) const {
  CheckSameShape(*this, other);
  double worst = 0.0;
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    worst = std::max(worst, std::abs(entries_[i] - other.entries_[i]));
  }
  return worst;
}

bool TransferMatrix::is_trace_preserving(double tol) const {
  if (std::abs((*this)(0, 0) - 1.0) > tol) return false;
  for (std::size_t c = 1; c < dim_; ++c) {
    if (std::abs((*this)(0, c)) > tol) return false;
  }
  return true;
}

bool TransferMatrix::is_unital(double tol) const {
  for (std::size_t r = 1; r < dim_; ++r) {
    if (std::abs((*this)(r, 0)) > tol) return false;
  }
  return true;
}

bool TransferMatrix::is_orthogonal(double tol) const {
  const TransferMatrix gram = compose(transpose(), *this);
  return gram.max_abs_diff(identity(n_)) <= tol;
}

// --- PauliVector ----------------------------------------------------------

template <typename Tag>
PauliVector<Tag>::PauliVector(std::size_t n, std::vector<double> coeffs)
    : n_(n), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != SideFor(n)) {
    throw DimensionError(fmt::format("{} coefficients given for {} qubits",
                                     coeffs_.size(), n));
  }
}

template class PauliVector<StateTag>;
template class PauliVector<EffectTag>;

// --- construction ---------------------------------------------------------

ComplexMatrix pauli_matrix(const PauliString& p) {
  const std::size_t d = std::size_t{1} << p.size();
  const Monomial mono = ToMonomial(p);
  ComplexMatrix m = ComplexMatrix::Zero(d, d);
  for (std::uint32_t col = 0; col < d; ++col) m(col ^ mono.flip, col) = mono.coeff(col);
  return m;
}

TransferMatrix ptm_from_kraus(std::span<const ComplexMatrix> kraus, std::size_t n) {
  if (kraus.empty()) throw ValidationError("empty Kraus set");
  const Eigen::Index d = Eigen::Index{1} << n;
  ComplexMatrix completeness = ComplexMatrix::Zero(d, d);
  for (const ComplexMatrix& k : kraus) {
    if (k.rows() != d || k.cols() != d) {
      throw DimensionError(fmt::format("Kraus operator is {}x{}, expected {}x{}",
                                       k.rows(), k.cols(), d, d));
    }
    completeness.noalias() += k.adjoint() * k;
  }
  const double tp_error = (completeness - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (tp_error > kTraceTolerance) {
    throw ValidationError(
        fmt::format("Kraus set is not trace preserving (deviation {:.3g})", tp_error));
  }

  TransferMatrix out = TransferMatrix::zeros(n);
  const std::size_t side = out.dim();
  const double inv_d = 1.0 / static_cast<double>(d);
  ComplexMatrix image(d, d);
  ComplexMatrix kq(d, d);
  for (std::size_t qi = 0; qi < side; ++qi) {
    const Monomial q = ToMonomial(PauliString::from_index(n, qi));
    image.setZero();
    for (const ComplexMatrix& k : kraus) {
      // (K Q)[:, c] = K[:, c ^ flip] * coeff(c)
      for (Eigen::Index c = 0; c < d; ++c) {
        kq.col(c) = k.col(c ^ q.flip) * q.coeff(static_cast<std::uint32_t>(c));
      }
      image.noalias() += kq * k.adjoint();
    }
    for (std::size_t pi = 0; pi < side; ++pi) {
      // tr(P^dag A) = sum_c conj(P[c ^ flip, c]) * A[c ^ flip, c]
      const Monomial p = ToMonomial(PauliString::from_index(n, pi));
      std::complex<double> tr = 0.0;
      for (std::uint32_t c = 0; c < static_cast<std::uint32_t>(d); ++c) {
        tr += std::conj(p.coeff(c)) * image(c ^ p.flip, c);
      }
      tr *= inv_d;
      if (std::abs(tr.imag()) > kImagTolerance) {
        throw NumericalError(fmt::format(
            "transfer matrix entry ({}, {}) has imaginary part {:.3g}", pi, qi, tr.imag()));
      }
      out(pi, qi) = tr.real();
    }
  }
  return out;
}

TransferMatrix ptm_unitary(const ComplexMatrix& u, std::size_t n) {
  const Eigen::Index d = Eigen::Index{1} << n;
  if (u.rows() != d || u.cols() != d) {
    throw DimensionError(fmt::format("unitary is {}x{}, expected {}x{}", u.rows(),
                                     u.cols(), d, d));
  }
  const double err = (u.adjoint() * u - ComplexMatrix::Identity(d, d)).cwiseAbs().maxCoeff();
  if (err > kTraceTolerance) {
    throw ValidationError(fmt::format("matrix is not unitary (deviation {:.3g})", err));
  }
  return ptm_from_kraus(std::span<const ComplexMatrix>(&u, 1), n);
}

TransferMatrix pauli_ptm(const PauliString& p) {
  const std::size_t n = p.size();
  TransferMatrix m = TransferMatrix::zeros(n);
  for (std::size_t i = 0; i < m.dim(); ++i) {
    m(i, i) = character_coefficient(p, PauliString::from_index(n, i));
  }
  return m;
}

TransferMatrix clifford_ptm(const CliffordTableau& t) {
  const std::size_t n = t.size();
  TransferMatrix m = TransferMatrix::zeros(n);
  for (std::size_t col = 0; col < m.dim(); ++col) {
    const PauliString image = t.conjugate(PauliString::from_index(n, col));
    m(image.index(), col) = image.sign();
  }
  return m;
}

TransferMatrix compose(const TransferMatrix& a, const TransferMatrix& b) {
  CheckSameShape(a, b);
  TransferMatrix c = TransferMatrix::zeros(a.qubits());
  kernels::active().matmul(a.data().data(), b.data().data(), c.data().data(), a.dim(),
                           a.dim(), a.dim());
  return c;
}

TransferMatrix tensor(const TransferMatrix& a, const TransferMatrix& b) {
  const std::size_t n = a.qubits() + b.qubits();
  TransferMatrix out = TransferMatrix::zeros(n);
  const std::size_t db = b.dim();
  for (std::size_t ar = 0; ar < a.dim(); ++ar) {
    for (std::size_t ac = 0; ac < a.dim(); ++ac) {
      const double s = a(ar, ac);
      if (s == 0.0) continue;
      for (std::size_t br = 0; br < db; ++br) {
        for (std::size_t bc = 0; bc < db; ++bc) {
          out(ar * db + br, ac * db + bc) = s * b(br, bc);
        }
      }
    }
  }
  return out;
}

TransferMatrix tensor_power(const TransferMatrix& single, std::size_t copies) {
  if (copies == 0) throw ValidationError("tensor power needs at least one copy");
  TransferMatrix out = single;
  for (std::size_t i = 1; i < copies; ++i) out = tensor(out, single);
  return out;
}

double process_fidelity(const TransferMatrix& m) {
  double tr = 0.0;
  for (std::size_t i = 0; i < m.dim(); ++i) tr += m(i, i);
  return tr / static_cast<double>(m.dim());
}

double average_fidelity(double process_fidelity, std::size_t n) {
  const double d = static_cast<double>(std::size_t{1} << n);
  return (d * process_fidelity + 1.0) / (d + 1.0);
}

double average_fidelity(const TransferMatrix& m) {
  return average_fidelity(process_fidelity(m), m.qubits());
}

TransferMatrix pauli_twirl(const TransferMatrix& m) {
  TransferMatrix out = TransferMatrix::zeros(m.qubits());
  for (std::size_t i = 0; i < m.dim(); ++i) out(i, i) = m(i, i);
  return out;
}

TransferMatrix projector_matrix(const PauliString& q) {
  if (q.phase() != 0) throw ValidationError("projector needs a phase-free Pauli");
  TransferMatrix m = TransferMatrix::zeros(q.size());
  m(q.index(), q.index()) = 1.0;
  return m;
}

StateVectorPL apply(const TransferMatrix& m, const StateVectorPL& v) {
  if (m.qubits() != v.qubits()) throw DimensionError("state and channel sizes differ");
  std::vector<double> out(v.dim());
  kernels::active().matvec(m.data().data(), v.coeffs().data(), out.data(), m.dim(),
                           m.dim());
  return StateVectorPL(v.qubits(), std::move(out));
}

EffectPL apply(const EffectPL& e, const TransferMatrix& m) {
  if (m.qubits() != e.qubits()) throw DimensionError("effect and channel sizes differ");
  std::vector<double> out(e.dim());
  kernels::active().vecmat(e.coeffs().data(), m.data().data(), out.data(), m.dim(),
                           m.dim());
  return EffectPL(e.qubits(), std::move(out));
}

double overlap(const EffectPL& e, const StateVectorPL& v) {
  if (e.qubits() != v.qubits()) throw DimensionError("effect and state sizes differ");
  return kernels::active().dot(e.coeffs().data(), v.coeffs().data(), v.dim());
}

double expectation(const EffectPL& e, const TransferMatrix& m, const StateVectorPL& v) {
  return overlap(e, apply(m, v));
}

namespace {

template <typename Vec>
Vec FromOperator(const ComplexMatrix& op, std::size_t n) {
  const Eigen::Index d = Eigen::Index{1} << n;
  if (op.rows() != d || op.cols() != d) throw DimensionError("operator has the wrong size");
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  std::vector<double> coeffs(pauli_count(n));
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const Monomial p = ToMonomial(PauliString::from_index(n, i));
    std::complex<double> tr = 0.0;
    for (std::uint32_t c = 0; c < static_cast<std::uint32_t>(d); ++c) {
      tr += std::conj(p.coeff(c)) * op(c ^ p.flip, c);
    }
    if (std::abs(tr.imag()) * norm > kImagTolerance) {
      throw NumericalError("operator is not Hermitian");
    }
    coeffs[i] = tr.real() * norm;
  }
  return Vec(n, std::move(coeffs));
}

}  // namespace

StateVectorPL state_from_density(const ComplexMatrix& rho, std::size_t n) {
  return FromOperator<StateVectorPL>(rho, n);
}

EffectPL effect_from_operator(const ComplexMatrix& m, std::size_t n) {
  return FromOperator<EffectPL>(m, n);
}

ComplexMatrix density_from_state(const StateVectorPL& v) {
  const std::size_t n = v.qubits();
  const Eigen::Index d = Eigen::Index{1} << n;
  const double norm = 1.0 / std::sqrt(static_cast<double>(d));
  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  for (std::size_t i = 0; i < v.dim(); ++i) {
    if (v[i] != 0.0) rho += (v[i] * norm) * pauli_matrix(PauliString::from_index(n, i));
  }
  return rho;
}

StateAndEffect stabilizer_state_and_effect(const PauliString& q) {
  if (q.phase() != 0) throw ValidationError("measured Pauli must be phase-free");
  if (q.is_identity()) {
    throw ValidationError("measured Pauli must be non-identity");
  }
  const std::size_t n = q.size();
  const std::size_t side = pauli_count(n);
  const double half_root = 1.0 / std::sqrt(2.0);

  // Per qubit: (I + sigma)/2 has coefficient 1/sqrt(2) on I and on sigma;
  // identity slots are prepared in |0> = (I + Z)/2.
  std::vector<double> state(side, 0.0);
  for (std::size_t idx = 0; idx < side; ++idx) {
    const PauliString term = PauliString::from_index(n, idx);
    double c = 1.0;
    for (std::size_t k = 0; k < n && c != 0.0; ++k) {
      const Letter want = q.letter(k) == Letter::I ? Letter::Z : q.letter(k);
      const Letter have = term.letter(k);
      c = (have == Letter::I || have == want) ? c * half_root : 0.0;
    }
    state[idx] = c;
  }

  std::vector<double> effect(side, 0.0);
  const double half_root_d = std::sqrt(static_cast<double>(std::size_t{1} << n)) / 2.0;
  effect[0] = half_root_d;
  effect[q.index()] = half_root_d;
  return {StateVectorPL(n, std::move(state)), EffectPL(n, std::move(effect))};
}

}  // namespace ptcb
