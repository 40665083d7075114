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

#include "ptcb/gates.hpp"

#include <cmath>
#include <complex>

#include "ptcb/error.hpp"

namespace ptcb::gates {

ComplexMatrix identity(std::size_t n) {
  const Eigen::Index d = Eigen::Index{1} << n;
  return ComplexMatrix::Identity(d, d);
}

ComplexMatrix toffoli() {
  ComplexMatrix u = identity(3);
  u(6, 6) = 0.0;
  u(7, 7) = 0.0;
  u(6, 7) = 1.0;
  u(7, 6) = 1.0;
  return u;
}

ComplexMatrix ccz() {
  ComplexMatrix u = identity(3);
  u(7, 7) = -1.0;
  return u;
}

ComplexMatrix hadamard() {
  const double h = 1.0 / std::sqrt(2.0);
  ComplexMatrix u(2, 2);
  u << h, h, h, -h;
  return u;
}

ComplexMatrix phase() {
  ComplexMatrix u = identity(1);
  u(1, 1) = std::complex<double>(0.0, 1.0);
  return u;
}

ComplexMatrix cnot() {
  ComplexMatrix u = identity(2);
  u(2, 2) = 0.0;
  u(3, 3) = 0.0;
  u(2, 3) = 1.0;
  u(3, 2) = 1.0;
  return u;
}

ComplexMatrix on_qubit(const ComplexMatrix& single, std::size_t qubit, std::size_t n) {
  if (qubit >= n) throw DimensionError("qubit index out of range");
  if (single.rows() != 2 || single.cols() != 2) throw DimensionError("expected a 2x2 gate");
  const Eigen::Index d = Eigen::Index{1} << n;
  const Eigen::Index bit = Eigen::Index{1} << (n - 1 - qubit);
  ComplexMatrix u = ComplexMatrix::Zero(d, d);
  for (Eigen::Index col = 0; col < d; ++col) {
    const Eigen::Index b = (col & bit) ? 1 : 0;
    const Eigen::Index base = col & ~bit;
    u(base, col) = single(0, b);
    u(base | bit, col) = single(1, b);
  }
  return u;
}

}  // namespace ptcb::gates
