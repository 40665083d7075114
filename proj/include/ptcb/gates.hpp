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

#include "ptcb/ptm.hpp"

namespace ptcb::gates {

// Dense unitaries in the computational basis, qubit 0 most significant.

ComplexMatrix identity(std::size_t n);
/// Controls on qubits 0 and 1, target qubit 2.
ComplexMatrix toffoli();
ComplexMatrix ccz();
ComplexMatrix hadamard();
ComplexMatrix phase();
/// Two-qubit CNOT, control qubit 0.
ComplexMatrix cnot();

/// Embeds a single-qubit unitary on `qubit` of an n-qubit register.
ComplexMatrix on_qubit(const ComplexMatrix& single, std::size_t qubit, std::size_t n);

}  // namespace ptcb::gates
