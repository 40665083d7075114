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

// Text formats: transfer-matrix dumps and the CSV tables written by the
// command-line runs. Reals are printed in shortest round-trip form, so every
// table is byte-stable for a given set of values.

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ptcb/crb.hpp"
#include "ptcb/protocol.hpp"
#include "ptcb/ptm.hpp"

namespace ptcb::io {

std::string format_real(double x);

std::string read_text(const std::filesystem::path& path);
/// Creates parent directories as needed.
void write_text(const std::filesystem::path& path, std::string_view content);

/// "n dim" on the first line, then dim rows of dim reals.
std::string ptm_to_text(const TransferMatrix& m);
TransferMatrix ptm_from_text(std::string_view text);
TransferMatrix read_ptm(const std::filesystem::path& path);
void write_ptm(const std::filesystem::path& path, const TransferMatrix& m);

/// "X:+ZI +IX;Z:+XI +ZZ": images of the X and Z generators.
std::string tableau_text(const CliffordTableau& t);

/// Paulis of one sequence joined by spaces.
std::string join_paulis(std::span<const PauliString> paulis);

/// pair,p,q,m,paulis,lambda,probability
std::string records_csv(std::span<const SurvivalRecord> records,
                        std::span<const PairEstimate> pairs);
/// One row per pair; depth-wise g values as "m:g" separated by ';'.
std::string pairs_csv(std::span<const PairEstimate> pairs,
                      std::span<const SampledPair> sampled = {});
/// q_index,q,m,paulis,lambda,probability
std::string crb_records_csv(std::span<const CrbRecord> records,
                            std::span<const EigenvalueEstimate> eigenvalues);
std::string eigenvalues_csv(std::span<const EigenvalueEstimate> eigenvalues);

/// Minimal reader for the tables above: header names and string cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(std::string_view name) const;
};
CsvTable parse_csv(std::string_view text);

}  // namespace ptcb::io
