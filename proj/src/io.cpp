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

#include "ptcb/io.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "ptcb/error.hpp"

namespace ptcb::io {
namespace {

std::string Clean(std::string_view text) {
  std::string out(text);
  for (char& c : out) {
    if (c == ',') c = ';';
    if (c == '\n' || c == '\r') c = ' ';
  }
  return out;
}

std::string GValues(const PairEstimate& e) {
  std::string out;
  for (std::size_t i = 0; i < e.depths.size(); ++i) {
    if (i) out += ';';
    out += fmt::format("{}:{}", e.depths[i], format_real(e.g[i]));
  }
  return out;
}

}  // namespace

std::string format_real(double x) { return fmt::format("{}", x); }

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(fmt::format("cannot write {}", path.string()));
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(fmt::format("failed writing {}", path.string()));
}

std::string ptm_to_text(const TransferMatrix& m) {
  std::string out = fmt::format("{} {}\n", m.qubits(), m.dim());
  for (std::size_t r = 0; r < m.dim(); ++r) {
    for (std::size_t c = 0; c < m.dim(); ++c) {
      if (c) out += ' ';
      out += format_real(m(r, c));
    }
    out += '\n';
  }
  return out;
}

TransferMatrix ptm_from_text(std::string_view text) {
  std::size_t pos = 0;
  auto next_token = [&]() -> std::string_view {
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    const std::size_t start = pos;
    while (pos < text.size() && !std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    return text.substr(start, pos - start);
  };
  auto parse_size = [](std::string_view tok) {
    std::size_t v = 0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size()) {
      throw ValidationError(fmt::format("bad PTM header token '{}'", tok));
    }
    return v;
  };
  const std::size_t n = parse_size(next_token());
  const std::size_t dim = parse_size(next_token());
  if (n < 1 || n > kMaxQubits || dim != pauli_count(n)) {
    throw DimensionError(fmt::format("PTM header '{} {}' is inconsistent", n, dim));
  }
  std::vector<double> entries(dim * dim);
  for (double& e : entries) {
    const std::string_view tok = next_token();
    if (tok.empty()) throw DimensionError("PTM file has too few entries");
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), e);
    if (ec != std::errc() || p != tok.data() + tok.size()) {
      throw ValidationError(fmt::format("bad PTM entry '{}'", tok));
    }
  }
  if (!next_token().empty()) throw DimensionError("PTM file has too many entries");
  return TransferMatrix(n, std::move(entries));
}

TransferMatrix read_ptm(const std::filesystem::path& path) {
  return ptm_from_text(read_text(path));
}

void write_ptm(const std::filesystem::path& path, const TransferMatrix& m) {
  write_text(path, ptm_to_text(m));
}

std::string tableau_text(const CliffordTableau& t) {
  std::string x, z;
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k) {
      x += ' ';
      z += ' ';
    }
    x += (t.x_image(k).sign() < 0 ? "-" : "+") + t.x_image(k).letters();
    z += (t.z_image(k).sign() < 0 ? "-" : "+") + t.z_image(k).letters();
  }
  return "X:" + x + ";Z:" + z;
}

std::string join_paulis(std::span<const PauliString> paulis) {
  std::string out;
  for (std::size_t i = 0; i < paulis.size(); ++i) {
    if (i) out += ' ';
    out += paulis[i].letters();
  }
  return out;
}

std::string records_csv(std::span<const SurvivalRecord> records,
                        std::span<const PairEstimate> pairs) {
  std::string out = "pair,p,q,m,paulis,lambda,probability\n";
  for (const auto& r : records) {
    const PairEstimate& e = pairs[r.pair_index];
    out += fmt::format("{},{},{},{},{},{},{}\n", r.pair_index, e.p.letters(), e.q.letters(),
                       r.depth, join_paulis(r.paulis), r.lambda, format_real(r.probability));
  }
  return out;
}

std::string pairs_csv(std::span<const PairEstimate> pairs,
                      std::span<const SampledPair> sampled) {
  std::string out =
      "pair,p,q,segment,weight,clifford,clifford_sign,ideal_entry,g0,g1,g_values,product,"
      "exact_product,status\n";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const PairEstimate& e = pairs[i];
    const std::string segment = i < sampled.size() ? fmt::format("{}", sampled[i].segment) : "";
    const std::string weight = i < sampled.size() ? format_real(sampled[i].weight) : "";
    const std::string clifford = e.clifford.size() ? tableau_text(e.clifford) : "";
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", i, e.p.letters(),
                       e.q.letters(), segment, weight, clifford, e.clifford_sign,
                       format_real(e.ideal_entry), format_real(e.g0), format_real(e.g1),
                       GValues(e), format_real(e.product), format_real(e.exact_product),
                       e.failed ? Clean("failed: " + e.error) : "ok");
  }
  return out;
}

std::string crb_records_csv(std::span<const CrbRecord> records,
                            std::span<const EigenvalueEstimate> eigenvalues) {
  std::string out = "q_index,q,m,paulis,lambda,probability\n";
  for (const auto& r : records) {
    out += fmt::format("{},{},{},{},{},{}\n", r.q_index, eigenvalues[r.q_index].q.letters(),
                       r.depth, join_paulis(r.paulis), r.lambda, format_real(r.probability));
  }
  return out;
}

std::string eigenvalues_csv(std::span<const EigenvalueEstimate> eigenvalues) {
  std::string out = "q_index,q,eigenvalue,exact,prefactor,fit_residual,f_values,status\n";
  for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
    const auto& e = eigenvalues[i];
    std::string f;
    for (std::size_t k = 0; k < e.depths.size() && k < e.f.size(); ++k) {
      if (k) f += ';';
      f += fmt::format("{}:{}", e.depths[k], format_real(e.f[k]));
    }
    out += fmt::format("{},{},{},{},{},{},{},{}\n", i, e.q.letters(),
                       format_real(e.eigenvalue), format_real(e.exact),
                       format_real(e.prefactor), format_real(e.fit_residual), f,
                       e.failed ? Clean("failed: " + e.error) : "ok");
  }
  return out;
}

std::size_t CsvTable::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ValidationError(fmt::format("table has no column '{}'", name));
}

CsvTable parse_csv(std::string_view text) {
  CsvTable table;
  auto split = [](std::string_view line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      cells.emplace_back(line.substr(start, comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    return cells;
  };
  std::size_t pos = 0;
  bool first = true;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    pos = end + 1;
    if (line.empty()) continue;
    auto cells = split(line);
    if (first) {
      table.header = std::move(cells);
      first = false;
    } else {
      if (cells.size() != table.header.size()) {
        throw ValidationError(fmt::format("row has {} cells, header has {}", cells.size(),
                                          table.header.size()));
      }
      table.rows.push_back(std::move(cells));
    }
  }
  return table;
}

}  // namespace ptcb::io
