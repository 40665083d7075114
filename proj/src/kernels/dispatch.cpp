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

#include <atomic>
#include <cstdlib>

#include "tables.hpp"

namespace ptcb::kernels {
namespace {

bool CpuHasAvx2() {
#if defined(PTCB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* Lookup(std::string_view name) {
  if (name == "scalar") return &scalar_table();
  if (name == "avx2") return avx2_table();
  return nullptr;
}

const KernelTable* DefaultTable() {
  if (const char* env = std::getenv("PTCB_KERNELS")) {
    if (const KernelTable* forced = Lookup(env)) return forced;
  }
  if (const KernelTable* avx = avx2_table()) return avx;
  return &scalar_table();
}

std::atomic<const KernelTable*>& Slot() {
  static std::atomic<const KernelTable*> slot{DefaultTable()};
  return slot;
}

}  // namespace

const KernelTable& scalar_table() { return detail::kScalar; }

const KernelTable* avx2_table() {
#if defined(PTCB_HAVE_AVX2)
  static const bool ok = CpuHasAvx2();
  return ok ? &detail::kAvx2 : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() { return *Slot().load(std::memory_order_acquire); }

bool select(std::string_view name) {
  const KernelTable* table = Lookup(name);
  if (table == nullptr) return false;
  Slot().store(table, std::memory_order_release);
  return true;
}

std::vector<std::string> available() {
  std::vector<std::string> names{"scalar"};
  if (avx2_table() != nullptr) names.emplace_back("avx2");
  return names;
}

}  // namespace ptcb::kernels
