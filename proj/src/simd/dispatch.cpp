/*
 * Copyright 2026 The qpu-time Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <atomic>

#include "qpt/errors.hpp"
#include "qpt/simd/kernels.hpp"

namespace qpt::simd {

namespace {

const KernelTable* best_table() noexcept {
#if defined(QPT_BUILD_AVX2)
  if (isa_supported(Isa::avx2)) return &avx2_kernels();
#endif
  return &scalar_kernels();
}

std::atomic<const KernelTable*>& active_slot() noexcept {
  static std::atomic<const KernelTable*> slot{best_table()};
  return slot;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  return isa == Isa::avx2 ? "avx2" : "scalar";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(QPT_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

std::vector<Isa> supported_isas() {
  std::vector<Isa> out{Isa::scalar};
  if (isa_supported(Isa::avx2)) out.push_back(Isa::avx2);
  return out;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw ConfigError("instruction set '" + std::string(to_string(isa)) + "' is not available");
  }
#if defined(QPT_BUILD_AVX2)
  if (isa == Isa::avx2) return avx2_kernels();
#endif
  return scalar_kernels();
}

const KernelTable& kernels() noexcept {
  return *active_slot().load(std::memory_order_acquire);
}

void set_active_isa(Isa isa) {
  active_slot().store(&kernels_for(isa), std::memory_order_release);
}

}  // namespace qpt::simd
