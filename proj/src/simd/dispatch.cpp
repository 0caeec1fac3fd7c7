#include <atomic>
#include <cstdlib>
#include <string_view>

#include "tmu/simd/kernels.hpp"

namespace tmu::simd {

#ifndef TMU_WITH_AVX2
const KernelTable* avx2_kernels() { return nullptr; }
#endif

namespace {

bool cpu_has_avx2() {
#if defined(TMU_WITH_AVX2) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa initial_isa() {
  const char* env = std::getenv("TMU_SIMD");
  std::string_view want = env ? env : "auto";
  if (want == "scalar") return Isa::kScalar;
  return isa_available(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{
      initial_isa() == Isa::kAvx2 ? avx2_kernels() : &scalar_kernels()};
  return table;
}

}  // namespace

bool isa_available(Isa isa) {
  if (isa == Isa::kScalar) return true;
  return avx2_kernels() != nullptr && cpu_has_avx2();
}

Isa active_isa() {
  return current().load(std::memory_order_acquire) == &scalar_kernels() ? Isa::kScalar
                                                                         : Isa::kAvx2;
}

void set_isa(Isa isa) {
  if (!isa_available(isa)) isa = Isa::kScalar;
  current().store(isa == Isa::kAvx2 ? avx2_kernels() : &scalar_kernels(),
                  std::memory_order_release);
}

std::string_view isa_name(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

const KernelTable& kernels() { return *current().load(std::memory_order_acquire); }

}  // namespace tmu::simd
