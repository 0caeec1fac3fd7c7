#pragma once

// Data-parallel inner loops of the jet arithmetic. Every kernel has a scalar
// reference implementation; an AVX2/FMA variant is compiled when the
// toolchain supports it and selected at runtime when the CPU does.
//
// The environment variable TMU_SIMD=scalar|avx2|auto overrides the choice at
// first use; set_isa() overrides it programmatically (used by the
// equivalence tests).

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace tmu::simd {

enum class Isa { kScalar, kAvx2 };

// Truncated product of two coefficient vectors, stored CSR-style by output
// coefficient: out[k] = sum over p in [offsets[k], offsets[k+1]) of
// a[lhs[p]] * b[rhs[p]].
struct ProductPlan {
  std::vector<std::int32_t> offsets;
  std::vector<std::int32_t> lhs;
  std::vector<std::int32_t> rhs;
  std::size_t outputs() const { return offsets.empty() ? 0 : offsets.size() - 1; }
};

struct KernelTable {
  void (*product)(const ProductPlan& plan, const double* a, const double* b, double* out);
  // out = alpha * x + beta * y
  void (*axpby)(std::size_t n, double alpha, const double* x, double beta, const double* y,
                double* out);
  void (*scale)(std::size_t n, double alpha, const double* x, double* out);
  // Fixed-shape pairwise reduction; result depends only on n and the ISA.
  double (*dot)(std::size_t n, const double* x, const double* y);
};

const KernelTable& scalar_kernels();
// Null when the variant was not compiled in.
const KernelTable* avx2_kernels();

bool isa_available(Isa isa);
Isa active_isa();
void set_isa(Isa isa);
std::string_view isa_name(Isa isa);

// Kernels for the active ISA.
const KernelTable& kernels();

}  // namespace tmu::simd
