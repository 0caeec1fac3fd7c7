#include "tmu/simd/kernels.hpp"

namespace tmu::simd {
namespace {

void product_scalar(const ProductPlan& plan, const double* a, const double* b, double* out) {
  const std::size_t n = plan.outputs();
  const std::int32_t* lhs = plan.lhs.data();
  const std::int32_t* rhs = plan.rhs.data();
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::int32_t p = plan.offsets[k]; p < plan.offsets[k + 1]; ++p) {
      acc += a[lhs[p]] * b[rhs[p]];
    }
    out[k] = acc;
  }
}

void axpby_scalar(std::size_t n, double alpha, const double* x, double beta, const double* y,
                  double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = alpha * x[i] + beta * y[i];
}

void scale_scalar(std::size_t n, double alpha, const double* x, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = alpha * x[i];
}

// Blocks of 4 partial sums are combined pairwise, mirroring the lane
// structure of the vector variant.
double dot_scalar(std::size_t n, const double* x, const double* y) {
  double lane[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (int l = 0; l < 4; ++l) lane[l] += x[i + l] * y[i + l];
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i] * y[i];
  return ((lane[0] + lane[2]) + (lane[1] + lane[3])) + tail;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{&product_scalar, &axpby_scalar, &scale_scalar, &dot_scalar};
  return table;
}

}  // namespace tmu::simd
