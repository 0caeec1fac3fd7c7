// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "tmu/simd/kernels.hpp"

namespace tmu::simd {
namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);  // (l0+l2, l1+l3)
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void product_avx2(const ProductPlan& plan, const double* a, const double* b, double* out) {
  const std::size_t n = plan.outputs();
  const std::int32_t* lhs = plan.lhs.data();
  const std::int32_t* rhs = plan.rhs.data();
  for (std::size_t k = 0; k < n; ++k) {
    std::int32_t p = plan.offsets[k];
    const std::int32_t end = plan.offsets[k + 1];
    double acc = 0.0;
    if (end - p >= 4) {
      __m256d vacc = _mm256_setzero_pd();
      for (; p + 4 <= end; p += 4) {
        __m128i il = _mm_loadu_si128(reinterpret_cast<const __m128i*>(lhs + p));
        __m128i ir = _mm_loadu_si128(reinterpret_cast<const __m128i*>(rhs + p));
        __m256d va = _mm256_i32gather_pd(a, il, 8);
        __m256d vb = _mm256_i32gather_pd(b, ir, 8);
        vacc = _mm256_fmadd_pd(va, vb, vacc);
      }
      acc = hsum(vacc);
    }
    for (; p < end; ++p) acc += a[lhs[p]] * b[rhs[p]];
    out[k] = acc;
  }
}

void axpby_avx2(std::size_t n, double alpha, const double* x, double beta, const double* y,
                double* out) {
  const __m256d va = _mm256_set1_pd(alpha);
  const __m256d vb = _mm256_set1_pd(beta);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_mul_pd(vb, _mm256_loadu_pd(y + i));
    r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), r);
    _mm256_storeu_pd(out + i, r);
  }
  for (; i < n; ++i) out[i] = alpha * x[i] + beta * y[i];
}

void scale_avx2(std::size_t n, double alpha, const double* x, double* out) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(out + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) out[i] = alpha * x[i];
}

double dot_avx2(std::size_t n, const double* x, const double* y) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc);
  }
  double tail = 0.0;
  for (; i < n; ++i) tail += x[i] * y[i];
  return hsum(acc) + tail;
}

}  // namespace

const KernelTable* avx2_kernels() {
  static const KernelTable table{&product_avx2, &axpby_avx2, &scale_avx2, &dot_avx2};
  return &table;
}

}  // namespace tmu::simd
