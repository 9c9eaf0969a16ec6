#include <immintrin.h>

#include "axistable/kernels.hpp"

// AVX2+FMA variants. Same blocked accumulation layout as the scalar
// reference: four 256-bit lanes play the role of the eight block partials.

namespace axistable::kernels {
namespace {

inline double hsum(__m256d x) {
  __m128d lo = _mm256_castpd256_pd128(x);
  __m128d hi = _mm256_extractf128_pd(x, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d swapped = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  double head = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) head += a[i] * b[i];
  return head;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_loadu_pd(a + i));
    acc1 = _mm256_add_pd(acc1, _mm256_loadu_pd(a + i + 4));
  }
  double head = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) head += a[i];
  return head;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d vy = _mm256_loadu_pd(y + i);
    vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
    _mm256_storeu_pd(y + i, vy);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, double* x, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(x + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) x[i] *= alpha;
}

void line_apply_avx2(const double* k_centered, const double* rho,
                     const double* v, double* out, std::size_t n) {
  const std::size_t c = n - 1;
  const __m256d half = _mm256_set1_pd(0.5);
  for (std::size_t k = 0; k < n; ++k) {
    const __m256d vk = _mm256_set1_pd(v[k]);
    const __m256d rk = _mm256_set1_pd(rho[k]);
    const double* kc = k_centered + (c - k);
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t l = 0;
    for (; l + 8 <= n; l += 8) {
      __m256d w0 = _mm256_mul_pd(
          _mm256_loadu_pd(kc + l),
          _mm256_mul_pd(half, _mm256_add_pd(rk, _mm256_loadu_pd(rho + l))));
      acc0 = _mm256_fmadd_pd(w0, _mm256_sub_pd(vk, _mm256_loadu_pd(v + l)), acc0);
      __m256d w1 = _mm256_mul_pd(
          _mm256_loadu_pd(kc + l + 4),
          _mm256_mul_pd(half, _mm256_add_pd(rk, _mm256_loadu_pd(rho + l + 4))));
      acc1 = _mm256_fmadd_pd(w1, _mm256_sub_pd(vk, _mm256_loadu_pd(v + l + 4)), acc1);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; l < n; ++l)
      acc += kc[l] * (0.5 * (rho[k] + rho[l])) * (v[k] - v[l]);
    out[k] = acc;
  }
}

const Backend kAvx2 = {dot_avx2, sum_avx2, axpy_avx2, scale_avx2,
                       line_apply_avx2, "avx2"};

}  // namespace

const Backend* avx2_backend_impl();
const Backend* avx2_backend_impl() { return &kAvx2; }

}  // namespace axistable::kernels
