#include "kernels_impl.hpp"

#if defined(PARBO_HAVE_AVX2_KERNELS)

#include <immintrin.h>

#include <cmath>
#include <cstdint>

// Compiled without -mavx2; every function carries its own target attribute so
// the rest of the library stays baseline x86-64.
#define PARBO_AVX2 __attribute__((target("avx2,fma")))

namespace parbo::simd::detail {

namespace {

PARBO_AVX2 inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// exp for non-positive arguments. x = k ln2 + r with |r| <= ln2/2, degree-13
// Taylor polynomial for exp(r), then scale by 2^k through the exponent bits.
// Arguments below -700 flush to zero.
PARBO_AVX2 inline __m256d exp_nonpos(__m256d x) {
  const __m256d log2e = _mm256_set1_pd(1.4426950408889634);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d underflow = _mm256_set1_pd(-700.0);

  const __m256d live = _mm256_cmp_pd(x, underflow, _CMP_GT_OQ);
  x = _mm256_max_pd(x, underflow);

  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2_hi, x);
  r = _mm256_fnmadd_pd(k, ln2_lo, r);

  static constexpr double inv_fact[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0,
      1.0 / 362880.0,     1.0 / 40320.0,     1.0 / 5040.0,      1.0 / 720.0,
      1.0 / 120.0,        1.0 / 24.0,        1.0 / 6.0,         0.5,
      1.0,                1.0};
  __m256d p = _mm256_set1_pd(inv_fact[0]);
  for (int i = 1; i < 14; ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(inv_fact[i]));

  // 2^k: k in [-1010, 0], so biased exponent k + 1023 stays normal.
  const __m128i k32 = _mm256_cvtpd_epi32(k);
  __m256i bits = _mm256_cvtepi32_epi64(k32);
  bits = _mm256_add_epi64(bits, _mm256_set1_epi64x(1023));
  bits = _mm256_slli_epi64(bits, 52);
  const __m256d scale = _mm256_castsi256_pd(bits);

  return _mm256_and_pd(_mm256_mul_pd(p, scale), live);
}

}  // namespace

PARBO_AVX2 void scaled_sqdist_avx2(const double* cols, std::size_t stride, std::size_t n,
                                   std::size_t dim, const double* x, const double* inv_len,
                                   double* out) {
  const std::size_t n4 = n & ~std::size_t{3};
  for (std::size_t i = 0; i < n4; i += 4) _mm256_storeu_pd(out + i, _mm256_setzero_pd());
  for (std::size_t i = n4; i < n; ++i) out[i] = 0.0;

  for (std::size_t k = 0; k < dim; ++k) {
    const double* col = cols + k * stride;
    const __m256d xk = _mm256_set1_pd(x[k]);
    const __m256d ik = _mm256_set1_pd(inv_len[k]);
    for (std::size_t i = 0; i < n4; i += 4) {
      const __m256d d = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(col + i), xk), ik);
      _mm256_storeu_pd(out + i, _mm256_fmadd_pd(d, d, _mm256_loadu_pd(out + i)));
    }
    for (std::size_t i = n4; i < n; ++i) {
      const double d = (col[i] - x[k]) * inv_len[k];
      out[i] = std::fma(d, d, out[i]);
    }
  }
}

PARBO_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s = std::fma(a[i], b[i], s);
  return s;
}

PARBO_AVX2 void matern52_avx2(const double* r2, std::size_t n, double amp2, double* out) {
  const __m256d sqrt5 = _mm256_set1_pd(2.23606797749978969641);
  const __m256d five_thirds = _mm256_set1_pd(5.0 / 3.0);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d amp = _mm256_set1_pd(amp2);
  const __m256d sign = _mm256_set1_pd(-0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d q = _mm256_loadu_pd(r2 + i);
    const __m256d s = _mm256_mul_pd(sqrt5, _mm256_sqrt_pd(q));
    const __m256d poly = _mm256_fmadd_pd(five_thirds, q, _mm256_add_pd(one, s));
    const __m256d e = exp_nonpos(_mm256_xor_pd(s, sign));
    _mm256_storeu_pd(out + i, _mm256_mul_pd(amp, _mm256_mul_pd(poly, e)));
  }
  if (i < n) matern52_scalar(r2 + i, n - i, amp2, out + i);
}

}  // namespace parbo::simd::detail

#endif
