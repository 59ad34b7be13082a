#pragma once

#include <cstddef>

namespace parbo::simd::detail {

void scaled_sqdist_scalar(const double* cols, std::size_t stride, std::size_t n, std::size_t dim,
                          const double* x, const double* inv_len, double* out);
double dot_scalar(const double* a, const double* b, std::size_t n);
void matern52_scalar(const double* r2, std::size_t n, double amp2, double* out);

#if defined(__x86_64__) || defined(_M_X64)
#define PARBO_HAVE_AVX2_KERNELS 1
void scaled_sqdist_avx2(const double* cols, std::size_t stride, std::size_t n, std::size_t dim,
                        const double* x, const double* inv_len, double* out);
double dot_avx2(const double* a, const double* b, std::size_t n);
void matern52_avx2(const double* r2, std::size_t n, double amp2, double* out);
#endif

}  // namespace parbo::simd::detail
