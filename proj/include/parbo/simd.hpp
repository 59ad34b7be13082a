#pragma once

#include <cstddef>
#include <string_view>

// Data-parallel inner loops used by the GP code. Each kernel has a portable
// scalar reference and an AVX2/FMA variant; the variant is picked once at
// startup from CPUID and can be forced with PARBO_SIMD=scalar|avx2.

namespace parbo::simd {

enum class Isa { scalar, avx2 };

/// out[i] = sum_k ((cols[k*stride + i] - x[k]) * inv_len[k])^2 for i < n.
/// Points are stored column-major (structure of arrays) with column stride `stride`.
using ScaledSqdistFn = void (*)(const double* cols, std::size_t stride, std::size_t n,
                                std::size_t dim, const double* x, const double* inv_len,
                                double* out);

using DotFn = double (*)(const double* a, const double* b, std::size_t n);

/// out[i] = amp2 * (1 + sqrt(5 r2) + 5/3 r2) * exp(-sqrt(5 r2)), in place allowed.
using Matern52Fn = void (*)(const double* r2, std::size_t n, double amp2, double* out);

struct KernelTable {
  Isa isa;
  ScaledSqdistFn scaled_sqdist;
  DotFn dot;
  Matern52Fn matern52;
};

const KernelTable& scalar_kernels() noexcept;
/// Only valid when cpu_supports_avx2() is true.
const KernelTable& avx2_kernels() noexcept;

bool cpu_supports_avx2() noexcept;

/// Kernels in use by the library.
const KernelTable& active() noexcept;

/// Override the dispatch (tests and benchmarks). Requesting avx2 on a CPU
/// without it keeps the scalar table and returns false.
bool force_isa(Isa isa) noexcept;

std::string_view isa_name(Isa isa) noexcept;

inline void scaled_sqdist(const double* cols, std::size_t stride, std::size_t n, std::size_t dim,
                          const double* x, const double* inv_len, double* out) {
  active().scaled_sqdist(cols, stride, n, dim, x, inv_len, out);
}

inline double dot(const double* a, const double* b, std::size_t n) {
  return active().dot(a, b, n);
}

inline void matern52(const double* r2, std::size_t n, double amp2, double* out) {
  active().matern52(r2, n, amp2, out);
}

}  // namespace parbo::simd
