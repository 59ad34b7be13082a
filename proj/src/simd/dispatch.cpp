#include "parbo/simd.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_impl.hpp"

namespace parbo::simd {

namespace {

constexpr KernelTable kScalar{Isa::scalar, &detail::scaled_sqdist_scalar, &detail::dot_scalar,
                              &detail::matern52_scalar};
#if defined(PARBO_HAVE_AVX2_KERNELS)
constexpr KernelTable kAvx2{Isa::avx2, &detail::scaled_sqdist_avx2, &detail::dot_avx2,
                            &detail::matern52_avx2};
#else
constexpr KernelTable kAvx2 = kScalar;
#endif

const KernelTable* initial_table() noexcept {
  if (const char* env = std::getenv("PARBO_SIMD")) {
    if (std::string(env) == "scalar") return &kScalar;
  }
  return cpu_supports_avx2() ? &kAvx2 : &kScalar;
}

std::atomic<const KernelTable*>& table_slot() noexcept {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }
const KernelTable& avx2_kernels() noexcept { return kAvx2; }

bool cpu_supports_avx2() noexcept {
#if defined(PARBO_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& active() noexcept { return *table_slot().load(std::memory_order_relaxed); }

bool force_isa(Isa isa) noexcept {
  if (isa == Isa::avx2 && !cpu_supports_avx2()) {
    table_slot().store(&kScalar);
    return false;
  }
  table_slot().store(isa == Isa::avx2 ? &kAvx2 : &kScalar);
  return true;
}

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::avx2 ? "avx2" : "scalar"; }

}  // namespace parbo::simd
