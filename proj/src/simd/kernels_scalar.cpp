#include "kernels_impl.hpp"

#include <cmath>

namespace parbo::simd::detail {

void scaled_sqdist_scalar(const double* cols, std::size_t stride, std::size_t n, std::size_t dim,
                          const double* x, const double* inv_len, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = 0.0;
  for (std::size_t k = 0; k < dim; ++k) {
    const double* col = cols + k * stride;
    const double xk = x[k];
    const double ik = inv_len[k];
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (col[i] - xk) * ik;
      out[i] += d * d;
    }
  }
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

void matern52_scalar(const double* r2, std::size_t n, double amp2, double* out) {
  const double sqrt5 = std::sqrt(5.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double q = r2[i];
    const double s = sqrt5 * std::sqrt(q);
    out[i] = amp2 * (1.0 + s + (5.0 / 3.0) * q) * std::exp(-s);
  }
}

}  // namespace parbo::simd::detail
