#pragma once

#include <cstdint>
#include <random>

namespace parbo {

using Rng = std::mt19937_64;

/// Derive an independent stream seed from a base seed and a stream index.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

double standard_normal(Rng& rng);
double uniform01(Rng& rng);

}  // namespace parbo
