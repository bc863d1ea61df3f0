#pragma once

// Seeded white noise on a truncated basis and synthetic data f = K u + delta n.
//
// Coefficient l of the sample with seed s is a pure function of (s, l): a
// Philox4x32-10 block keyed by s at counter l feeds one Box-Muller draw. This
// keeps replicates reproducible regardless of evaluation order or threading.

#include <array>
#include <cstdint>

#include "largenoise/operators.hpp"
#include "largenoise/spectral.hpp"

namespace largenoise {

/// Philox4x32-10 block function.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Standard normal draw for (seed, index).
double standard_normal(std::uint64_t seed, std::uint64_t index);

/// splitmix64 mix of (master, stream); used to derive per-replicate seeds.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

struct NoiseSample {
  CoefficientField n;
  std::uint64_t seed;

  /// eta = K* n.
  CoefficientField eta(const SpectralOperator& K) const;
};

NoiseSample sample_white_noise(const BasisSpec& basis, std::uint64_t seed);

/// f = K u_true + delta n, delta >= 0.
CoefficientField synthesize_data(const SpectralOperator& K, const CoefficientField& u_true,
                                 double delta, const NoiseSample& sample);

}  // namespace largenoise
