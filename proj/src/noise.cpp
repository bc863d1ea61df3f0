#include "largenoise/noise.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "largenoise/errors.hpp"

namespace largenoise {

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
  constexpr std::uint64_t kMul0 = 0xD2511F53u;
  constexpr std::uint64_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = kMul0 * c[0];
    const std::uint64_t p1 = kMul1 * c[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

namespace {

// 53-bit uniform in [0, 1) from two words.
double unit_interval(std::uint32_t a, std::uint32_t b) {
  const std::uint64_t bits = (static_cast<std::uint64_t>(a >> 5) << 26) | (b >> 6);
  return static_cast<double>(bits) * 0x1.0p-53;
}

}  // namespace

double standard_normal(std::uint64_t seed, std::uint64_t index) {
  const auto block = philox4x32(
      {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), 0u, 0u},
      {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
  const double u1 = 1.0 - unit_interval(block[0], block[1]);  // (0, 1]
  const double u2 = unit_interval(block[2], block[3]);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

CoefficientField NoiseSample::eta(const SpectralOperator& K) const {
  return apply(K, apply_mode::Adjoint{}, n);
}

NoiseSample sample_white_noise(const BasisSpec& basis, std::uint64_t seed) {
  std::vector<double> c(basis.mode_count());
  for (std::size_t l = 1; l <= c.size(); ++l) c[l - 1] = standard_normal(seed, l);
  return {CoefficientField(basis, std::move(c), SpaceTag::Zdual), seed};
}

CoefficientField synthesize_data(const SpectralOperator& K, const CoefficientField& u_true,
                                 double delta, const NoiseSample& sample) {
  if (!(delta >= 0.0)) throw InvalidArgument("synthesize_data: delta must be >= 0");
  require_same_basis(K.basis(), u_true.basis(), "synthesize_data");
  require_same_basis(K.basis(), sample.n.basis(), "synthesize_data");
  std::vector<double> f(u_true.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = K.sigma(i) * u_true[i] + delta * sample.n[i];
  return {u_true.basis(), std::move(f), SpaceTag::Zdual};
}

}  // namespace largenoise
