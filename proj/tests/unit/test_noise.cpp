#include <doctest.h>

#include <cmath>
#include <numbers>

#include "generators.hpp"
#include "largenoise/errors.hpp"
#include "largenoise/noise.hpp"

using namespace largenoise;

TEST_CASE("philox4x32-10 known answers") {
  // Reference vectors from the Random123 distribution (kat_vectors).
  CHECK(philox4x32({0, 0, 0, 0}, {0, 0}) ==
        std::array<std::uint32_t, 4>{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        std::array<std::uint32_t, 4>{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        std::array<std::uint32_t, 4>{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("sampling is deterministic and order independent") {
  const BasisSpec b(1, 64);
  const auto a = sample_white_noise(b, 12345), c = sample_white_noise(b, 12345);
  for (std::size_t i = 0; i < 64; ++i) CHECK(a.n[i] == c.n[i]);
  for (std::size_t i = 0; i < 64; ++i) CHECK(a.n[i] == standard_normal(12345, i + 1));
  // a longer basis extends the same sequence
  const auto longer = sample_white_noise(BasisSpec(1, 128), 12345);
  for (std::size_t i = 0; i < 64; ++i) CHECK(longer.n[i] == a.n[i]);
  const auto other = sample_white_noise(b, 12346);
  CHECK(other.n[0] != a.n[0]);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
}

TEST_CASE("mean of the first coefficient over 1e5 seeds") {
  double sum = 0.0;
  const int n = 100000;
  for (int s = 0; s < n; ++s) sum += standard_normal(derive_seed(7, s), 1);
  CHECK(std::abs(sum / n) <= 4.0 * std::pow(10.0, -2.5));
}

TEST_CASE("expected H^{-1} norm approaches pi^2/6") {
  // E ||n||^2_{H^{-1}} = sum_{l <= N} l^{-2}; the series tail beyond N is < 1/N.
  const std::size_t N = 4000;
  const BasisSpec b(1, N);
  const int draws = 2000;
  double sum = 0.0, sum_sq = 0.0;
  for (int k = 0; k < draws; ++k) {
    const auto n = sample_white_noise(b, derive_seed(99, k)).n;
    const double v = std::pow(sobolev_norm(n, -1.0), 2);
    sum += v;
    sum_sq += v * v;
  }
  const double mean = sum / draws;
  const double se = std::sqrt((sum_sq / draws - mean * mean) / (draws - 1));
  const double target = std::numbers::pi * std::numbers::pi / 6.0;
  CHECK(std::abs(mean - target) <= 3.0 * se + 1.0 / N);
}

TEST_CASE("per-coefficient sample variance over 1e4 seeds") {
  const BasisSpec b(1, 40);
  const int draws = 10000;
  std::vector<double> s1(40, 0.0), s2(40, 0.0);
  for (int k = 0; k < draws; ++k) {
    const auto n = sample_white_noise(b, derive_seed(3, k)).n;
    for (std::size_t i = 0; i < 40; ++i) s1[i] += n[i], s2[i] += n[i] * n[i];
  }
  for (std::size_t i = 0; i < 40; ++i) {
    const double m = s1[i] / draws, var = (s2[i] - draws * m * m) / (draws - 1);
    CHECK(var >= 0.94);
    CHECK(var <= 1.06);
  }
}

TEST_CASE("squared L2 norm grows linearly in N") {
  std::vector<double> logn, logv;
  for (std::size_t N = 256; N <= 4096; N *= 2) {
    double acc = 0.0;
    for (int k = 0; k < 20; ++k) acc += std::pow(l2_norm(sample_white_noise(BasisSpec(1, N), derive_seed(5, k)).n), 2);
    logn.push_back(std::log(static_cast<double>(N)));
    logv.push_back(std::log(acc / 20));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < logn.size(); ++i) mx += logn[i], my += logv[i];
  mx /= logn.size(), my /= logv.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < logn.size(); ++i) sxy += (logn[i] - mx) * (logv[i] - my), sxx += (logn[i] - mx) * (logn[i] - mx);
  CHECK(sxy / sxx == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("covariance identity E<n,phi><n,psi> = <phi,psi>") {
  gen::Source g(51);
  const BasisSpec b(1, 16);
  const auto phi = g.field(b), psi = g.field(b);
  const int draws = 20000;
  double s = 0.0, s2 = 0.0;
  for (int k = 0; k < draws; ++k) {
    const auto n = sample_white_noise(b, derive_seed(11, k)).n;
    const double v = dual_pairing(n, phi) * dual_pairing(n, psi);
    s += v, s2 += v * v;
  }
  const double mean = s / draws, se = std::sqrt((s2 / draws - mean * mean) / (draws - 1));
  CHECK(std::abs(mean - dual_pairing(phi, psi)) <= 4.0 * se);
}

TEST_CASE("synthesize_data examples") {
  gen::Source g(52);
  const BasisSpec b(1, 10);
  const auto K = g.op(b, 0.1, 1.0);
  const auto u = g.field(b);
  const auto sample = sample_white_noise(b, 77);
  const auto Ku = apply(K, apply_mode::Forward{}, u);
  const auto f0 = synthesize_data(K, u, 0.0, sample);
  for (std::size_t i = 0; i < 10; ++i) CHECK(f0[i] == Ku[i]);
  const auto fn = synthesize_data(K, CoefficientField::zeros(b), 0.3, sample);
  for (std::size_t i = 0; i < 10; ++i) CHECK(fn[i] == 0.3 * sample.n[i]);
  const auto diff = synthesize_data(K, u, 0.3, sample) - fn;
  for (std::size_t i = 0; i < 10; ++i) CHECK(diff[i] == doctest::Approx(Ku[i]).epsilon(1e-14));
  CHECK_THROWS_AS(synthesize_data(K, u, -1.0, sample), InvalidArgument);
  CHECK_THROWS_AS(synthesize_data(K, CoefficientField::zeros(BasisSpec(1, 3)), 1.0, sample), BasisMismatch);
  const auto eta = sample.eta(K);
  for (std::size_t i = 0; i < 10; ++i) CHECK(eta[i] == K.sigma(i) * sample.n[i]);
}
