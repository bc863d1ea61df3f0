#include "largenoise/tv_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "largenoise/errors.hpp"

namespace largenoise {

namespace {

double basis_function(std::size_t mode, double x) {
  if (mode == 1) return 1.0;
  const double k = static_cast<double>(mode / 2);
  const double arg = 2.0 * std::numbers::pi * k * x;
  return std::numbers::sqrt2 * (mode % 2 == 0 ? std::cos(arg) : std::sin(arg));
}

}  // namespace

TvGrid::TvGrid(const BasisSpec& basis, std::size_t grid_size)
    : basis_(basis), grid_size_(grid_size) {
  if (basis.dimension() != 1)
    throw InvalidArgument("TV penalty: only one-dimensional bases are supported");
  if (grid_size < 2) throw InvalidArgument("TV penalty: grid_size must be >= 2");
  const std::size_t n = basis.mode_count();
  const std::size_t k_max = n / 2;
  if (grid_size <= 2 * k_max)
    throw InvalidArgument("TV penalty: grid_size must exceed 2*floor(N/2) (aliasing)");

  const std::size_t g = grid_size;
  std::vector<double> samples(g * n);
  for (std::size_t i = 0; i < g; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(g);
    for (std::size_t l = 1; l <= n; ++l) samples[i * n + (l - 1)] = basis_function(l, x);
  }
  diff_.resize(g * n);
  for (std::size_t i = 0; i < g; ++i) {
    const std::size_t next = (i + 1) % g;
    for (std::size_t j = 0; j < n; ++j)
      diff_[i * n + j] = samples[next * n + j] - samples[i * n + j];
  }
  gram_.resize(n);
  for (std::size_t l = 1; l <= n; ++l) {
    const double k = static_cast<double>(l / 2);
    const double s = std::sin(std::numbers::pi * k / static_cast<double>(g));
    gram_[l - 1] = 4.0 * static_cast<double>(g) * s * s;
  }
  norm_sq_ = *std::max_element(gram_.begin(), gram_.end());
}

std::vector<double> TvGrid::synthesize(std::span<const double> coeffs) const {
  const std::size_t n = basis_.mode_count();
  std::vector<double> out(grid_size_);
  for (std::size_t i = 0; i < grid_size_; ++i) {
    const double x = static_cast<double>(i) / static_cast<double>(grid_size_);
    double acc = 0.0;
    for (std::size_t l = 1; l <= n; ++l) acc += coeffs[l - 1] * basis_function(l, x);
    out[i] = acc;
  }
  return out;
}

std::vector<double> TvGrid::differences(std::span<const double> coeffs) const {
  const std::size_t n = basis_.mode_count();
  std::vector<double> out(grid_size_, 0.0);
  for (std::size_t i = 0; i < grid_size_; ++i) {
    const double* row = diff_.data() + i * n;
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * coeffs[j];
    out[i] = acc;
  }
  return out;
}

std::vector<double> TvGrid::differences_adjoint(std::span<const double> p) const {
  const std::size_t n = basis_.mode_count();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < grid_size_; ++i) {
    const double* row = diff_.data() + i * n;
    const double pi = p[i];
    if (pi == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j) out[j] += row[j] * pi;
  }
  return out;
}

}  // namespace largenoise
