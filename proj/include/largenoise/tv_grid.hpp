#pragma once

// Periodic sampling grid for the total-variation penalty.
//
// Coefficients are synthesized onto x_i = i/G, i = 0..G-1, with the real
// trigonometric system ordered by mode: phi_1 = 1, phi_{2k} = sqrt2 cos(2 pi k x),
// phi_{2k+1} = sqrt2 sin(2 pi k x). TV is the l1 norm of the periodic forward
// differences of those samples, i.e. ||B u||_1 with B = D A.

#include <cstddef>
#include <span>
#include <vector>

#include "largenoise/spectral.hpp"

namespace largenoise {

class TvGrid {
 public:
  /// Requires d = 1 and G > 2 floor(N/2) so that no mode aliases.
  TvGrid(const BasisSpec& basis, std::size_t grid_size);

  const BasisSpec& basis() const noexcept { return basis_; }
  std::size_t grid_size() const noexcept { return grid_size_; }

  /// Grid samples A u.
  std::vector<double> synthesize(std::span<const double> coeffs) const;
  /// B u, the periodic differences of the samples.
  std::vector<double> differences(std::span<const double> coeffs) const;
  /// B^T p.
  std::vector<double> differences_adjoint(std::span<const double> p) const;

  /// ||B||^2. B^T B is diagonal with entries 4 G sin^2(pi k / G), k = floor(l/2).
  double operator_norm_sq() const noexcept { return norm_sq_; }
  /// Diagonal of B^T B.
  std::span<const double> gram_diagonal() const noexcept { return gram_; }

 private:
  BasisSpec basis_;
  std::size_t grid_size_;
  std::vector<double> diff_;  // row-major G x N
  std::vector<double> gram_;
  double norm_sq_ = 0.0;
};

}  // namespace largenoise
