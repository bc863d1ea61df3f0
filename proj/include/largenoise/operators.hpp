#pragma once

// Diagonal forward operators K psi_l = sigma_l psi_l and everything derived
// from them: K*, L = K*K, resolvents (L + beta)^{-1}, fractional powers L^mu,
// effective dimensions and eigenvalue sums of KK*.

#include <cmath>
#include <limits>
#include <variant>
#include <vector>

#include "largenoise/spectral.hpp"

namespace largenoise {

class SpectralOperator {
 public:
  /// sigma_l = w_l^{-t}, the diagonal model of (I - Laplacian)^{-t/2}.
  static SpectralOperator power(const BasisSpec& basis, double t);
  /// Arbitrary strictly positive multipliers. `smoothing_order` is metadata
  /// only and may be NaN when unknown.
  static SpectralOperator from_multipliers(
      const BasisSpec& basis, std::vector<double> sigma,
      double smoothing_order = std::numeric_limits<double>::quiet_NaN());

  const BasisSpec& basis() const noexcept { return basis_; }
  std::span<const double> sigma() const noexcept { return sigma_; }
  double sigma(std::size_t index) const { return sigma_[index]; }
  double smoothing_order() const noexcept { return smoothing_order_; }
  /// lambda_l = sigma_l^2, the eigenvalues of KK* (and of K*K).
  std::vector<double> eigenvalues() const;
  double max_eigenvalue() const noexcept { return max_eigenvalue_; }

  /// Hilbert-Schmidt in the untruncated limit: sum sigma^2 < inf iff t > d/2.
  /// False when the smoothing order is unknown.
  bool is_hilbert_schmidt() const;

 private:
  SpectralOperator(BasisSpec basis, std::vector<double> sigma, double t);

  BasisSpec basis_;
  std::vector<double> sigma_;
  double smoothing_order_;
  double max_eigenvalue_ = 0.0;
};

namespace apply_mode {
struct Forward {};
struct Adjoint {};
struct Normal {};
struct Resolvent {
  double beta;
};
struct FracPower {
  double mu;
};
}  // namespace apply_mode

using ApplyMode = std::variant<apply_mode::Forward, apply_mode::Adjoint,
                               apply_mode::Normal, apply_mode::Resolvent,
                               apply_mode::FracPower>;

/// Componentwise multiplication by sigma, sigma, sigma^2, 1/(sigma^2 + beta)
/// or sigma^{2 mu}. Resolvent needs beta > 0, FracPower mu in (0, 1/2].
CoefficientField apply(const SpectralOperator& op, const ApplyMode& mode,
                       const CoefficientField& u);

/// Tr(K (K*K + beta)^{-1} K*) = sum_j lambda_j / (lambda_j + beta).
double effective_dimension(const SpectralOperator& op, double beta);

/// sum_j lambda_j^m for m in (0, 1].
double eigenvalue_tail_sum(const SpectralOperator& op, double m);

/// Tr(KK*) = sum_j lambda_j.
double trace_normal(const SpectralOperator& op);

}  // namespace largenoise
