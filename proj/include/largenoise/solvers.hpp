#pragma once

// Minimizers of J(u) = 1/2 ||Ku||^2 - <Ku, f> + alpha R(u).
//
// The data only ever enter through K*f, so no ||f||^2 is formed; f may be an
// arbitrarily rough white-noise realization.

#include <cstddef>

#include "largenoise/operators.hpp"
#include "largenoise/regularizers.hpp"
#include "largenoise/spectral.hpp"

namespace largenoise {

enum class SolverMethod {
  Auto,       // closed form where one exists (Quadratic), iterative otherwise
  Iterative,  // always proximal gradient
};

struct SolverOptions {
  double tol = 1e-8;
  std::size_t max_iter = 50000;
  bool accelerated = false;
  /// Step size is step_factor / max sigma^2.
  double step_factor = 0.99;
  SolverMethod method = SolverMethod::Auto;
  TvProxOptions tv{};
};

struct MinimizerResult {
  CoefficientField u;
  CoefficientField mu;
  double objective;
  std::size_t iterations;
  double optimality_residual;
};

MinimizerResult solve_variational(const SpectralOperator& K, const CoefficientField& f,
                                  double alpha, const Penalty& R,
                                  const SolverOptions& opts = {});

double objective_eval(const SpectralOperator& K, const CoefficientField& f, double alpha,
                      const Penalty& R, const CoefficientField& u);

/// ||K*(Ku - f) + alpha mu|| for the best mu in dR(u). For TV, which has no
/// componentwise subdifferential, the proximal gradient-mapping norm is used.
double verify_optimality(const SpectralOperator& K, const CoefficientField& f,
                         double alpha, const Penalty& R, const CoefficientField& u,
                         const SolverOptions& opts = {});

/// Minimizer of Phi(v) = 1/2 sum sigma^2 v^2 - <b, v> + lambda R(v), the
/// common core of the primal problem (b = K*f) and the dual source functional.
struct CompositeResult {
  CoefficientField v;
  double value;
  std::size_t iterations;
  double residual;
};

CompositeResult minimize_composite(const SpectralOperator& K, const CoefficientField& b,
                                   double lambda, const Penalty& R,
                                   const SolverOptions& opts = {});

}  // namespace largenoise
