#pragma once

// Approximate-source machinery: the functional
//   e_{alpha,zeta}(theta) = inf_w zeta R*((K*w - theta)/zeta) + alpha/2 ||w||^2,
// its Fenchel dual, distance functions, source-order fits, parameter-choice
// tables and the a-priori / error-bound evaluators.

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "largenoise/operators.hpp"
#include "largenoise/regularizers.hpp"
#include "largenoise/solvers.hpp"
#include "largenoise/spectral.hpp"

namespace largenoise {

/// Closed forms for Quadratic and BesovOne, per-mode scalar minimization for
/// PPower, and the dual route for TV (which has no usable conjugate).
double e_value(const Penalty& R, const SpectralOperator& K, double alpha, double zeta,
               const CoefficientField& theta, const SolverOptions& opts = {});

/// -inf_v F(v), F(v) = 1/(2 alpha) ||Kv||^2 - <theta, v> + zeta R(v), by
/// numerical minimization.
double e_dual_check(const Penalty& R, const SpectralOperator& K, double alpha, double zeta,
                    const CoefficientField& theta, const SolverOptions& opts = {});

/// d_rho(theta) = inf { ||K*w - theta||_r : ||w|| <= rho } with r = norm_exponent
/// (coefficient l^r norm).
double distance_function(const SpectralOperator& K, const CoefficientField& theta,
                         double rho, double norm_exponent = 2.0);

enum class SourceKind { OneHomog, PHomog };
enum class OrderRoute {
  Direct,            // fit the source functional against beta
  DistanceFunction,  // fit d_rho against rho, then convert (p-homogeneous only)
};

struct SourceOrderEstimate {
  double r_hat;
  std::pair<double, double> fit_range;
  double fit_residual;
  SourceKind kind;
  double slope;
  std::vector<double> grid;
  std::vector<double> values;
};

/// For OrderRoute::Direct the grid holds beta values; for DistanceFunction it
/// holds rho values. At least 4 points spanning one decade.
SourceOrderEstimate estimate_source_order(const Penalty& R, const SpectralOperator& K,
                                          const CoefficientField& theta,
                                          const std::vector<double>& grid,
                                          OrderRoute route = OrderRoute::Direct);

/// Minimizer and minimum of a zeta^s + b zeta^{-t}.
struct BalancedZeta {
  double zeta_star;
  double minimum;
};
BalancedZeta balance_zeta(double a, double b, double s, double t);

enum class RateSetting { OneHomog, PHomog, Quadratic, GaussianTrace, GaussianEigen, Besov, TV };

std::string to_string(RateSetting setting);
RateSetting rate_setting_from_string(const std::string& name);

struct RateInputs {
  RateSetting setting = RateSetting::GaussianTrace;
  double r1 = 0.0;
  double r2 = 0.0;
  double p = 2.0;     // PHomog
  double m = 1.0;     // GaussianEigen
  double s = 0.0;     // Besov
  double t = 0.0;     // Besov, TV
  double d = 1.0;     // TV
  double eps = 0.01;  // TV
};

struct RateRule {
  RateSetting setting;
  double r1;
  double r2;
  double kappa;
  double predicted_exponent;
};

/// Parameter choice alpha ~ delta^kappa and the predicted rate exponent.
/// Hypothesis violations throw HypothesisViolation naming the condition.
RateRule kappa_rule(const RateInputs& in);

/// Right-hand side of the a-priori estimate for R(u_alpha) with witness (gamma, w).
/// +infinity whenever the conjugate term is infinite or unavailable.
double apriori_bound(const Penalty& R, const SpectralOperator& K, double alpha, double delta,
                     const CoefficientField& u_true, const CoefficientField& w, double gamma,
                     const CoefficientField& eta);

/// C omega^{p/D} zeta^{-(1-2mu)/D} alpha^{p mu/D}, D = p - 1 + 2mu - p mu.
double embedding_bound(double omega_norm, double mu_exp, double zeta, double alpha, double p,
                       double constant);

/// omega = L^{-mu} theta and the constant of the p = 1 embedding bound for a
/// one-homogeneous R with R(v) >= c ||v||. For TV the constant mode is split
/// off (R vanishes there) and excluded from omega.
struct EmbeddingWitness {
  double omega_norm;
  double constant;
  double lower_constant;  // c
};
EmbeddingWitness embedding_witness(const Penalty& R, const SpectralOperator& K,
                                   const CoefficientField& theta, double mu_exp);

namespace bound_variant {
struct BregmanOnly {};
struct WithResidual {};
struct Embedding {
  double mu_exp;
  double omega_norm;
  double constant;
};
}  // namespace bound_variant

using BoundVariant = std::variant<bound_variant::BregmanOnly, bound_variant::WithResidual,
                                  bound_variant::Embedding>;

struct ErrorBoundReport {
  double bound;
  double measured;
  bool holds;
  double theta;
  double c_theta;
  double e_source;  // e-term of mu_dag at the evaluated zeta_1
  double e_noise;   // e-term (or embedding bound) of eta at zeta_2
};

/// Evaluates the error estimate for the supplied (zeta1, zeta2) and compares
/// it with the measured symmetric Bregman distance (plus ||K(u - u_true)||^2
/// for WithResidual). The same mu_dag is used in the bound and the measurement.
ErrorBoundReport error_bound_eval(const Penalty& R, const SpectralOperator& K, double alpha,
                                  double delta, double zeta1, double zeta2,
                                  const CoefficientField& mu_dag, const CoefficientField& eta,
                                  const MinimizerResult& result,
                                  const CoefficientField& u_true, const BoundVariant& variant,
                                  const SolverOptions& opts = {});

/// zeta choices that (approximately) minimize the bound of error_bound_eval:
/// exact balancing for theta = 1, balance_zeta on a local power-law fit of
/// the e-terms for theta < 1.
std::pair<double, double> balanced_zetas(const Penalty& R, const SpectralOperator& K,
                                         double alpha, double delta,
                                         const CoefficientField& mu_dag,
                                         const CoefficientField& eta,
                                         const MinimizerResult& result,
                                         const CoefficientField& u_true,
                                         const BoundVariant& variant,
                                         const SolverOptions& opts = {});

}  // namespace largenoise
