#pragma once

// Penalty functionals R, conjugates, proximal maps, subgradients, Bregman
// distances and the (theta, C_theta) scaling data used by the error bounds.

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "largenoise/operators.hpp"
#include "largenoise/spectral.hpp"
#include "largenoise/tv_grid.hpp"

namespace largenoise {

namespace penalty_kind {
struct Quadratic {};
struct PPower {
  double p;
};
struct BesovOne {
  double s;
};
struct TotalVariation {
  std::size_t grid_size;
};
}  // namespace penalty_kind

using PenaltyKind = std::variant<penalty_kind::Quadratic, penalty_kind::PPower,
                                 penalty_kind::BesovOne, penalty_kind::TotalVariation>;

class Penalty {
 public:
  static Penalty quadratic();
  static Penalty p_power(double p);
  static Penalty besov_one(double s);
  /// TV needs the basis up front because the synthesis matrix depends on N.
  static Penalty total_variation(const BasisSpec& basis, std::size_t grid_size);

  const PenaltyKind& kind() const noexcept { return kind_; }
  bool is_quadratic() const;
  bool is_p_power() const;
  bool is_besov() const;
  bool is_tv() const;
  /// One-homogeneous penalties (BesovOne, TV).
  bool is_one_homogeneous() const { return is_besov() || is_tv(); }

  /// p for PPower, 2 for Quadratic; throws otherwise.
  double power() const;
  /// Conjugate exponent q = p/(p-1).
  double conjugate_power() const;
  double besov_s() const;
  const TvGrid& tv_grid() const;

  std::string describe() const;

 private:
  explicit Penalty(PenaltyKind kind) : kind_(kind) {}
  PenaltyKind kind_;
  std::shared_ptr<const TvGrid> grid_;
};

double penalty_eval(const Penalty& R, const CoefficientField& u);

/// R*(q); +infinity outside the dual unit ball for BesovOne. TV is rejected.
double conjugate_eval(const Penalty& R, const CoefficientField& q);

/// S(q) = max_l l^{1/2 - s} |q_l|, the dual of the B^s_{11} norm (d = 1).
double dual_norm_S(const CoefficientField& q, double s);

/// Warm-start state for the TV inner solver. Holds the dual variable p in [-1,1]^G.
struct TvProxState {
  std::vector<double> dual;
  std::size_t last_iterations = 0;
};

struct TvProxOptions {
  /// Stop once sqrt(2 * duality gap) (a bound on the distance to the exact
  /// prox point) drops below this value.
  double tolerance = 1e-11;
  std::size_t max_iter = 200000;
};

/// argmin_u 1/2 ||u - z||^2 + tau R(u).
CoefficientField prox(const Penalty& R, double tau, const CoefficientField& z);
/// Same, with explicit TV options and an optional warm-start state.
CoefficientField prox(const Penalty& R, double tau, const CoefficientField& z,
                      const TvProxOptions& tv_options, TvProxState* tv_state);

/// mu = K*(f - K u) / alpha.
CoefficientField subgradient_from_optimality(const SpectralOperator& K,
                                             const CoefficientField& f,
                                             const CoefficientField& u, double alpha);

/// Euclidean distance from g to the subdifferential of R at u (Quadratic,
/// PPower and BesovOne; TV is rejected because its subdifferential has no
/// componentwise form).
double subdifferential_distance(const Penalty& R, const CoefficientField& u,
                                const CoefficientField& g);

/// D(u, v) = R(u) - R(v) - <mu_v, u - v>.
double bregman(const Penalty& R, const CoefficientField& u, const CoefficientField& v,
               const CoefficientField& mu_v);
/// <mu_u - mu_v, u - v>.
double symmetric_bregman(const Penalty& R, const CoefficientField& u,
                         const CoefficientField& v, const CoefficientField& mu_u,
                         const CoefficientField& mu_v);

/// (j_p u)_l = |u_l|^{p-1} sign(u_l).
CoefficientField duality_map_jp(double p, const CoefficientField& u);

/// R(u - v) <= C_theta(u, v) * D_sym(u, v)^theta.
struct ScalingData {
  double theta;
  /// Arguments are R(u) and R(v).
  std::function<double(double, double)> c_theta;
};

ScalingData scaling_data(const Penalty& R);

}  // namespace largenoise
