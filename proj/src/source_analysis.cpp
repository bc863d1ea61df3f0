#include "largenoise/source_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "largenoise/errors.hpp"
#include "numeric_io.hpp"

namespace largenoise {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double sign(double x) { return (x > 0.0) - (x < 0.0); }

// Root of an increasing function on [lo, hi] (bracket assumed).
template <class F>
double increasing_root(F&& f, double lo, double hi) {
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (f(mid) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

// argmin_w  c/r |sigma w - theta|^r + lam/2 w^2 for r > 1, c, lam > 0.
// The minimizer lies between 0 and theta/sigma.
double scalar_power_fit(double sigma, double theta, double r, double c, double lam) {
  if (theta == 0.0) return 0.0;
  if (r == 2.0) return c * sigma * theta / (c * sigma * sigma + lam);
  const double end = theta / sigma;
  const double lo = std::min(0.0, end), hi = std::max(0.0, end);
  return increasing_root(
      [&](double w) {
        const double res = sigma * w - theta;
        return c * sigma * sign(res) * std::pow(std::abs(res), r - 1.0) + lam * w;
      },
      lo, hi);
}

void require_positive(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value))
    throw InvalidArgument(std::string(what) + " must be positive and finite");
}

double besov_weight(std::size_t mode, double s) {
  return std::pow(static_cast<double>(mode), s - 0.5);
}

void validate_grid(const std::vector<double>& grid) {
  if (grid.size() < 4) throw InvalidArgument("estimate_source_order: degenerate grid (need >= 4 points)");
  double lo = kInf, hi = 0.0;
  for (double g : grid) {
    if (!(g > 0.0) || !std::isfinite(g))
      throw InvalidArgument("estimate_source_order: grid values must be positive");
    lo = std::min(lo, g);
    hi = std::max(hi, g);
  }
  if (hi < 10.0 * lo)
    throw InvalidArgument("estimate_source_order: degenerate grid (must span one decade)");
}

}  // namespace

double e_value(const Penalty& R, const SpectralOperator& K, double alpha, double zeta,
               const CoefficientField& theta, const SolverOptions& opts) {
  require_positive(alpha, "e_value: alpha");
  require_positive(zeta, "e_value: zeta");
  require_same_basis(K.basis(), theta.basis(), "e_value");
  if (R.is_tv()) return e_dual_check(R, K, alpha, zeta, theta, opts);

  std::vector<double> terms(theta.size());
  if (R.is_quadratic()) {
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const double s = K.sigma(i);
      terms[i] = 0.5 * alpha * theta[i] * theta[i] / (s * s + alpha * zeta);
    }
  } else if (R.is_besov()) {
    const double s_exp = R.besov_s();
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const double excess = std::max(std::abs(theta[i]) - zeta * besov_weight(i + 1, s_exp), 0.0);
      const double w = excess / K.sigma(i);
      terms[i] = 0.5 * alpha * w * w;
    }
  } else {
    // zeta R*(q/zeta) = zeta^{1-q}/q |q|^q per mode, minimized in w mode by mode.
    const double q = R.conjugate_power();
    const double c = std::pow(zeta, 1.0 - q);
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const double s = K.sigma(i);
      const double w = scalar_power_fit(s, theta[i], q, c, alpha);
      terms[i] = c / q * std::pow(std::abs(s * w - theta[i]), q) + 0.5 * alpha * w * w;
    }
  }
  return detail::pairwise_sum(terms);
}

double e_dual_check(const Penalty& R, const SpectralOperator& K, double alpha, double zeta,
                    const CoefficientField& theta, const SolverOptions& opts) {
  require_positive(alpha, "e_dual_check: alpha");
  require_positive(zeta, "e_dual_check: zeta");
  require_same_basis(K.basis(), theta.basis(), "e_dual_check");
  // alpha F(v) = 1/2 ||Kv||^2 - <alpha theta, v> + alpha zeta R(v).
  SolverOptions iterative = opts;
  iterative.method = SolverMethod::Iterative;
  const CompositeResult res =
      minimize_composite(K, alpha * theta, alpha * zeta, R, iterative);
  return -res.value / alpha;
}

double distance_function(const SpectralOperator& K, const CoefficientField& theta, double rho,
                         double norm_exponent) {
  if (!(rho >= 0.0)) throw InvalidArgument("distance_function: rho must be >= 0");
  if (!(norm_exponent > 1.0))
    throw InvalidArgument("distance_function: norm_exponent must be > 1");
  require_same_basis(K.basis(), theta.basis(), "distance_function");
  const double r = norm_exponent;

  auto residual_norm = [&](const std::vector<double>& w) {
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i)
      sum += std::pow(std::abs(K.sigma(i) * w[i] - theta[i]), r);
    return std::pow(sum, 1.0 / r);
  };
  std::vector<double> w(theta.size(), 0.0);
  if (rho == 0.0) return residual_norm(w);

  double exact_sq = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double x = theta[i] / K.sigma(i);
    exact_sq += x * x;
  }
  if (std::sqrt(exact_sq) <= rho) return 0.0;

  auto fit_norm = [&](double lam) {
    double sq = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      w[i] = scalar_power_fit(K.sigma(i), theta[i], r, 1.0, lam);
      sq += w[i] * w[i];
    }
    return std::sqrt(sq);
  };
  // ||w(lambda)|| decreases in lambda; bracket the multiplier in log scale.
  double lo = 1.0, hi = 1.0;
  while (fit_norm(lo) < rho && lo > 1e-300) lo *= 1e-3;
  while (fit_norm(hi) > rho && hi < 1e300) hi *= 1e3;
  double log_lo = std::log(lo), log_hi = std::log(hi);
  for (int it = 0; it < 200 && log_hi - log_lo > 1e-14; ++it) {
    const double mid = 0.5 * (log_lo + log_hi);
    if (fit_norm(std::exp(mid)) > rho)
      log_lo = mid;
    else
      log_hi = mid;
  }
  fit_norm(std::exp(log_hi));  // feasible side
  return residual_norm(w);
}

SourceOrderEstimate estimate_source_order(const Penalty& R, const SpectralOperator& K,
                                          const CoefficientField& theta,
                                          const std::vector<double>& grid, OrderRoute route) {
  validate_grid(grid);
  require_same_basis(K.basis(), theta.basis(), "estimate_source_order");
  if (R.is_tv()) throw InvalidArgument("estimate_source_order: TV has no source functional here");

  SourceOrderEstimate est{};
  est.kind = R.is_besov() ? SourceKind::OneHomog : SourceKind::PHomog;
  est.grid = grid;
  est.fit_range = {*std::min_element(grid.begin(), grid.end()),
                   *std::max_element(grid.begin(), grid.end())};

  if (route == OrderRoute::DistanceFunction && est.kind == SourceKind::OneHomog)
    throw InvalidArgument("estimate_source_order: distance-function route needs a p-homogeneous penalty");

  for (double g : grid) {
    std::vector<double> terms(theta.size());
    if (route == OrderRoute::DistanceFunction) {
      est.values.push_back(distance_function(K, theta, g, R.conjugate_power()));
      continue;
    }
    if (est.kind == SourceKind::OneHomog) {
      // min ||w||^2 subject to S(theta - K*w) <= beta.
      const double s_exp = R.besov_s();
      for (std::size_t i = 0; i < terms.size(); ++i) {
        const double excess = std::max(std::abs(theta[i]) - g * besov_weight(i + 1, s_exp), 0.0);
        const double w = excess / K.sigma(i);
        terms[i] = w * w;
      }
    } else {
      // inf_w (1/beta) ||K*w - theta||_q^q + 1/2 ||w||^2.
      const double q = R.conjugate_power();
      for (std::size_t i = 0; i < terms.size(); ++i) {
        const double s = K.sigma(i);
        const double w = scalar_power_fit(s, theta[i], q, q / g, 1.0);
        terms[i] = std::pow(std::abs(s * w - theta[i]), q) / g + 0.5 * w * w;
      }
    }
    est.values.push_back(detail::pairwise_sum(terms));
  }

  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (est.values[i] > 0.0) {
      lx.push_back(std::log(grid[i]));
      ly.push_back(std::log(est.values[i]));
    }
  }
  if (lx.size() < 2) {
    // Identically zero: exact source (or reachable within the smallest rho).
    est.slope = 0.0;
    est.r_hat = 0.0;
    est.fit_residual = 0.0;
    return est;
  }
  const auto fit = detail::ordinary_least_squares(lx, ly);
  est.slope = fit.slope;
  est.fit_residual = fit.residual;
  if (route == OrderRoute::DistanceFunction) {
    // d_rho ~ rho^{-k}  <=>  r = 2 / (k q + 2).
    const double k = std::max(0.0, -fit.slope);
    est.r_hat = 2.0 / (k * R.conjugate_power() + 2.0);
  } else {
    est.r_hat = std::max(0.0, -fit.slope);
  }
  return est;
}

BalancedZeta balance_zeta(double a, double b, double s, double t) {
  require_positive(a, "balance_zeta: a");
  require_positive(b, "balance_zeta: b");
  require_positive(s, "balance_zeta: s");
  require_positive(t, "balance_zeta: t");
  const double z = std::pow(b * t / (a * s), 1.0 / (s + t));
  return {z, a * std::pow(z, s) + b * std::pow(z, -t)};
}

std::string to_string(RateSetting setting) {
  switch (setting) {
    case RateSetting::OneHomog: return "one-homog";
    case RateSetting::PHomog: return "p-homog";
    case RateSetting::Quadratic: return "quadratic";
    case RateSetting::GaussianTrace: return "gaussian-trace";
    case RateSetting::GaussianEigen: return "gaussian-eigen";
    case RateSetting::Besov: return "besov";
    case RateSetting::TV: return "tv";
  }
  return "unknown";
}

RateSetting rate_setting_from_string(const std::string& name) {
  for (auto s : {RateSetting::OneHomog, RateSetting::PHomog, RateSetting::Quadratic,
                 RateSetting::GaussianTrace, RateSetting::GaussianEigen, RateSetting::Besov,
                 RateSetting::TV})
    if (to_string(s) == name) return s;
  throw InvalidArgument("unknown rate setting '" + name + "'");
}

RateRule kappa_rule(const RateInputs& in) {
  const double r1 = in.r1, r2 = in.r2;
  auto need = [](bool ok, const std::string& condition) {
    if (!ok) throw HypothesisViolation("hypothesis violated: " + condition);
  };
  need(r1 >= 0.0 && std::isfinite(r1), "r1 >= 0");
  need(r2 >= 0.0 && std::isfinite(r2), "r2 >= 0");

  double kappa = 1.0, exponent = 1.0;
  switch (in.setting) {
    case RateSetting::OneHomog:
      if (r1 <= r2) {
        kappa = (1 + r1) * (2 + r2) / ((2 + r1) * (1 + r2));
        exponent = (2 + r2) / ((2 + r1) * (1 + r2));
      } else {
        exponent = 1.0 / (1 + r1);
      }
      break;
    case RateSetting::PHomog:
    case RateSetting::Quadratic: {
      const double p = in.setting == RateSetting::Quadratic ? 2.0 : in.p;
      need(p > 1.0, "p > 1");
      need(r1 < 1.0, "r1 < 1");
      if (p < 2.0) {
        const double q = p / (p - 1.0);
        const double nu1 = 2 + r1 * (q - 2), nu2 = 2 + r2 * (q - 2);
        if (r1 <= r2) {
          kappa = nu1 * nu2 / (nu1 * nu2 + q * (r2 - r1));
          exponent = 2 * nu2 * (1 - r1) / (nu1 * nu2 + q * (r2 - r1));
        } else {
          exponent = 2 * (1 - r1) / (2 + r1 * (q - 2));
        }
      } else if (r1 <= r2) {
        kappa = 2.0 / (2 + r2 - r1);
        exponent = 2 * (1 - r1) / (2 + r2 - r1);
      } else {
        exponent = 1 - r1;
      }
      break;
    }
    case RateSetting::GaussianTrace:
      kappa = exponent = 2.0 / 3.0;
      break;
    case RateSetting::GaussianEigen:
      need(in.m > 0.0 && in.m <= 1.0, "0 < m <= 1");
      kappa = exponent = 2.0 / (2.0 + in.m);
      break;
    case RateSetting::Besov: {
      const double s = in.s, t = in.t;
      need(std::min(s, 2 * t) > 1.0, "min(s, 2t) > 1");
      if (r1 <= 2.0 / (2 * s + 2 * t - 1)) {
        kappa = (1 + r1) / (2 + r1) * (4 * s + 4 * t) / (2 * s + 2 * t + 1);
        exponent = 4 * (s + t) / ((2 + r1) * (2 * s + 2 * t + 1));
      } else {
        exponent = 1.0 / (1 + r1);
      }
      break;
    }
    case RateSetting::TV: {
      need(in.eps > 0.0, "eps > 0");
      need(in.d >= 1.0, "d >= 1");
      need(in.t > in.d / 2 + in.eps, "t > d/2 + eps");
      const double nu = (in.t - in.d / 2 - in.eps) / (2 * in.t);
      if (r1 <= (in.d + 2 * in.eps) / in.t) {
        kappa = (1 + r1) / ((2 + r1) * (1 - nu));
        exponent = 1.0 / ((2 + r1) * (1 - nu));
      } else {
        exponent = 1.0 / (1 + r1);
      }
      break;
    }
  }
  return {in.setting, r1, r2, kappa, exponent};
}

double apriori_bound(const Penalty& R, const SpectralOperator& K, double alpha, double delta,
                     const CoefficientField& u_true, const CoefficientField& w, double gamma,
                     const CoefficientField& eta) {
  require_positive(alpha, "apriori_bound: alpha");
  if (!(delta >= 0.0)) throw InvalidArgument("apriori_bound: delta must be >= 0");
  if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("apriori_bound: gamma must lie in (0,1)");
  require_same_basis(K.basis(), w.basis(), "apriori_bound");
  require_same_basis(K.basis(), eta.basis(), "apriori_bound");

  const double wn = l2_norm(w);
  double bound = (1 + gamma) / (1 - gamma) * penalty_eval(R, u_true) +
                 delta * delta / (2 * alpha * (1 - gamma)) * wn * wn;
  const CoefficientField arg =
      (delta / (alpha * gamma)) * (apply(K, apply_mode::Adjoint{}, w) - eta);
  double conj;
  if (R.is_tv()) {
    // R*(0) = 0; elsewhere the conjugate is not evaluated.
    conj = std::all_of(arg.coeffs().begin(), arg.coeffs().end(), [](double c) { return c == 0.0; })
               ? 0.0
               : kInf;
  } else {
    conj = conjugate_eval(R, arg);
  }
  if (conj == kInf) return kInf;
  return bound + 2 * gamma / (1 - gamma) * conj;
}

double embedding_bound(double omega_norm, double mu_exp, double zeta, double alpha, double p,
                       double constant) {
  if (!(mu_exp > 0.0 && mu_exp < 0.5))
    throw InvalidArgument("embedding_bound: mu_exp must lie in (0, 1/2)");
  if (!(omega_norm >= 0.0)) throw InvalidArgument("embedding_bound: omega_norm must be >= 0");
  require_positive(zeta, "embedding_bound: zeta");
  require_positive(alpha, "embedding_bound: alpha");
  if (!(p >= 1.0)) throw InvalidArgument("embedding_bound: p must be >= 1");
  const double den = p - 1 + 2 * mu_exp - p * mu_exp;
  if (!(den > 0.0)) throw InvalidArgument("embedding_bound: exponent denominator must be positive");
  return constant * std::pow(omega_norm, p / den) * std::pow(zeta, -(1 - 2 * mu_exp) / den) *
         std::pow(alpha, p * mu_exp / den);
}

EmbeddingWitness embedding_witness(const Penalty& R, const SpectralOperator& K,
                                   const CoefficientField& theta, double mu_exp) {
  if (!R.is_one_homogeneous())
    throw InvalidArgument("embedding_witness: needs a one-homogeneous penalty");
  if (!(mu_exp > 0.0 && mu_exp < 0.5))
    throw InvalidArgument("embedding_witness: mu_exp must lie in (0, 1/2)");
  require_same_basis(K.basis(), theta.basis(), "embedding_witness");

  double c = 1.0;  // B^s_11 with s >= 1/2 dominates the l2 norm
  std::size_t first = 0;
  if (R.is_tv()) {
    // ||B v||_1 >= ||B v||_2 >= 2 sqrt(G) sin(pi/G) ||v|| off the constant mode.
    const double g = static_cast<double>(R.tv_grid().grid_size());
    c = 2.0 * std::sqrt(g) * std::sin(std::numbers::pi / g);
    first = 1;
  }
  double sq = 0.0;
  for (std::size_t i = first; i < theta.size(); ++i) {
    const double om = theta[i] / std::pow(K.sigma(i), 2.0 * mu_exp);
    sq += om * om;
  }
  // Exact minimization of a^2/(2 alpha) - omega a^{2mu} b^{1-2mu} + zeta c b.
  const double constant =
      2.0 * mu_exp * mu_exp * std::pow((1 - 2 * mu_exp) / c, (1 - 2 * mu_exp) / mu_exp);
  return {std::sqrt(sq), constant, c};
}

namespace {

struct EvaluatedTerms {
  double theta;
  double c_theta;
};

EvaluatedTerms scaling_at(const Penalty& R, const MinimizerResult& result,
                          const CoefficientField& u_true) {
  const ScalingData sd = scaling_data(R);
  return {sd.theta, sd.c_theta(penalty_eval(R, result.u), penalty_eval(R, u_true))};
}

// Noise e-term of the embedding variant: the bound on the part R controls
// plus, for TV, the exactly minimized constant mode.
double embedding_noise_term(const Penalty& R, const SpectralOperator& K, double delta,
                            double zeta2, const CoefficientField& eta,
                            const bound_variant::Embedding& emb) {
  double value = embedding_bound(emb.omega_norm, emb.mu_exp, zeta2, delta, 1.0, emb.constant);
  if (R.is_tv()) value += delta * eta[0] * eta[0] / (2.0 * K.sigma(0) * K.sigma(0));
  return value;
}

}  // namespace

ErrorBoundReport error_bound_eval(const Penalty& R, const SpectralOperator& K, double alpha,
                                  double delta, double zeta1, double zeta2,
                                  const CoefficientField& mu_dag, const CoefficientField& eta,
                                  const MinimizerResult& result,
                                  const CoefficientField& u_true, const BoundVariant& variant,
                                  const SolverOptions& opts) {
  require_positive(alpha, "error_bound_eval: alpha");
  if (!(delta >= 0.0)) throw InvalidArgument("error_bound_eval: delta must be >= 0");
  require_positive(zeta1, "error_bound_eval: zeta1");
  require_positive(zeta2, "error_bound_eval: zeta2");

  const auto [theta, c] = scaling_at(R, result, u_true);
  const CoefficientField d = result.u - u_true;
  const double dsym = dual_pairing(result.mu - mu_dag, d);
  const double kd = l2_norm(apply(K, apply_mode::Forward{}, d));

  ErrorBoundReport rep{};
  rep.theta = theta;
  rep.c_theta = c;

  if (std::holds_alternative<bound_variant::WithResidual>(variant)) {
    rep.e_source = e_value(R, K, 2 * alpha, zeta1, mu_dag, opts);
    rep.e_noise = delta > 0.0 ? e_value(R, K, 2 * delta, zeta2, eta, opts) : 0.0;
    const double wsum = alpha * zeta1 + delta * zeta2;
    const double tail = 2 * alpha * rep.e_source + 2 * delta * rep.e_noise;
    if (theta == 1.0) {
      const double coeff = 2 * alpha - 2 * wsum * c;
      if (!(coeff > 0.0))
        throw InvalidArgument("error_bound_eval: constraint set empty (2 alpha <= 2 (alpha zeta1 + delta zeta2) C)");
      rep.measured = kd * kd + coeff * dsym;
      rep.bound = tail;
    } else {
      rep.measured = kd * kd + (2 * alpha - theta) * dsym;
      rep.bound = (1 - theta) * std::pow(2 * wsum * c, 1.0 / (1 - theta)) + tail;
    }
  } else {
    rep.e_source = e_value(R, K, alpha, zeta1, mu_dag, opts);
    if (const auto* emb = std::get_if<bound_variant::Embedding>(&variant)) {
      if (!R.is_one_homogeneous())
        throw InvalidArgument("error_bound_eval: embedding variant needs a one-homogeneous penalty");
      rep.e_noise = delta > 0.0 ? embedding_noise_term(R, K, delta, zeta2, eta, *emb) : 0.0;
    } else {
      rep.e_noise = delta > 0.0 ? e_value(R, K, delta, zeta2, eta, opts) : 0.0;
    }
    const double z = zeta1 + delta * zeta2 / alpha;
    const double e = rep.e_source + delta / alpha * rep.e_noise;
    if (theta == 1.0) {
      if (!(z * c < 1.0))
        throw InvalidArgument("error_bound_eval: constraint set empty ((zeta1 + delta zeta2/alpha) C >= 1)");
      rep.bound = e / (1 - z * c);
    } else {
      rep.bound = std::pow(z * c, 1.0 / (1 - theta)) + e / (1 - theta);
    }
    rep.measured = dsym;
  }
  // Rounding allowance for the inner products that form the measured side.
  rep.holds = rep.measured <= rep.bound + 1e-9 * (1.0 + std::abs(rep.bound));
  return rep;
}

namespace {

// zeta minimizing a zeta^s + e(zeta), with e approximated by b zeta^{-t}
// fitted from e(0.5) and e(2).
template <class E>
double balance_against(double a, double s, E&& e) {
  if (!(a > 0.0)) return 1e12;  // nothing penalizes large zeta; e is nonincreasing
  const double lo = e(0.5), hi = e(2.0);
  if (!(lo > 0.0)) return 0.5;
  double t = hi > 0.0 ? std::log(lo / hi) / std::log(4.0) : 50.0;
  t = std::max(t, 1e-3);
  const double b = lo * std::pow(0.5, t);
  return std::clamp(balance_zeta(a, b, s, t).zeta_star, 1e-12, 1e12);
}

}  // namespace

std::pair<double, double> balanced_zetas(const Penalty& R, const SpectralOperator& K,
                                         double alpha, double delta,
                                         const CoefficientField& mu_dag,
                                         const CoefficientField& eta,
                                         const MinimizerResult& result,
                                         const CoefficientField& u_true,
                                         const BoundVariant& variant,
                                         const SolverOptions& opts) {
  const auto [theta, c] = scaling_at(R, result, u_true);
  if (theta == 1.0) {
    const double z1 = 0.25 / c;
    const double z2 = delta > 0.0 ? alpha / (4.0 * delta * c) : 1.0;
    return {z1, z2};
  }
  const double s = 1.0 / (1.0 - theta);
  const bool residual = std::holds_alternative<bound_variant::WithResidual>(variant);
  const double src_alpha = residual ? 2 * alpha : alpha;
  const double src_scale = residual ? 2 * alpha : 1.0 / (1.0 - theta);
  const double src_a = residual ? (1 - theta) * std::pow(2 * alpha * c, s) : std::pow(c, s);
  const double z1 = balance_against(src_a, s, [&](double z) {
    return src_scale * e_value(R, K, src_alpha, z, mu_dag, opts);
  });
  if (!(delta > 0.0)) return {z1, 1.0};

  double z2;
  if (const auto* emb = std::get_if<bound_variant::Embedding>(&variant)) {
    const double scale = delta / alpha / (1.0 - theta);
    const double b = scale * emb->constant * std::pow(emb->omega_norm, 1.0 / emb->mu_exp) * delta;
    const double t = (1 - 2 * emb->mu_exp) / emb->mu_exp;
    const double a = std::pow(delta / alpha * c, s);
    z2 = b > 0.0 && a > 0.0 ? std::clamp(balance_zeta(a, b, s, t).zeta_star, 1e-12, 1e12) : 1.0;
  } else {
    const double noise_alpha = residual ? 2 * delta : delta;
    const double noise_scale = residual ? 2 * delta : delta / alpha / (1.0 - theta);
    const double noise_a = residual ? (1 - theta) * std::pow(2 * delta * c, s)
                                    : std::pow(delta / alpha * c, s);
    z2 = balance_against(noise_a, s, [&](double z) {
      return noise_scale * e_value(R, K, noise_alpha, z, eta, opts);
    });
  }
  return {z1, z2};
}

}  // namespace largenoise
