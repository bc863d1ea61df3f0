#include "largenoise/solvers.hpp"

#include <cmath>
#include <vector>

#include "largenoise/errors.hpp"

namespace largenoise {

namespace {

double composite_value(const SpectralOperator& K, const CoefficientField& b,
                       double lambda, const Penalty& R, const CoefficientField& v) {
  double smooth = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double s = K.sigma(i);
    smooth += 0.5 * s * s * v[i] * v[i] - b[i] * v[i];
  }
  return smooth + lambda * penalty_eval(R, v);
}

// x - t (S x - b), S = diag(sigma^2).
CoefficientField forward_step(const SpectralOperator& K, const CoefficientField& b,
                              double t, const CoefficientField& x) {
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = K.sigma(i);
    out[i] = x[i] - t * (s * s * x[i] - b[i]);
  }
  return {x.basis(), std::move(out), SpaceTag::X};
}

// ||(1/t)(I - tS)(x - x_next)||: bounds dist(-grad f(x_next), lambda dR(x_next)).
double step_certificate(const SpectralOperator& K, double t, const CoefficientField& x,
                        const CoefficientField& x_next) {
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = K.sigma(i);
    const double r = (1.0 / t - s * s) * (x[i] - x_next[i]);
    sum += r * r;
  }
  return std::sqrt(sum);
}

}  // namespace

CompositeResult minimize_composite(const SpectralOperator& K, const CoefficientField& b,
                                   double lambda, const Penalty& R,
                                   const SolverOptions& opts) {
  require_same_basis(K.basis(), b.basis(), "minimize_composite");
  if (!(lambda > 0.0)) throw InvalidArgument("minimize_composite: lambda must be > 0");

  if (R.is_quadratic() && opts.method == SolverMethod::Auto) {
    std::vector<double> v(b.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double s = K.sigma(i);
      v[i] = b[i] / (s * s + lambda);
    }
    CoefficientField field(b.basis(), std::move(v), SpaceTag::X);
    const double value = composite_value(K, b, lambda, R, field);
    return {std::move(field), value, 0, 0.0};
  }

  const double t = opts.step_factor / K.max_eigenvalue();
  TvProxState tv_state;
  TvProxState* state = R.is_tv() ? &tv_state : nullptr;

  CoefficientField x = CoefficientField::zeros(b.basis(), SpaceTag::X);
  CoefficientField y = x;
  double value = composite_value(K, b, lambda, R, x);
  double momentum = 1.0;

  for (std::size_t it = 1; it <= opts.max_iter; ++it) {
    const CoefficientField& base = opts.accelerated ? y : x;
    CoefficientField next = prox(R, t * lambda, forward_step(K, b, t, base), opts.tv, state);
    const double residual = step_certificate(K, t, base, next);
    const double next_value = composite_value(K, b, lambda, R, next);

    if (!opts.accelerated) {
      // Inexact TV prox steps can raise the objective by roughly the inner tolerance.
      const double slack = 1e-10 * (1.0 + std::abs(value));
      if (next_value > value + slack)
        throw ConvergenceError("proximal gradient: objective increased (divergence)");
    } else {
      const double m_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      y = next + ((momentum - 1.0) / m_next) * (next - x);
      momentum = m_next;
    }
    x = std::move(next);
    value = next_value;
    if (residual <= opts.tol) return {x, value, it, residual};
  }
  throw ConvergenceError("proximal gradient: iteration cap reached");
}

MinimizerResult solve_variational(const SpectralOperator& K, const CoefficientField& f,
                                  double alpha, const Penalty& R, const SolverOptions& opts) {
  if (!(alpha > 0.0)) throw InvalidArgument("solve_variational: alpha must be > 0");
  require_same_basis(K.basis(), f.basis(), "solve_variational");
  const CoefficientField b = apply(K, apply_mode::Adjoint{}, f);
  CompositeResult core = minimize_composite(K, b, alpha, R, opts);
  CoefficientField mu = subgradient_from_optimality(K, f, core.v, alpha);
  const double residual = R.is_tv() ? core.residual
                                    : verify_optimality(K, f, alpha, R, core.v, opts);
  return {std::move(core.v), std::move(mu), core.value, core.iterations, residual};
}

double objective_eval(const SpectralOperator& K, const CoefficientField& f, double alpha,
                      const Penalty& R, const CoefficientField& u) {
  require_same_basis(K.basis(), f.basis(), "objective_eval");
  require_same_basis(K.basis(), u.basis(), "objective_eval");
  double smooth = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double ku = K.sigma(i) * u[i];
    smooth += 0.5 * ku * ku - ku * f[i];
  }
  return smooth + alpha * penalty_eval(R, u);
}

double verify_optimality(const SpectralOperator& K, const CoefficientField& f,
                         double alpha, const Penalty& R, const CoefficientField& u,
                         const SolverOptions& opts) {
  if (!(alpha > 0.0)) throw InvalidArgument("verify_optimality: alpha must be > 0");
  require_same_basis(K.basis(), f.basis(), "verify_optimality");
  require_same_basis(K.basis(), u.basis(), "verify_optimality");
  const CoefficientField b = apply(K, apply_mode::Adjoint{}, f);
  if (R.is_tv()) {
    const double t = opts.step_factor / K.max_eigenvalue();
    const CoefficientField mapped = prox(R, t * alpha, forward_step(K, b, t, u), opts.tv, nullptr);
    return l2_norm(u - mapped) / t;
  }
  // -grad f(u) / alpha, compared against dR(u); scale back by alpha.
  std::vector<double> g(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double s = K.sigma(i);
    g[i] = (b[i] - s * s * u[i]) / alpha;
  }
  return alpha * subdifferential_distance(R, u, CoefficientField(u.basis(), std::move(g)));
}

}  // namespace largenoise
