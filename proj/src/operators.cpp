#include "largenoise/operators.hpp"

#include <algorithm>

#include "largenoise/errors.hpp"
#include "numeric_io.hpp"

namespace largenoise {

SpectralOperator::SpectralOperator(BasisSpec basis, std::vector<double> sigma,
                                   double t)
    : basis_(basis), sigma_(std::move(sigma)), smoothing_order_(t) {
  if (sigma_.size() != basis_.mode_count())
    throw InvalidArgument("SpectralOperator: multiplier count does not match basis");
  for (double s : sigma_)
    if (!(s > 0.0) || !std::isfinite(s))
      throw InvalidArgument("SpectralOperator: multipliers must be positive and finite");
  for (double s : sigma_) max_eigenvalue_ = std::max(max_eigenvalue_, s * s);
}

SpectralOperator SpectralOperator::power(const BasisSpec& basis, double t) {
  if (!std::isfinite(t)) throw InvalidArgument("SpectralOperator::power: t must be finite");
  std::vector<double> sigma(basis.mode_count());
  for (std::size_t l = 1; l <= basis.mode_count(); ++l)
    sigma[l - 1] = std::pow(basis.weight(l), -t);
  return {basis, std::move(sigma), t};
}

SpectralOperator SpectralOperator::from_multipliers(const BasisSpec& basis,
                                                    std::vector<double> sigma,
                                                    double smoothing_order) {
  return {basis, std::move(sigma), smoothing_order};
}

std::vector<double> SpectralOperator::eigenvalues() const {
  std::vector<double> lambda(sigma_.size());
  std::transform(sigma_.begin(), sigma_.end(), lambda.begin(),
                 [](double s) { return s * s; });
  return lambda;
}

bool SpectralOperator::is_hilbert_schmidt() const {
  if (std::isnan(smoothing_order_)) return false;
  return smoothing_order_ > 0.5 * basis_.dimension();
}

namespace {

template <class F>
CoefficientField map_modes(const SpectralOperator& op, const CoefficientField& u,
                           SpaceTag tag, F&& multiplier) {
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = multiplier(op.sigma(i)) * u[i];
  return {u.basis(), std::move(out), tag};
}

}  // namespace

CoefficientField apply(const SpectralOperator& op, const ApplyMode& mode,
                       const CoefficientField& u) {
  require_same_basis(op.basis(), u.basis(), "apply");
  return std::visit(
      [&](const auto& m) -> CoefficientField {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, apply_mode::Forward>) {
          return map_modes(op, u, SpaceTag::Y, [](double s) { return s; });
        } else if constexpr (std::is_same_v<M, apply_mode::Adjoint>) {
          return map_modes(op, u, SpaceTag::X, [](double s) { return s; });
        } else if constexpr (std::is_same_v<M, apply_mode::Normal>) {
          return map_modes(op, u, SpaceTag::X, [](double s) { return s * s; });
        } else if constexpr (std::is_same_v<M, apply_mode::Resolvent>) {
          if (!(m.beta > 0.0)) throw InvalidArgument("apply: resolvent needs beta > 0");
          return map_modes(op, u, SpaceTag::X,
                           [beta = m.beta](double s) { return 1.0 / (s * s + beta); });
        } else {
          if (!(m.mu > 0.0 && m.mu <= 0.5))
            throw InvalidArgument("apply: fractional power needs mu in (0, 1/2]");
          return map_modes(op, u, SpaceTag::X,
                           [mu = m.mu](double s) { return std::pow(s, 2.0 * mu); });
        }
      },
      mode);
}

double effective_dimension(const SpectralOperator& op, double beta) {
  if (!(beta > 0.0)) throw InvalidArgument("effective_dimension: beta must be > 0");
  std::vector<double> terms(op.sigma().size());
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const double lambda = op.sigma(i) * op.sigma(i);
    terms[i] = lambda / (lambda + beta);
  }
  return detail::pairwise_sum(terms);
}

double eigenvalue_tail_sum(const SpectralOperator& op, double m) {
  if (!(m > 0.0 && m <= 1.0))
    throw InvalidArgument("eigenvalue_tail_sum: m must lie in (0, 1]");
  std::vector<double> terms(op.sigma().size());
  for (std::size_t i = 0; i < terms.size(); ++i) terms[i] = std::pow(op.sigma(i), 2.0 * m);
  return detail::pairwise_sum(terms);
}

double trace_normal(const SpectralOperator& op) {
  return eigenvalue_tail_sum(op, 1.0);
}

}  // namespace largenoise
