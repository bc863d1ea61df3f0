#include <doctest.h>

#include <cmath>

#include "generators.hpp"
#include "largenoise/errors.hpp"
#include "largenoise/operators.hpp"

using namespace largenoise;

namespace {

SpectralOperator explicit_op(std::vector<double> sigma) {
  const BasisSpec b(1, sigma.size());
  return SpectralOperator::from_multipliers(b, std::move(sigma));
}

}  // namespace

TEST_CASE("apply examples") {
  const auto K = SpectralOperator::power(BasisSpec(1, 4), 1.0);
  const auto y = apply(K, apply_mode::Forward{}, CoefficientField::unit(K.basis(), 2));
  CHECK(y[1] == 0.5);
  CHECK(y[0] == 0.0);

  const auto I = explicit_op({1.0, 1.0});
  CHECK(apply(I, apply_mode::Resolvent{1.0}, CoefficientField::unit(I.basis(), 1))[0] == 0.5);

  gen::Source g(21);
  const auto R = g.op(BasisSpec(1, 6), 0.01, 3.0);
  for (std::size_t l = 1; l <= 6; ++l) {
    const auto v = apply(R, apply_mode::FracPower{0.5}, CoefficientField::unit(R.basis(), l));
    CHECK(v[l - 1] == doctest::Approx(R.sigma(l - 1)).epsilon(1e-15));
  }
}

TEST_CASE("apply rejects bad parameters and bases") {
  const auto K = explicit_op({1.0, 2.0});
  const auto u = CoefficientField::unit(K.basis(), 1);
  CHECK_THROWS_AS(apply(K, apply_mode::Resolvent{0.0}, u), InvalidArgument);
  CHECK_THROWS_AS(apply(K, apply_mode::Resolvent{-1.0}, u), InvalidArgument);
  CHECK_THROWS_AS(apply(K, apply_mode::FracPower{0.0}, u), InvalidArgument);
  CHECK_THROWS_AS(apply(K, apply_mode::FracPower{0.6}, u), InvalidArgument);
  CHECK_THROWS_AS(apply(K, apply_mode::Forward{}, CoefficientField::unit(BasisSpec(1, 3), 1)),
                  BasisMismatch);
  CHECK_THROWS_AS(explicit_op({1.0, 0.0}), InvalidArgument);
  CHECK_THROWS_AS(explicit_op({1.0, -1.0}), InvalidArgument);
}

TEST_CASE("normal operator is sigma squared and the adjoint matches the forward map") {
  const auto K = explicit_op({2.0, 0.5});
  const auto u = CoefficientField(K.basis(), {1.0, 4.0});
  const auto n = apply(K, apply_mode::Normal{}, u);
  CHECK(n[0] == 4.0);
  CHECK(n[1] == 1.0);
}

TEST_CASE("effective_dimension examples") {
  CHECK(effective_dimension(explicit_op({1, 1, 1}), 1.0) == doctest::Approx(1.5));
  const auto K = explicit_op({1.0, 0.5, 1.0 / 3.0});
  CHECK(effective_dimension(K, 1e-12) == doctest::Approx(3.0).epsilon(1e-9));
  // direct summation: 1/2 + (1/4)/(5/4) + (1/9)/(10/9)
  CHECK(effective_dimension(K, 1.0) == doctest::Approx(0.5 + 0.2 + 0.1).epsilon(1e-15));
  CHECK_THROWS_AS(effective_dimension(K, 0.0), InvalidArgument);
}

TEST_CASE("eigenvalue_tail_sum examples") {
  CHECK(eigenvalue_tail_sum(explicit_op({1, 1}), 1.0) == 2.0);
  CHECK(eigenvalue_tail_sum(explicit_op({1, 0.5}), 0.5) == doctest::Approx(1.5));
  CHECK_THROWS_AS(eigenvalue_tail_sum(explicit_op({1}), 0.0), InvalidArgument);
  CHECK_THROWS_AS(eigenvalue_tail_sum(explicit_op({1}), 1.5), InvalidArgument);

  // lambda_j = j^{-2}, N = 1000, m = 0.6: sum of j^{-1.2}. The plain integral
  // over [1, N] misses the endpoint mass by ~14%; with the trapezoid endpoint
  // correction (f(1) + f(N))/2 it is within 5%.
  const auto K = SpectralOperator::power(BasisSpec(1, 1000), 1.0);
  const double sum = eigenvalue_tail_sum(K, 0.6);
  const double integral = (1.0 - std::pow(1000.0, -0.2)) / 0.2;
  const double corrected = integral + 0.5 * (1.0 + std::pow(1000.0, -1.2));
  CHECK(std::abs(sum - corrected) <= 0.05 * corrected);
  CHECK(sum >= integral);  // decreasing integrand: the sum dominates the integral
  CHECK(trace_normal(K) == doctest::Approx(eigenvalue_tail_sum(K, 1.0)));
}

TEST_CASE("hilbert-schmidt metadata") {
  CHECK(SpectralOperator::power(BasisSpec(1, 8), 1.0).is_hilbert_schmidt());
  CHECK_FALSE(SpectralOperator::power(BasisSpec(1, 8), 0.5).is_hilbert_schmidt());
  CHECK(SpectralOperator::power(BasisSpec(2, 8), 1.5).is_hilbert_schmidt());
  CHECK_FALSE(SpectralOperator::power(BasisSpec(2, 8), 1.0).is_hilbert_schmidt());
  CHECK_FALSE(explicit_op({1.0}).is_hilbert_schmidt());
}

TEST_CASE("property: adjoint identity and resolvent inverse") {
  gen::Source g(22);
  for (int trial = 0; trial < 100; ++trial) {
    const BasisSpec b(1, g.size(1, 40));
    const auto K = g.op(b, 1e-3, 10.0);
    const auto u = g.field(b), v = g.field(b);
    CHECK(dual_pairing(apply(K, apply_mode::Forward{}, u), v) ==
          doctest::Approx(dual_pairing(u, apply(K, apply_mode::Adjoint{}, v))).epsilon(1e-14));
    const double beta = g.log_uniform(1e-4, 1e2);
    const auto r = apply(K, apply_mode::Resolvent{beta}, u);
    const auto back = apply(K, apply_mode::Normal{}, r) + beta * r;
    for (std::size_t i = 0; i < b.mode_count(); ++i)
      CHECK(back[i] == doctest::Approx(u[i]).epsilon(1e-13).scale(1.0));
  }
}

TEST_CASE("property: effective dimension bounds") {
  gen::Source g(23);
  for (int trial = 0; trial < 100; ++trial) {
    const BasisSpec b(1, g.size(1, 200));
    const auto K = g.op(b, 1e-4, 3.0);
    const double beta = g.log_uniform(1e-5, 1e2);
    const double n_eff = effective_dimension(K, beta);
    double trace = 0.0;
    for (double s : K.sigma()) trace += s * s;
    CHECK(n_eff > 0.0);
    CHECK(n_eff <= std::min(static_cast<double>(b.mode_count()), trace / beta) * (1 + 1e-12));
    CHECK(effective_dimension(K, 2.0 * beta) < n_eff);

    // Young: lambda/(lambda+beta) <= p^{-1/p} (lambda/beta)^m, p = 1/(1-m).
    for (double m : {0.5, 0.8, 1.0}) {
      const double young = m == 1.0 ? 1.0 : std::pow(1.0 / (1.0 - m), -(1.0 - m));
      CHECK(n_eff <= std::pow(beta, -m) * young * eigenvalue_tail_sum(K, m) * (1 + 1e-12));
    }
  }
}
