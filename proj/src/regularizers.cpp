#include "largenoise/regularizers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "largenoise/errors.hpp"
#include "numeric_io.hpp"

namespace largenoise {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kEps = std::numeric_limits<double>::epsilon();

// Threshold weight l^{s-1/2} of the B^s_{11} norm.
double besov_weight(std::size_t mode, double s) {
  return std::pow(static_cast<double>(mode), s - 0.5);
}

double sign(double x) { return (x > 0.0) - (x < 0.0); }

// Solves u + tau u^{p-1} = a on [0, a] for a >= 0 by bisection.
double p_power_shrink(double a, double tau, double p) {
  if (a == 0.0) return 0.0;
  double lo = 0.0, hi = a;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid + tau * std::pow(mid, p - 1.0) > a)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

CoefficientField prox_tv(const TvGrid& grid, double tau, const CoefficientField& z,
                         const TvProxOptions& opts, TvProxState* state) {
  const std::size_t g = grid.grid_size();
  const double norm_sq = grid.operator_norm_sq();
  if (norm_sq == 0.0) return z;  // single constant mode: TV vanishes identically

  TvProxState local;
  TvProxState& st = state ? *state : local;
  if (st.dual.size() != g) st.dual.assign(g, 0.0);

  const auto zc = z.coeffs();
  const double scale = 1.0 + l2_norm(z);
  const double step = 1.0 / (tau * norm_sq);

  // Large tau: the prox is the projection onto constants exactly when some
  // |p| <= 1 has tau B^T p = z - z_1. The least-squares p = B (B^T B)^+ (z - z_1) / tau
  // is one candidate; B^T B is diagonal, so trying it is cheap, and it spares
  // the dual iteration a regime where it only converges to within tau * eps.
  {
    const auto gram = grid.gram_diagonal();
    std::vector<double> r(zc.size(), 0.0);
    for (std::size_t j = 1; j < zc.size(); ++j) r[j] = zc[j] / (tau * gram[j]);
    const auto candidate = grid.differences(r);
    double sup = 0.0;
    for (double c : candidate) sup = std::max(sup, std::abs(c));
    if (sup <= 1.0) {
      std::vector<double> u(zc.size(), 0.0);
      u[0] = zc[0];
      st.dual = candidate;
      st.last_iterations = 0;
      return {z.basis(), u, z.tag()};
    }
  }

  std::vector<double> p = st.dual, y = p, p_prev = p;
  std::vector<double> u(zc.size());
  auto primal_from = [&](const std::vector<double>& dual) {
    const auto bt = grid.differences_adjoint(dual);
    for (std::size_t j = 0; j < u.size(); ++j) u[j] = zc[j] - tau * bt[j];
  };
  // Duality gap at p, and the rounding error of computing it: when the gap is
  // below that floor no further iteration can certify anything.
  double gap = 0.0, gap_floor = 0.0;
  auto measure_gap = [&]() {
    primal_from(p);
    const auto bu = grid.differences(u);
    double l1 = 0.0, pair = 0.0;
    for (std::size_t i = 0; i < g; ++i) {
      l1 += std::abs(bu[i]);
      pair += bu[i] * p[i];
    }
    gap = std::max(0.0, tau * (l1 - pair));
    gap_floor = 4.0 * static_cast<double>(g) * kEps * tau * (l1 + std::abs(pair) + scale);
  };

  double momentum = 1.0;
  for (std::size_t it = 0; it < opts.max_iter; ++it) {
    // sqrt(2 gap) bounds the primal error. The gap bottoms out around 1e-16,
    // so its square root cannot certify much below 1e-8 on its own.
    if (it % 8 == 0) measure_gap();
    if (it % 8 == 0 && (std::sqrt(2.0 * gap) <= opts.tolerance * scale || gap <= gap_floor)) {
      st.dual = p;
      st.last_iterations = it;
      return {z.basis(), u, z.tag()};
    }
    primal_from(y);
    const auto bu = grid.differences(u);
    p_prev.swap(p);
    double restart = 0.0;
    for (std::size_t i = 0; i < g; ++i) {
      p[i] = std::clamp(y[i] + step * bu[i], -1.0, 1.0);
      restart += (y[i] - p[i]) * (p[i] - p_prev[i]);
    }
    // Gradient restart: drop the momentum as soon as it points uphill. On this
    // polyhedral dual it turns the sublinear FISTA tail into a linear one.
    if (restart > 0.0) momentum = 1.0;
    const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
    const double beta = (momentum - 1.0) / next;
    momentum = next;
    for (std::size_t i = 0; i < g; ++i) y[i] = p[i] + beta * (p[i] - p_prev[i]);
  }
  throw ConvergenceError("TV prox: inner dual iteration did not reach tolerance");
}

}  // namespace

Penalty Penalty::quadratic() { return Penalty(penalty_kind::Quadratic{}); }

Penalty Penalty::p_power(double p) {
  if (!(p > 1.0) || !std::isfinite(p)) throw InvalidArgument("PPower: p must be > 1");
  return Penalty(penalty_kind::PPower{p});
}

Penalty Penalty::besov_one(double s) {
  if (!(s >= 0.5) || !std::isfinite(s))
    throw InvalidArgument("BesovOne: s must be >= 1/2");
  return Penalty(penalty_kind::BesovOne{s});
}

Penalty Penalty::total_variation(const BasisSpec& basis, std::size_t grid_size) {
  Penalty pen(penalty_kind::TotalVariation{grid_size});
  pen.grid_ = std::make_shared<const TvGrid>(basis, grid_size);
  return pen;
}

bool Penalty::is_quadratic() const {
  return std::holds_alternative<penalty_kind::Quadratic>(kind_);
}
bool Penalty::is_p_power() const { return std::holds_alternative<penalty_kind::PPower>(kind_); }
bool Penalty::is_besov() const { return std::holds_alternative<penalty_kind::BesovOne>(kind_); }
bool Penalty::is_tv() const {
  return std::holds_alternative<penalty_kind::TotalVariation>(kind_);
}

double Penalty::power() const {
  if (is_quadratic()) return 2.0;
  if (is_p_power()) return std::get<penalty_kind::PPower>(kind_).p;
  throw InvalidArgument("Penalty::power: only Quadratic and PPower have an exponent");
}

double Penalty::conjugate_power() const {
  const double p = power();
  return p / (p - 1.0);
}

double Penalty::besov_s() const {
  if (!is_besov()) throw InvalidArgument("Penalty::besov_s: not a BesovOne penalty");
  return std::get<penalty_kind::BesovOne>(kind_).s;
}

const TvGrid& Penalty::tv_grid() const {
  if (!grid_) throw InvalidArgument("Penalty::tv_grid: not a TV penalty");
  return *grid_;
}

std::string Penalty::describe() const {
  std::ostringstream out;
  std::visit(
      [&](const auto& k) {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, penalty_kind::Quadratic>)
          out << "quadratic";
        else if constexpr (std::is_same_v<T, penalty_kind::PPower>)
          out << "ppower(p=" << detail::format_double(k.p) << ")";
        else if constexpr (std::is_same_v<T, penalty_kind::BesovOne>)
          out << "besov1(s=" << detail::format_double(k.s) << ")";
        else
          out << "tv(grid=" << k.grid_size << ")";
      },
      kind_);
  return out.str();
}

double penalty_eval(const Penalty& R, const CoefficientField& u) {
  return std::visit(
      [&](const auto& k) -> double {
        using T = std::decay_t<decltype(k)>;
        if constexpr (std::is_same_v<T, penalty_kind::Quadratic>) {
          const double n = l2_norm(u);
          return 0.5 * n * n;
        } else if constexpr (std::is_same_v<T, penalty_kind::PPower>) {
          double sum = 0.0;
          for (double c : u.coeffs()) sum += std::pow(std::abs(c), k.p);
          return sum / k.p;
        } else if constexpr (std::is_same_v<T, penalty_kind::BesovOne>) {
          return besov1_norm(u, k.s);
        } else {
          require_same_basis(R.tv_grid().basis(), u.basis(), "penalty_eval(TV)");
          double sum = 0.0;
          for (double d : R.tv_grid().differences(u.coeffs())) sum += std::abs(d);
          return sum;
        }
      },
      R.kind());
}

double dual_norm_S(const CoefficientField& q, double s) {
  if (q.basis().dimension() != 1)
    throw InvalidArgument("dual_norm_S: only one-dimensional bases are supported");
  double best = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i)
    best = std::max(best, std::abs(q[i]) / besov_weight(i + 1, s));
  return best;
}

double conjugate_eval(const Penalty& R, const CoefficientField& q) {
  if (R.is_quadratic()) {
    const double n = l2_norm(q);
    return 0.5 * n * n;
  }
  if (R.is_p_power()) {
    const double qq = R.conjugate_power();
    double sum = 0.0;
    for (double c : q.coeffs()) sum += std::pow(std::abs(c), qq);
    return sum / qq;
  }
  if (R.is_besov()) {
    // Indicator of the dual unit ball; the slack absorbs rounding in
    // arguments that were constructed to sit exactly on the boundary.
    return dual_norm_S(q, R.besov_s()) <= 1.0 + 1e-12 ? 0.0 : kInf;
  }
  throw InvalidArgument("conjugate_eval: not available for TV");
}

CoefficientField prox(const Penalty& R, double tau, const CoefficientField& z) {
  return prox(R, tau, z, TvProxOptions{}, nullptr);
}

CoefficientField prox(const Penalty& R, double tau, const CoefficientField& z,
                      const TvProxOptions& tv_options, TvProxState* tv_state) {
  if (!(tau > 0.0)) throw InvalidArgument("prox: tau must be > 0");
  std::vector<double> out(z.size());
  if (R.is_quadratic()) {
    for (std::size_t i = 0; i < z.size(); ++i) out[i] = z[i] / (1.0 + tau);
  } else if (R.is_p_power()) {
    const double p = R.power();
    for (std::size_t i = 0; i < z.size(); ++i)
      out[i] = sign(z[i]) * p_power_shrink(std::abs(z[i]), tau, p);
  } else if (R.is_besov()) {
    const double s = R.besov_s();
    for (std::size_t i = 0; i < z.size(); ++i) {
      const double thr = tau * besov_weight(i + 1, s);
      const double a = std::abs(z[i]);
      out[i] = a > thr ? sign(z[i]) * (a - thr) : 0.0;
    }
  } else {
    require_same_basis(R.tv_grid().basis(), z.basis(), "prox(TV)");
    return prox_tv(R.tv_grid(), tau, z, tv_options, tv_state);
  }
  return {z.basis(), std::move(out), z.tag()};
}

CoefficientField subgradient_from_optimality(const SpectralOperator& K,
                                             const CoefficientField& f,
                                             const CoefficientField& u, double alpha) {
  if (!(alpha > 0.0)) throw InvalidArgument("subgradient_from_optimality: alpha must be > 0");
  require_same_basis(K.basis(), f.basis(), "subgradient_from_optimality");
  require_same_basis(K.basis(), u.basis(), "subgradient_from_optimality");
  std::vector<double> mu(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double s = K.sigma(i);
    mu[i] = s * (f[i] - s * u[i]) / alpha;
  }
  return {u.basis(), std::move(mu), SpaceTag::Zdual};
}

double subdifferential_distance(const Penalty& R, const CoefficientField& u,
                                const CoefficientField& g) {
  require_same_basis(u.basis(), g.basis(), "subdifferential_distance");
  double sum = 0.0;
  if (R.is_quadratic() || R.is_p_power()) {
    const auto grad = duality_map_jp(R.power(), u);
    for (std::size_t i = 0; i < u.size(); ++i) sum += (g[i] - grad[i]) * (g[i] - grad[i]);
  } else if (R.is_besov()) {
    const double s = R.besov_s();
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double c = besov_weight(i + 1, s);
      const double d = u[i] != 0.0 ? g[i] - c * sign(u[i])
                                   : std::max(0.0, std::abs(g[i]) - c);
      sum += d * d;
    }
  } else {
    throw InvalidArgument("subdifferential_distance: not available for TV");
  }
  return std::sqrt(sum);
}

double bregman(const Penalty& R, const CoefficientField& u, const CoefficientField& v,
               const CoefficientField& mu_v) {
  return penalty_eval(R, u) - penalty_eval(R, v) - dual_pairing(mu_v, u - v);
}

double symmetric_bregman(const Penalty&, const CoefficientField& u,
                         const CoefficientField& v, const CoefficientField& mu_u,
                         const CoefficientField& mu_v) {
  return dual_pairing(mu_u - mu_v, u - v);
}

CoefficientField duality_map_jp(double p, const CoefficientField& u) {
  if (!(p > 1.0)) throw InvalidArgument("duality_map_jp: p must be > 1");
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    out[i] = p == 2.0 ? u[i] : sign(u[i]) * std::pow(std::abs(u[i]), p - 1.0);
  return {u.basis(), std::move(out), SpaceTag::Zdual};
}

ScalingData scaling_data(const Penalty& R) {
  if (R.is_quadratic()) return {1.0, [](double, double) { return 0.5; }};
  if (R.is_p_power()) {
    const double p = R.power();
    if (p >= 2.0) {
      const double c = std::pow(2.0, p - 2.0) / p;
      return {1.0, [c](double, double) { return c; }};
    }
    // Scalar monotonicity (j(a)-j(b))(a-b) >= (p-1)|a-b|^2 (|a|+|b|)^{p-2}
    // followed by Hoelder with exponents 2/p and 2/(2-p).
    const double lead = std::pow(p - 1.0, -0.5 * p) / p;
    return {0.5 * p, [p, lead](double ru, double rv) {
              const double nu = std::pow(p * ru, 1.0 / p);
              const double nv = std::pow(p * rv, 1.0 / p);
              return lead * std::pow(nu + nv, 0.5 * p * (2.0 - p));
            }};
  }
  return {0.0, [](double ru, double rv) { return ru + rv; }};
}

}  // namespace largenoise
