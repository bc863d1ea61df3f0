#include "largenoise/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "largenoise/errors.hpp"
#include "largenoise/noise.hpp"
#include "numeric_io.hpp"

namespace largenoise {

SpectralOperator build_operator(const BasisSpec& basis, const OperatorSpec& spec) {
  if (spec.kind == "power") return SpectralOperator::power(basis, spec.t);
  if (spec.kind == "explicit") return SpectralOperator::from_multipliers(basis, spec.sigma);
  throw InvalidArgument("unknown operator kind '" + spec.kind + "'");
}

Penalty build_penalty(const BasisSpec& basis, const PenaltySpec& spec) {
  if (spec.kind == "quadratic") return Penalty::quadratic();
  if (spec.kind == "ppower") return Penalty::p_power(spec.p);
  if (spec.kind == "besov1") return Penalty::besov_one(spec.s);
  if (spec.kind == "tv") return Penalty::total_variation(basis, spec.grid_size);
  throw InvalidArgument("unknown penalty kind '" + spec.kind + "'");
}

Truth build_truth(const SpectralOperator& K, const Penalty& R, const TruthSpec& spec) {
  const BasisSpec& basis = K.basis();
  const std::size_t n = basis.mode_count();
  std::vector<double> profile(n);
  for (std::size_t l = 1; l <= n; ++l) profile[l - 1] = std::pow(static_cast<double>(l), -spec.decay);

  if (spec.kind == TruthSpec::Kind::ExactSource) {
    if (R.is_one_homogeneous())
      throw InvalidArgument("exact_source truth needs a Quadratic or PPower penalty");
    double norm = 0.0;
    for (double v : profile) norm += v * v;
    norm = std::sqrt(norm);
    for (double& v : profile) v *= spec.norm / norm;
    CoefficientField w(basis, profile, SpaceTag::Y);
    CoefficientField mu = apply(K, apply_mode::Adjoint{}, w).with_tag(SpaceTag::Zdual);
    // dR(u) = {j_p(u)}, so u = j_q(mu).
    CoefficientField u = duality_map_jp(R.conjugate_power(), mu).with_tag(SpaceTag::X);
    return {std::move(u), std::move(mu), std::move(w)};
  }

  for (double& v : profile) v *= spec.amplitude;
  CoefficientField u(basis, profile, SpaceTag::X);
  if (R.is_quadratic() || R.is_p_power()) {
    CoefficientField mu = duality_map_jp(R.power(), u);
    return {std::move(u), std::move(mu), std::nullopt};
  }
  if (R.is_besov()) {
    const double s = R.besov_s();
    std::vector<double> mu(n);
    for (std::size_t l = 1; l <= n; ++l) {
      const double c = std::pow(static_cast<double>(l), s - 0.5);
      mu[l - 1] = u[l - 1] > 0 ? c : (u[l - 1] < 0 ? -c : 0.0);
    }
    return {std::move(u), CoefficientField(basis, std::move(mu), SpaceTag::Zdual), std::nullopt};
  }
  // TV: B^T sign(B u) is a subgradient of ||B u||_1.
  const auto& grid = R.tv_grid();
  auto bu = grid.differences(u.coeffs());
  for (double& v : bu) v = v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
  return {std::move(u), CoefficientField(basis, grid.differences_adjoint(bu), SpaceTag::Zdual),
          std::nullopt};
}

void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body) {
  threads = std::max<std::size_t>(1, std::min(threads, count));
  std::atomic<std::size_t> next{0};
  std::mutex failure_mutex;
  std::size_t failed_index = count;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (i < failed_index) {
          failed_index = i;
          failure = std::current_exception();
        }
        next.store(count);
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
  std::vector<double> x, y;
  for (const auto& [d, v] : points) {
    if (!(d > 0.0) || !(v > 0.0) || !std::isfinite(d) || !std::isfinite(v))
      throw InvalidArgument("fit_rate: deltas and values must be positive");
    x.push_back(std::log(d));
    y.push_back(std::log(v));
  }
  if (x.size() < 2 || *std::max_element(x.begin(), x.end()) == *std::min_element(x.begin(), x.end()))
    throw InvalidArgument("fit_rate: need at least two distinct deltas");
  const auto fit = detail::ordinary_least_squares(x, y);
  return {fit.slope, fit.intercept, fit.residual};
}

namespace {

McEstimate mean_and_stderr(const std::vector<double>& values) {
  const double n = static_cast<double>(values.size());
  const double mean = detail::pairwise_sum(values) / n;
  if (values.size() < 2) return {mean, 0.0};
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) sq[i] = (values[i] - mean) * (values[i] - mean);
  const double var = detail::pairwise_sum(sq) / (n - 1.0);
  return {mean, std::sqrt(var / n)};
}

double median(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

nlohmann::json rate_inputs_json(const RateInputs& in) {
  return {{"setting", to_string(in.setting)}, {"r1", in.r1}, {"r2", in.r2}, {"p", in.p},
          {"m", in.m}, {"s", in.s}, {"t", in.t}, {"d", in.d}, {"eps", in.eps}};
}

}  // namespace

McEstimate mc_expectation(const std::function<double(std::uint64_t)>& evaluator,
                          std::size_t draws, std::uint64_t master_seed, std::size_t threads) {
  if (draws < 2) throw InvalidArgument("mc_expectation: draws must be >= 2");
  std::vector<double> values(draws);
  parallel_for(draws, threads,
               [&](std::size_t i) { values[i] = evaluator(derive_seed(master_seed, i)); });
  return mean_and_stderr(values);
}

nlohmann::json config_to_json(const RateExperimentConfig& cfg) {
  nlohmann::json j;
  j["basis"] = {{"d", cfg.basis.dimension()}, {"N", cfg.basis.mode_count()}};
  j["operator"] = {{"kind", cfg.op.kind}, {"t", cfg.op.t}, {"sigma", cfg.op.sigma}};
  j["penalty"] = {{"kind", cfg.penalty.kind},
                  {"p", cfg.penalty.p},
                  {"s", cfg.penalty.s},
                  {"grid_size", cfg.penalty.grid_size}};
  j["truth"] = {{"kind", cfg.truth.kind == TruthSpec::Kind::ExactSource ? "exact_source" : "synthetic"},
                {"decay", cfg.truth.decay},
                {"norm", cfg.truth.norm},
                {"amplitude", cfg.truth.amplitude}};
  j["deltas"] = cfg.deltas;
  nlohmann::json kappa;
  kappa["value"] = cfg.kappa.value ? nlohmann::json(*cfg.kappa.value) : nlohmann::json();
  kappa["predicted"] = cfg.kappa.predicted ? nlohmann::json(*cfg.kappa.predicted) : nlohmann::json();
  kappa["rule"] = rate_inputs_json(cfg.kappa.rule);
  j["kappa"] = kappa;
  j["alpha_prefactor"] = cfg.alpha_prefactor;
  j["replicates"] = cfg.replicates;
  j["master_seed"] = cfg.master_seed;
  j["solver"] = {{"tol", cfg.solver.tol},
                 {"max_iter", cfg.solver.max_iter},
                 {"accelerated", cfg.solver.accelerated},
                 {"step_factor", cfg.solver.step_factor},
                 {"iterative", cfg.solver.method == SolverMethod::Iterative},
                 {"tv_tol", cfg.solver.tv.tolerance},
                 {"tv_max_iter", cfg.solver.tv.max_iter}};
  j["source_grid"] = cfg.source_grid;
  j["check_bounds"] = cfg.check_bounds;
  return j;
}

std::string config_hash(const RateExperimentConfig& cfg) {
  return detail::hex64(detail::fnv1a(config_to_json(cfg).dump()));
}

RateReport run_rate_sweep(const RateExperimentConfig& cfg) {
  if (cfg.deltas.empty()) throw InvalidArgument("run_rate_sweep: delta grid is empty");
  for (std::size_t i = 0; i < cfg.deltas.size(); ++i) {
    if (!(cfg.deltas[i] > 0.0)) throw InvalidArgument("run_rate_sweep: deltas must be positive");
    if (i > 0 && !(cfg.deltas[i] < cfg.deltas[i - 1]))
      throw InvalidArgument("run_rate_sweep: delta grid must be strictly decreasing");
  }
  if (cfg.replicates < 1) throw InvalidArgument("run_rate_sweep: replicates must be >= 1");
  if (!(cfg.alpha_prefactor > 0.0))
    throw InvalidArgument("run_rate_sweep: alpha prefactor must be > 0");

  const SpectralOperator K = build_operator(cfg.basis, cfg.op);
  const Penalty R = build_penalty(cfg.basis, cfg.penalty);
  const Truth truth = build_truth(K, R, cfg.truth);

  RateReport report{};
  report.config_hash = config_hash(cfg);
  report.master_seed = cfg.master_seed;

  // Synthetic truths: measure r1 from the constructed subgradient and use it
  // in place of the configured value.
  RateInputs rule = cfg.kappa.rule;
  if (cfg.truth.kind == TruthSpec::Kind::Synthetic && !R.is_tv()) {
    const auto est = estimate_source_order(R, K, truth.mu, cfg.source_grid);
    report.measured_r1 = est.r_hat;
    rule.r1 = est.r_hat;
  } else if (cfg.truth.kind == TruthSpec::Kind::ExactSource) {
    report.measured_r1 = 0.0;
  }
  if (cfg.kappa.value) {
    report.kappa = *cfg.kappa.value;
    report.predicted_slope = cfg.kappa.predicted;
  } else {
    const RateRule rr = kappa_rule(rule);
    report.kappa = rr.kappa;
    report.predicted_slope = rr.predicted_exponent;
  }
  if (!(report.kappa > 0.0)) throw InvalidArgument("run_rate_sweep: kappa must be > 0");

  for (std::size_t r = 0; r < cfg.replicates; ++r)
    report.seeds.push_back(derive_seed(cfg.master_seed, r));

  const std::size_t nd = cfg.deltas.size(), nr = cfg.replicates;
  report.rows.resize(nd * nr);
  parallel_for(nd * nr, cfg.threads, [&](std::size_t task) {
    const std::size_t di = task / nr, rep = task % nr;
    const double delta = cfg.deltas[di];
    const double alpha = cfg.alpha_prefactor * std::pow(delta, report.kappa);
    const std::uint64_t seed = report.seeds[rep];
    try {
      const NoiseSample sample = sample_white_noise(cfg.basis, seed);
      const CoefficientField f = synthesize_data(K, truth.u, delta, sample);
      const MinimizerResult res = solve_variational(K, f, alpha, R, cfg.solver);
      RateRow row{};
      row.delta = delta;
      row.alpha = alpha;
      row.replicate = rep;
      row.seed = seed;
      row.bregman = symmetric_bregman(R, res.u, truth.u, res.mu, truth.mu);
      const double kd = l2_norm(apply(K, apply_mode::Forward{}, res.u - truth.u));
      row.residual = kd * kd;
      row.objective = res.objective;
      row.bound_holds = true;
      if (cfg.check_bounds) {
        const CoefficientField eta = sample.eta(K);
        for (const BoundVariant v : {BoundVariant{bound_variant::BregmanOnly{}},
                                     BoundVariant{bound_variant::WithResidual{}}}) {
          const auto [z1, z2] =
              balanced_zetas(R, K, alpha, delta, truth.mu, eta, res, truth.u, v, cfg.solver);
          const auto chk = error_bound_eval(R, K, alpha, delta, z1, z2, truth.mu, eta, res,
                                            truth.u, v, cfg.solver);
          row.bound_holds = row.bound_holds && chk.holds;
        }
      }
      report.rows[task] = row;
    } catch (const std::exception& e) {
      std::ostringstream msg;
      msg << "sweep failed at delta=" << detail::format_double(delta) << " seed=" << seed << ": "
          << e.what();
      throw Error(msg.str());
    }
  });

  std::vector<std::pair<double, double>> points;
  for (std::size_t di = 0; di < nd; ++di) {
    std::vector<double> breg(nr), resid(nr);
    std::size_t violations = 0;
    for (std::size_t rep = 0; rep < nr; ++rep) {
      const RateRow& row = report.rows[di * nr + rep];
      breg[rep] = row.bregman;
      resid[rep] = row.residual;
      if (cfg.check_bounds && !row.bound_holds) ++violations;
    }
    const McEstimate b = mean_and_stderr(breg);
    DeltaSummary s{};
    s.delta = cfg.deltas[di];
    s.alpha = report.rows[di * nr].alpha;
    s.mean_bregman = b.mean;
    s.stderr_bregman = b.stderr_mean;
    s.median_bregman = median(breg);
    s.mean_residual = detail::pairwise_sum(resid) / static_cast<double>(nr);
    s.bound_violations = violations;
    report.per_delta.push_back(s);
    report.bound_violations += violations;
    if (cfg.check_bounds) report.bound_checks += nr;
    points.emplace_back(s.delta, s.mean_bregman);
  }

  const bool positive = std::all_of(points.begin(), points.end(),
                                    [](const auto& p) { return p.second > 0.0; });
  if (nd >= 2 && positive) {
    const RateFit fit = fit_rate(points);
    report.fitted_slope = fit.slope;
    report.fit_residual = fit.residual;
    if (nd >= 3) {
      double mx = 0.0;
      for (const auto& p : points) mx += std::log(p.first);
      mx /= static_cast<double>(nd);
      double sxx = 0.0;
      for (const auto& p : points) sxx += (std::log(p.first) - mx) * (std::log(p.first) - mx);
      // fit.residual is the RMS residual; rescale to the unbiased variance.
      const double s2 = fit.residual * fit.residual * static_cast<double>(nd) /
                        static_cast<double>(nd - 2);
      report.slope_stderr = std::sqrt(s2 / sxx);
    }
  }
  return report;
}

void write_rate_csv(std::ostream& out, const RateReport& report) {
  out << "# config_hash=" << report.config_hash << " master_seed=" << report.master_seed << '\n'
      << "delta,alpha,replicate,seed,bregman,residual,objective\n";
  for (const RateRow& r : report.rows) {
    out << detail::format_double(r.delta) << ',' << detail::format_double(r.alpha) << ','
        << r.replicate << ',' << r.seed << ',' << detail::format_double(r.bregman) << ','
        << detail::format_double(r.residual) << ',' << detail::format_double(r.objective)
        << '\n';
  }
}

nlohmann::json rate_summary_json(const RateReport& report) {
  auto opt = [](const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json();
  };
  nlohmann::json j;
  j["fitted_slope"] = opt(report.fitted_slope);
  j["slope_defined"] = report.fitted_slope.has_value();
  j["predicted_slope"] = opt(report.predicted_slope);
  j["stderr"] = opt(report.slope_stderr);
  j["fit_residual"] = opt(report.fit_residual);
  j["kappa"] = report.kappa;
  j["measured_r1"] = opt(report.measured_r1);
  j["config_hash"] = report.config_hash;
  j["master_seed"] = report.master_seed;
  j["seeds"] = report.seeds;
  j["bound_checks"] = report.bound_checks;
  j["bound_violations"] = report.bound_violations;
  nlohmann::json rows = nlohmann::json::array();
  for (const DeltaSummary& s : report.per_delta) {
    rows.push_back({{"delta", s.delta},
                    {"alpha", s.alpha},
                    {"mean_bregman", s.mean_bregman},
                    {"stderr", s.stderr_bregman},
                    {"median_bregman", s.median_bregman},
                    {"mean_residual", s.mean_residual},
                    {"bound_violations", s.bound_violations}});
  }
  j["per_delta"] = rows;
  return j;
}

}  // namespace largenoise
