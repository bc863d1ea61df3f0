#pragma once

// Monte-Carlo convergence-rate sweeps: truth + noise -> solve with
// alpha = c delta^kappa -> symmetric Bregman risk -> log-log slope.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "largenoise/operators.hpp"
#include "largenoise/regularizers.hpp"
#include "largenoise/solvers.hpp"
#include "largenoise/source_analysis.hpp"
#include "largenoise/spectral.hpp"

namespace largenoise {

struct OperatorSpec {
  std::string kind = "power";  // "power" | "explicit"
  double t = 1.0;
  std::vector<double> sigma;
};

struct PenaltySpec {
  std::string kind;  // "quadratic" | "ppower" | "besov1" | "tv"
  double p = 2.0;
  double s = 1.0;
  std::size_t grid_size = 0;
};

struct TruthSpec {
  enum class Kind { ExactSource, Synthetic };
  Kind kind = Kind::ExactSource;
  /// Exact source: w_l proportional to l^{-decay}, scaled to ||w|| = norm.
  /// Synthetic: u_l = amplitude * l^{-decay}.
  double decay = 0.5;
  double norm = 1.0;
  double amplitude = 1.0;
};

struct KappaSpec {
  /// Explicit kappa when set; otherwise kappa_rule(rule).
  std::optional<double> value;
  /// Predicted slope to report with an explicit kappa (unset -> not reported).
  std::optional<double> predicted;
  RateInputs rule;
};

struct RateExperimentConfig {
  BasisSpec basis;
  OperatorSpec op;
  PenaltySpec penalty;
  TruthSpec truth;
  std::vector<double> deltas;
  KappaSpec kappa;
  double alpha_prefactor = 1.0;
  std::size_t replicates = 1;
  std::uint64_t master_seed = 0;
  SolverOptions solver;
  /// beta grid for measuring r1 of synthetic truths.
  std::vector<double> source_grid = {1e-4, 3e-4, 1e-3, 3e-3, 1e-2, 3e-2, 1e-1};
  bool check_bounds = true;
  /// Execution only; never affects results.
  std::size_t threads = 1;
};

SpectralOperator build_operator(const BasisSpec& basis, const OperatorSpec& spec);
Penalty build_penalty(const BasisSpec& basis, const PenaltySpec& spec);

struct Truth {
  CoefficientField u;
  CoefficientField mu;                 // selected subgradient mu_dag
  std::optional<CoefficientField> w;   // source element, exact-source truths only
};

Truth build_truth(const SpectralOperator& K, const Penalty& R, const TruthSpec& spec);

struct RateRow {
  double delta;
  double alpha;
  std::size_t replicate;
  std::uint64_t seed;
  double bregman;
  double residual;
  double objective;
  bool bound_holds;
};

struct DeltaSummary {
  double delta;
  double alpha;
  double mean_bregman;
  double stderr_bregman;
  double median_bregman;
  double mean_residual;
  std::size_t bound_violations;
};

struct RateReport {
  std::vector<RateRow> rows;
  std::vector<DeltaSummary> per_delta;
  std::optional<double> fitted_slope;  // unset when fewer than two delta points
  std::optional<double> slope_stderr;  // needs three or more points
  std::optional<double> fit_residual;
  std::optional<double> predicted_slope;
  double kappa;
  std::optional<double> measured_r1;
  std::string config_hash;
  std::uint64_t master_seed;
  std::vector<std::uint64_t> seeds;  // one per replicate, shared across deltas
  std::size_t bound_checks = 0;
  std::size_t bound_violations = 0;
};

/// Canonical JSON of every result-affecting field (threads excluded).
nlohmann::json config_to_json(const RateExperimentConfig& cfg);
std::string config_hash(const RateExperimentConfig& cfg);

RateReport run_rate_sweep(const RateExperimentConfig& cfg);

/// A '# config_hash=... master_seed=...' line, then columns
/// delta, alpha, replicate, seed, bregman, residual, objective.
void write_rate_csv(std::ostream& out, const RateReport& report);
nlohmann::json rate_summary_json(const RateReport& report);

struct RateFit {
  double slope;
  double intercept;
  double residual;  // RMS of the log residuals
};

/// OLS of log(value) on log(delta).
RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

struct McEstimate {
  double mean;
  double stderr_mean;
};

/// Mean and standard error of evaluator(seed_i), seed_i = derive_seed(master, i).
McEstimate mc_expectation(const std::function<double(std::uint64_t)>& evaluator,
                          std::size_t draws, std::uint64_t master_seed,
                          std::size_t threads = 1);

/// Runs body(i) for i in [0, count) on up to `threads` workers. The first
/// failing index (lowest) is rethrown after all workers stop.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace largenoise
