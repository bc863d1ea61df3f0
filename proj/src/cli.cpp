#include "largenoise/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "largenoise/config.hpp"
#include "largenoise/errors.hpp"
#include "largenoise/experiments.hpp"
#include "largenoise/noise.hpp"
#include "largenoise/source_analysis.hpp"
#include "numeric_io.hpp"

namespace largenoise::cli {

namespace fs = std::filesystem;

namespace {

struct CommonFlags {
  std::string config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::size_t threads = 1;
  bool verbose = false;
};

void add_common(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("--config", flags.config, "Config file")->required();
  sub->add_option("--out", flags.out, "Output directory");
  sub->add_option("--seed", flags.seed, "Seed override");
  sub->add_option("--threads", flags.threads, "Worker threads")->check(CLI::PositiveNumber);
  sub->add_flag("--verbose", flags.verbose, "Log one line per delta");
}

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw ConfigError(dir, "output directory cannot be created");
  return fs::path(dir);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path.string());
  f << text;
}

std::string dump(const nlohmann::json& j) { return j.dump(2) + "\n"; }

std::string hash_of(const nlohmann::json& j) { return detail::hex64(detail::fnv1a(j.dump())); }

nlohmann::json problem_json(const ProblemConfig& p) {
  RateExperimentConfig tmp;
  tmp.basis = p.basis;
  tmp.op = p.op;
  tmp.penalty = p.penalty;
  tmp.truth = p.truth;
  tmp.solver = p.solver;
  nlohmann::json j = config_to_json(tmp);
  for (const char* key : {"deltas", "kappa", "alpha_prefactor", "replicates", "master_seed",
                          "source_grid", "check_bounds"})
    j.erase(key);
  return j;
}

int cmd_solve(const CommonFlags& flags, std::ostream& out) {
  SolveConfig cfg = solve_config_from(ConfigDocument::load(flags.config));
  if (flags.seed) cfg.seed = *flags.seed;
  const fs::path dir = prepare_out(flags.out);

  const auto& p = cfg.problem;
  const SpectralOperator K = build_operator(p.basis, p.op);
  const Penalty R = build_penalty(p.basis, p.penalty);
  const Truth truth = build_truth(K, R, p.truth);
  const NoiseSample sample = sample_white_noise(p.basis, cfg.seed);
  const CoefficientField f = synthesize_data(K, truth.u, cfg.delta, sample);
  const MinimizerResult res = solve_variational(K, f, cfg.alpha, R, p.solver);

  nlohmann::json cj = problem_json(p);
  cj["solve"] = {{"alpha", cfg.alpha}, {"delta", cfg.delta}, {"seed", cfg.seed}};
  const double kd = l2_norm(apply(K, apply_mode::Forward{}, res.u - truth.u));
  nlohmann::json j;
  j["config_hash"] = hash_of(cj);
  j["seed"] = cfg.seed;
  j["config"] = cj;
  j["objective"] = res.objective;
  j["iterations"] = res.iterations;
  j["optimality_residual"] = res.optimality_residual;
  j["bregman"] = symmetric_bregman(R, res.u, truth.u, res.mu, truth.mu);
  j["residual"] = kd * kd;
  j["u"] = to_json(res.u);
  j["mu"] = to_json(res.mu);
  write_text(dir / "solve.json", dump(j));
  out << "wrote " << (dir / "solve.json").string() << "\n";
  return 0;
}

nlohmann::json curve_report(const std::string& quantity, const std::vector<double>& grid,
                            const std::vector<double>& values,
                            std::optional<double> predicted) {
  nlohmann::json r;
  r["quantity"] = quantity;
  r["grid"] = grid;
  r["values"] = values;
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (values[i] > 0.0) pts.emplace_back(grid[i], values[i]);
  if (pts.size() >= 2) {
    const RateFit fit = fit_rate(pts);
    r["fitted_slope"] = fit.slope;
    r["residual"] = fit.residual;
  } else {
    r["fitted_slope"] = nullptr;
    r["residual"] = nullptr;
  }
  r["predicted_slope"] = predicted ? nlohmann::json(*predicted) : nlohmann::json();
  return r;
}

int cmd_diagnose(const CommonFlags& flags, std::ostream& out) {
  DiagnoseConfig cfg = diagnose_config_from(ConfigDocument::load(flags.config));
  if (flags.seed) cfg.seed = *flags.seed;
  const fs::path dir = prepare_out(flags.out);

  const auto& p = cfg.problem;
  const SpectralOperator K = build_operator(p.basis, p.op);
  const Penalty R = build_penalty(p.basis, p.penalty);
  const Truth truth = build_truth(K, R, p.truth);
  const NoiseSample sample = sample_white_noise(p.basis, cfg.seed);
  const CoefficientField eta = sample.eta(K);

  std::vector<double> e_src, e_noise;
  for (double z : cfg.zetas) {
    e_src.push_back(e_value(R, K, cfg.alpha, z, truth.mu, p.solver));
    e_noise.push_back(e_value(R, K, cfg.delta, z, eta, p.solver));
  }
  nlohmann::json reports = nlohmann::json::array();
  reports.push_back(curve_report("e_value(mu_dag) vs zeta", cfg.zetas, e_src, std::nullopt));
  std::optional<double> noise_pred;
  if (R.is_besov() && p.op.kind == "power")
    noise_pred = -2.0 / (2.0 * R.besov_s() + 2.0 * p.op.t - 1.0);
  reports.push_back(curve_report("e_value(eta) vs zeta", cfg.zetas, e_noise, noise_pred));
  if (!R.is_tv() && cfg.betas.size() >= 4) {
    const auto est = estimate_source_order(R, K, truth.mu, cfg.betas);
    nlohmann::json r = curve_report("source functional(mu_dag) vs beta", est.grid, est.values,
                                    std::nullopt);
    r["r_hat"] = est.r_hat;
    reports.push_back(r);
  }

  nlohmann::json cj = problem_json(p);
  cj["diagnose"] = {{"alpha", cfg.alpha}, {"delta", cfg.delta}, {"seed", cfg.seed},
                    {"zetas", cfg.zetas}, {"betas", cfg.betas}, {"eps", cfg.eps}};
  nlohmann::json j;
  j["config_hash"] = hash_of(cj);
  j["seed"] = cfg.seed;
  j["config"] = cj;
  const double order = -0.5 * p.basis.dimension() - cfg.eps;
  j["noise_norm"] = {{"order", order}, {"value", sobolev_norm(sample.n, order)}};
  j["reports"] = reports;
  write_text(dir / "diagnose.json", dump(j));
  out << "wrote " << (dir / "diagnose.json").string() << "\n";
  return 0;
}

int cmd_sweep(const CommonFlags& flags, std::ostream& out, std::ostream& err) {
  RateExperimentConfig cfg = rate_config_from(ConfigDocument::load(flags.config));
  if (flags.seed) cfg.master_seed = *flags.seed;
  cfg.threads = flags.threads;
  const fs::path dir = prepare_out(flags.out);

  const RateReport report = run_rate_sweep(cfg);
  std::ostringstream csv;
  write_rate_csv(csv, report);
  nlohmann::json j = rate_summary_json(report);
  j["config"] = config_to_json(cfg);
  write_text(dir / "sweep.csv", csv.str());
  write_text(dir / "sweep.json", dump(j));
  if (flags.verbose) {
    for (const DeltaSummary& s : report.per_delta)
      err << "delta=" << detail::format_double(s.delta) << " alpha=" << detail::format_double(s.alpha)
          << " mean_bregman=" << detail::format_double(s.mean_bregman)
          << " stderr=" << detail::format_double(s.stderr_bregman) << "\n";
  }
  out << "fitted_slope = "
      << (report.fitted_slope ? nlohmann::json(*report.fitted_slope).dump() : "undefined")
      << "\npredicted_slope = "
      << (report.predicted_slope ? nlohmann::json(*report.predicted_slope).dump() : "n/a")
      << "\nwrote " << (dir / "sweep.csv").string() << " and " << (dir / "sweep.json").string()
      << "\n";
  return 0;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Variational regularization under large noise"};
  app.require_subcommand(1);

  CommonFlags solve_flags, diag_flags, sweep_flags;
  auto* solve = app.add_subcommand("solve", "Solve one instance and write solve.json");
  add_common(solve, solve_flags);
  auto* diagnose = app.add_subcommand("diagnose", "Source-analysis report (diagnose.json)");
  add_common(diagnose, diag_flags);
  auto* sweep = app.add_subcommand("sweep", "Monte-Carlo rate sweep (sweep.csv, sweep.json)");
  add_common(sweep, sweep_flags);

  auto* kappa = app.add_subcommand("kappa", "Print the parameter-choice rule");
  std::string setting;
  RateInputs rin;
  kappa->add_option("--setting", setting, "one-homog | p-homog | quadratic | gaussian-trace | "
                                          "gaussian-eigen | besov | tv")
      ->required();
  kappa->add_option("--r1", rin.r1);
  kappa->add_option("--r2", rin.r2);
  kappa->add_option("--p", rin.p);
  kappa->add_option("--m", rin.m);
  kappa->add_option("--s", rin.s);
  kappa->add_option("--t", rin.t);
  kappa->add_option("--d", rin.d);
  kappa->add_option("--eps", rin.eps);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*solve) return cmd_solve(solve_flags, out);
    if (*diagnose) return cmd_diagnose(diag_flags, out);
    if (*sweep) return cmd_sweep(sweep_flags, out, err);
    try {
      rin.setting = rate_setting_from_string(setting);
    } catch (const InvalidArgument& e) {
      throw ConfigError("--setting", e.what());
    }
    const RateRule rule = kappa_rule(rin);
    out << "setting = " << to_string(rule.setting) << "\n"
        << "r1 = " << nlohmann::json(rule.r1).dump() << "\n"
        << "r2 = " << nlohmann::json(rule.r2).dump() << "\n"
        << "kappa = " << nlohmann::json(rule.kappa).dump() << "\n"
        << "predicted_exponent = " << nlohmann::json(rule.predicted_exponent).dump() << "\n";
    return 0;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const HypothesisViolation& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv;
  argv.push_back("largenoise");
  for (const auto& a : args) argv.push_back(a.c_str());
  return run(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace largenoise::cli
