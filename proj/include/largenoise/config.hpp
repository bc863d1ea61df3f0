#pragma once

// TOML-style configuration files.
//
// Supported subset: [section] headers, `key = value` lines, # comments,
// numbers, "strings", true/false, and flat numeric arrays [a, b, c].
// Keys are addressed as "section.key". Scientifically meaningful knobs (delta
// grid, kappa, penalty) have no defaults and must be present.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "largenoise/experiments.hpp"

namespace largenoise {

using ConfigValue = std::variant<double, std::string, bool, std::vector<double>>;

class ConfigDocument {
 public:
  static ConfigDocument parse(std::string_view text);
  /// Throws ConfigError naming the path when the file is missing or unreadable.
  static ConfigDocument load(const std::filesystem::path& path);

  bool has(const std::string& key) const;
  double number(const std::string& key) const;
  std::optional<double> optional_number(const std::string& key) const;
  /// Non-negative integer; exact for values beyond 2^53 (parsed from the source text).
  std::uint64_t integer(const std::string& key) const;
  std::string string(const std::string& key) const;
  bool boolean(const std::string& key, bool fallback) const;
  std::vector<double> numbers(const std::string& key) const;

 private:
  struct Entry {
    ConfigValue value;
    std::string raw;
  };
  const Entry& entry(const std::string& key) const;
  std::map<std::string, Entry> entries_;
};

/// [basis] [operator] [penalty] [truth] [sweep] [kappa] [solver]
RateExperimentConfig rate_config_from(const ConfigDocument& doc);

struct ProblemConfig {
  BasisSpec basis;
  OperatorSpec op;
  PenaltySpec penalty;
  TruthSpec truth;
  SolverOptions solver;
};

/// [basis] [operator] [penalty] [truth] [solver]
ProblemConfig problem_config_from(const ConfigDocument& doc);

struct SolveConfig {
  ProblemConfig problem;
  double alpha;
  double delta;
  std::uint64_t seed;
};

/// ProblemConfig plus [solve] alpha, delta, seed.
SolveConfig solve_config_from(const ConfigDocument& doc);

struct DiagnoseConfig {
  ProblemConfig problem;
  double alpha;
  double delta;
  std::uint64_t seed;
  std::vector<double> zetas;
  std::vector<double> betas;
  double eps;
};

/// ProblemConfig plus [diagnose] alpha, delta, seed, zetas, betas, eps (default 0.01).
DiagnoseConfig diagnose_config_from(const ConfigDocument& doc);

}  // namespace largenoise
