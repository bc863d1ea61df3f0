#include "largenoise/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "largenoise/errors.hpp"

namespace largenoise {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

bool parse_number(const std::string& text, double& out) {
  if (text.empty()) return false;
  const char* begin = text.c_str();
  char* end = nullptr;
  errno = 0;
  out = std::strtod(begin, &end);
  return errno == 0 && end == begin + text.size() && std::isfinite(out);
}

ConfigValue parse_value(const std::string& text, const std::string& where) {
  if (text.empty()) throw ConfigError(where, "missing value");
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"')
      throw ConfigError(where, "unterminated string");
    return text.substr(1, text.size() - 2);
  }
  if (text == "true") return true;
  if (text == "false") return false;
  if (text.front() == '[') {
    if (text.back() != ']') throw ConfigError(where, "unterminated array");
    std::vector<double> values;
    const std::string body = trim(std::string_view(text).substr(1, text.size() - 2));
    if (body.empty()) return values;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
      double v;
      if (!parse_number(trim(item), v))
        throw ConfigError(where, "array entries must be numbers, got '" + trim(item) + "'");
      values.push_back(v);
    }
    return values;
  }
  double v;
  if (!parse_number(text, v)) throw ConfigError(where, "cannot parse value '" + text + "'");
  return v;
}

const char* type_name(const ConfigValue& v) {
  switch (v.index()) {
    case 0: return "number";
    case 1: return "string";
    case 2: return "boolean";
    default: return "array";
  }
}

}  // namespace

ConfigDocument ConfigDocument::parse(std::string_view text) {
  ConfigDocument doc;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string where = "line " + std::to_string(line_no);
    const std::string content = trim(strip_comment(line));
    if (content.empty()) continue;
    if (content.front() == '[' && content.find('=') == std::string::npos) {
      if (content.back() != ']') throw ConfigError(where, "malformed section header");
      section = trim(std::string_view(content).substr(1, content.size() - 2));
      if (section.empty()) throw ConfigError(where, "empty section name");
      continue;
    }
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError(where, "expected key = value");
    const std::string key = trim(std::string_view(content).substr(0, eq));
    if (key.empty()) throw ConfigError(where, "empty key");
    const std::string full = section.empty() ? key : section + "." + key;
    const std::string raw = trim(std::string_view(content).substr(eq + 1));
    if (doc.entries_.count(full)) throw ConfigError(full, "duplicate key");
    doc.entries_[full] = Entry{parse_value(raw, full), raw};
  }
  return doc;
}

ConfigDocument ConfigDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool ConfigDocument::has(const std::string& key) const { return entries_.count(key) > 0; }

const ConfigDocument::Entry& ConfigDocument::entry(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(key, "required field is missing");
  return it->second;
}

double ConfigDocument::number(const std::string& key) const {
  const Entry& e = entry(key);
  if (const double* v = std::get_if<double>(&e.value)) return *v;
  throw ConfigError(key, std::string("expected a number, got ") + type_name(e.value));
}

std::optional<double> ConfigDocument::optional_number(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return number(key);
}

std::uint64_t ConfigDocument::integer(const std::string& key) const {
  const Entry& e = entry(key);
  if (!std::holds_alternative<double>(e.value))
    throw ConfigError(key, std::string("expected an integer, got ") + type_name(e.value));
  const std::string& raw = e.raw;
  if (raw.empty() || raw.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError(key, "expected a non-negative integer, got '" + raw + "'");
  errno = 0;
  const unsigned long long v = std::strtoull(raw.c_str(), nullptr, 10);
  if (errno == ERANGE) throw ConfigError(key, "integer out of range");
  return v;
}

std::string ConfigDocument::string(const std::string& key) const {
  const Entry& e = entry(key);
  if (const auto* v = std::get_if<std::string>(&e.value)) return *v;
  throw ConfigError(key, std::string("expected a string, got ") + type_name(e.value));
}

bool ConfigDocument::boolean(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const Entry& e = entry(key);
  if (const bool* v = std::get_if<bool>(&e.value)) return *v;
  throw ConfigError(key, std::string("expected true/false, got ") + type_name(e.value));
}

std::vector<double> ConfigDocument::numbers(const std::string& key) const {
  const Entry& e = entry(key);
  if (const auto* v = std::get_if<std::vector<double>>(&e.value)) return *v;
  throw ConfigError(key, std::string("expected an array, got ") + type_name(e.value));
}

namespace {

// Re-raises library argument errors against the config field they came from.
template <class F>
auto with_field(const std::string& field, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw ConfigError(field, e.what());
  }
}

BasisSpec basis_from(const ConfigDocument& doc) {
  const auto d = doc.integer("basis.d");
  const auto n = doc.integer("basis.N");
  return with_field("basis", [&] { return BasisSpec(static_cast<int>(d), n); });
}

OperatorSpec operator_from(const ConfigDocument& doc, const BasisSpec& basis) {
  OperatorSpec op;
  op.kind = doc.string("operator.kind");
  if (op.kind == "power") {
    op.t = doc.number("operator.t");
  } else if (op.kind == "explicit") {
    op.sigma = doc.numbers("operator.sigma");
  } else {
    throw ConfigError("operator.kind", "must be \"power\" or \"explicit\"");
  }
  with_field("operator", [&] { return build_operator(basis, op); });
  return op;
}

PenaltySpec penalty_from(const ConfigDocument& doc, const BasisSpec& basis) {
  PenaltySpec pen;
  pen.kind = doc.string("penalty.kind");
  if (pen.kind == "ppower") {
    pen.p = doc.number("penalty.p");
  } else if (pen.kind == "besov1") {
    pen.s = doc.number("penalty.s");
  } else if (pen.kind == "tv") {
    pen.grid_size = doc.integer("penalty.grid_size");
  } else if (pen.kind != "quadratic") {
    throw ConfigError("penalty.kind", "must be quadratic, ppower, besov1 or tv");
  }
  with_field("penalty", [&] { return build_penalty(basis, pen); });
  return pen;
}

TruthSpec truth_from(const ConfigDocument& doc) {
  TruthSpec t;
  const std::string kind = doc.string("truth.kind");
  if (kind == "exact_source")
    t.kind = TruthSpec::Kind::ExactSource;
  else if (kind == "synthetic")
    t.kind = TruthSpec::Kind::Synthetic;
  else
    throw ConfigError("truth.kind", "must be \"exact_source\" or \"synthetic\"");
  t.decay = doc.number("truth.decay");
  t.norm = doc.optional_number("truth.norm").value_or(1.0);
  t.amplitude = doc.optional_number("truth.amplitude").value_or(1.0);
  return t;
}

SolverOptions solver_from(const ConfigDocument& doc) {
  SolverOptions s;
  s.tol = doc.optional_number("solver.tol").value_or(s.tol);
  if (doc.has("solver.max_iter")) s.max_iter = doc.integer("solver.max_iter");
  s.accelerated = doc.boolean("solver.accelerated", false);
  if (doc.boolean("solver.iterative", false)) s.method = SolverMethod::Iterative;
  s.tv.tolerance = doc.optional_number("solver.tv_tol").value_or(s.tv.tolerance);
  if (doc.has("solver.tv_max_iter")) s.tv.max_iter = doc.integer("solver.tv_max_iter");
  if (!(s.tol > 0.0)) throw ConfigError("solver.tol", "must be > 0");
  return s;
}

RateInputs rule_from(const ConfigDocument& doc) {
  RateInputs in;
  in.setting = with_field("kappa.setting",
                          [&] { return rate_setting_from_string(doc.string("kappa.setting")); });
  in.r1 = doc.optional_number("kappa.r1").value_or(0.0);
  in.r2 = doc.optional_number("kappa.r2").value_or(0.0);
  in.p = doc.optional_number("kappa.p").value_or(2.0);
  in.m = doc.optional_number("kappa.m").value_or(1.0);
  in.s = doc.optional_number("kappa.s").value_or(0.0);
  in.t = doc.optional_number("kappa.t").value_or(0.0);
  in.d = doc.optional_number("kappa.d").value_or(1.0);
  in.eps = doc.optional_number("kappa.eps").value_or(0.01);
  return in;
}

}  // namespace

ProblemConfig problem_config_from(const ConfigDocument& doc) {
  ProblemConfig p;
  p.basis = basis_from(doc);
  p.op = operator_from(doc, p.basis);
  p.penalty = penalty_from(doc, p.basis);
  p.truth = truth_from(doc);
  p.solver = solver_from(doc);
  return p;
}

RateExperimentConfig rate_config_from(const ConfigDocument& doc) {
  const ProblemConfig p = problem_config_from(doc);
  RateExperimentConfig cfg;
  cfg.basis = p.basis;
  cfg.op = p.op;
  cfg.penalty = p.penalty;
  cfg.truth = p.truth;
  cfg.solver = p.solver;

  if (doc.has("sweep.deltas")) {
    cfg.deltas = doc.numbers("sweep.deltas");
  } else if (doc.has("sweep.delta_max") || doc.has("sweep.delta_min")) {
    const double hi = doc.number("sweep.delta_max");
    const double lo = doc.number("sweep.delta_min");
    const auto n = doc.integer("sweep.delta_points");
    if (!(hi > lo && lo > 0.0)) throw ConfigError("sweep.delta_max", "need delta_max > delta_min > 0");
    if (n < 1) throw ConfigError("sweep.delta_points", "must be >= 1");
    for (std::uint64_t i = 0; i < n; ++i) {
      const double frac = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      cfg.deltas.push_back(hi * std::pow(lo / hi, frac));
    }
  } else {
    throw ConfigError("sweep.deltas", "required field is missing (or give delta_max/delta_min/delta_points)");
  }
  if (cfg.deltas.empty()) throw ConfigError("sweep.deltas", "must not be empty");
  for (std::size_t i = 0; i < cfg.deltas.size(); ++i) {
    if (!(cfg.deltas[i] > 0.0)) throw ConfigError("sweep.deltas", "entries must be positive");
    if (i > 0 && !(cfg.deltas[i] < cfg.deltas[i - 1]))
      throw ConfigError("sweep.deltas", "must be strictly decreasing");
  }
  cfg.replicates = doc.integer("sweep.replicates");
  if (cfg.replicates < 1) throw ConfigError("sweep.replicates", "must be >= 1");
  cfg.master_seed = doc.integer("sweep.seed");
  cfg.alpha_prefactor = doc.optional_number("sweep.alpha_prefactor").value_or(1.0);
  if (!(cfg.alpha_prefactor > 0.0)) throw ConfigError("sweep.alpha_prefactor", "must be > 0");
  cfg.check_bounds = doc.boolean("sweep.check_bounds", true);
  if (doc.has("sweep.source_grid")) cfg.source_grid = doc.numbers("sweep.source_grid");

  if (doc.has("kappa.value")) {
    cfg.kappa.value = doc.number("kappa.value");
    if (!(*cfg.kappa.value > 0.0 && *cfg.kappa.value <= 1.0))
      throw ConfigError("kappa.value", "must lie in (0, 1]");
    cfg.kappa.predicted = doc.optional_number("kappa.predicted");
    if (doc.has("kappa.setting")) cfg.kappa.rule = rule_from(doc);
  } else if (doc.has("kappa.setting")) {
    cfg.kappa.rule = rule_from(doc);
    with_field("kappa", [&] { return kappa_rule(cfg.kappa.rule); });
  } else {
    throw ConfigError("kappa", "required: set kappa.setting or kappa.value");
  }
  return cfg;
}

SolveConfig solve_config_from(const ConfigDocument& doc) {
  SolveConfig s{problem_config_from(doc), doc.number("solve.alpha"), doc.number("solve.delta"),
                doc.integer("solve.seed")};
  if (!(s.alpha > 0.0)) throw ConfigError("solve.alpha", "must be > 0");
  if (!(s.delta >= 0.0)) throw ConfigError("solve.delta", "must be >= 0");
  return s;
}

DiagnoseConfig diagnose_config_from(const ConfigDocument& doc) {
  DiagnoseConfig c{problem_config_from(doc),
                   doc.number("diagnose.alpha"),
                   doc.number("diagnose.delta"),
                   doc.integer("diagnose.seed"),
                   doc.numbers("diagnose.zetas"),
                   doc.numbers("diagnose.betas"),
                   doc.optional_number("diagnose.eps").value_or(0.01)};
  if (!(c.alpha > 0.0)) throw ConfigError("diagnose.alpha", "must be > 0");
  if (!(c.delta > 0.0)) throw ConfigError("diagnose.delta", "must be > 0");
  if (c.zetas.size() < 2) throw ConfigError("diagnose.zetas", "need at least two values");
  for (double z : c.zetas)
    if (!(z > 0.0)) throw ConfigError("diagnose.zetas", "entries must be positive");
  if (!(c.eps > 0.0)) throw ConfigError("diagnose.eps", "must be > 0");
  return c;
}

}  // namespace largenoise
