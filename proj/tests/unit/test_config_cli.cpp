#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "largenoise/cli.hpp"
#include "largenoise/config.hpp"
#include "largenoise/errors.hpp"

using namespace largenoise;
namespace fs = std::filesystem;

namespace {

const char* kProblem = R"(
[basis]
d = 1
N = 32

[operator]
kind = "power"
t = 1.0

[penalty]
kind = "besov1"
s = 1.5

[truth]
kind = "synthetic"
decay = 1.5   # u_l = l^{-1.5}
)";

const char* kSweep = R"(
[sweep]
deltas = [1e-1, 1e-2, 1e-3]
replicates = 3
seed = 18446744073709551615

[kappa]
setting = "besov"
s = 1.5
t = 1.0
)";

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name) : path(fs::temp_directory_path() / ("largenoise_test_" + name)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  fs::path write(const std::string& file, const std::string& text) const {
    std::ofstream(path / file) << text;
    return path / file;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Run {
  int code;
  std::string out, err;
};

Run run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("config parser subset") {
  const auto doc = ConfigDocument::parse(R"(
top = 1
[a]
x = -2.5e-3
name = "hello # not a comment"
flag = true
arr = [1, 2.5, 3e2]  # trailing comment
big = 18446744073709551615
)");
  CHECK(doc.number("top") == 1.0);
  CHECK(doc.number("a.x") == -2.5e-3);
  CHECK(doc.string("a.name") == "hello # not a comment");
  CHECK(doc.boolean("a.flag", false));
  CHECK(doc.boolean("a.missing", true));
  CHECK(doc.numbers("a.arr") == std::vector<double>{1, 2.5, 300});
  CHECK(doc.integer("a.big") == 18446744073709551615ull);
  CHECK_FALSE(doc.has("a.nothing"));
  CHECK_THROWS_AS(doc.number("a.name"), ConfigError);
  CHECK_THROWS_AS(doc.integer("a.x"), ConfigError);
  CHECK_THROWS_AS(ConfigDocument::parse("x = 1\nx = 2"), ConfigError);
  CHECK_THROWS_AS(ConfigDocument::parse("[open\n"), ConfigError);
  CHECK_THROWS_AS(ConfigDocument::parse("x = [1, 2"), ConfigError);
  CHECK_THROWS_AS(ConfigDocument::parse("just words"), ConfigError);
}

TEST_CASE("config errors name the field") {
  auto field_of = [](const std::string& text) -> std::string {
    try {
      rate_config_from(ConfigDocument::parse(text));
    } catch (const ConfigError& e) {
      return e.field();
    }
    return "";
  };
  const std::string p = kProblem;
  CHECK(field_of(p + kSweep).empty());
  CHECK(field_of(p + "[sweep]\nreplicates = 1\nseed = 1\n[kappa]\nvalue = 0.5\n") == "sweep.deltas");
  CHECK(field_of(p + "[sweep]\ndeltas = [0.1, 0.01]\nreplicates = 1\nseed = 1\n") == "kappa");
  CHECK(field_of(p + "[sweep]\ndeltas = [0.01, 0.1]\nreplicates = 1\nseed = 1\n[kappa]\nvalue = 0.5\n") ==
        "sweep.deltas");
  CHECK(field_of(p + "[sweep]\ndeltas = [0.1]\nreplicates = 0\nseed = 1\n[kappa]\nvalue = 0.5\n") ==
        "sweep.replicates");
  CHECK(field_of(p + "[sweep]\ndeltas = [0.1]\nreplicates = 1\nseed = 1\n[kappa]\nsetting = \"besov\"\ns = 0.5\nt = 1\n") ==
        "kappa");
  CHECK(field_of(p + "[sweep]\ndeltas = [0.1]\nreplicates = 1\nseed = 1\n[kappa]\nsetting = \"bogus\"\n") ==
        "kappa.setting");
  std::string bad_pen = p;
  bad_pen.replace(bad_pen.find("besov1"), 6, "l1");
  CHECK(field_of(bad_pen + kSweep) == "penalty.kind");
  std::string no_penalty = p;
  no_penalty.replace(no_penalty.find("kind = \"besov1\""), 15, "");
  CHECK(field_of(no_penalty + kSweep) == "penalty.kind");

  const auto cfg = rate_config_from(ConfigDocument::parse(p + kSweep));
  CHECK(cfg.master_seed == 18446744073709551615ull);
  CHECK(cfg.deltas.size() == 3);
  CHECK(cfg.basis.mode_count() == 32);
}

TEST_CASE("geometric delta grid from bounds") {
  const auto cfg = rate_config_from(ConfigDocument::parse(
      std::string(kProblem) +
      "[sweep]\ndelta_max = 0.1\ndelta_min = 0.001\ndelta_points = 5\nreplicates = 1\nseed = 0\n[kappa]\nvalue = 0.5\n"));
  REQUIRE(cfg.deltas.size() == 5);
  CHECK(cfg.deltas.front() == doctest::Approx(0.1));
  CHECK(cfg.deltas.back() == doctest::Approx(0.001));
  CHECK(cfg.deltas[2] == doctest::Approx(0.01));
}

TEST_CASE("cli kappa") {
  auto r = run_cli({"kappa", "--setting", "gaussian-trace"});
  CHECK(r.code == 0);
  CHECK(r.out.find("kappa = 0.6666666666666666") != std::string::npos);
  r = run_cli({"kappa", "--setting", "besov", "--s", "2", "--t", "1"});
  CHECK(r.code == 0);
  CHECK(r.out.find("kappa = 0.857142857142857") != std::string::npos);
  r = run_cli({"kappa", "--setting", "nope"});
  CHECK(r.code == 2);
  CHECK(r.err.find("--setting") != std::string::npos);
  r = run_cli({"kappa", "--setting", "besov", "--s", "0.5", "--t", "1"});
  CHECK(r.code == 1);
  CHECK(r.err.find("min(s, 2t) > 1") != std::string::npos);
  CHECK(run_cli({"kappa"}).code == 2);
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("cli missing config names the path") {
  const auto r = run_cli({"sweep", "--config", "/nonexistent/dir/ok.cfg"});
  CHECK(r.code == 2);
  CHECK(r.err.find("/nonexistent/dir/ok.cfg") != std::string::npos);
}

TEST_CASE("cli sweep is byte-identical across replays and embeds hash and seed") {
  TempDir dir("sweep");
  const auto cfg = dir.write("ok.cfg", std::string(kProblem) + kSweep);
  const auto out1 = dir.path / "run1", out2 = dir.path / "run2";
  auto r1 = run_cli({"sweep", "--config", cfg.string(), "--seed", "7", "--out", out1.string()});
  auto r2 = run_cli({"sweep", "--config", cfg.string(), "--seed", "7", "--out", out2.string(), "--threads", "3"});
  REQUIRE(r1.code == 0);
  REQUIRE(r2.code == 0);
  CHECK(slurp(out1 / "sweep.csv") == slurp(out2 / "sweep.csv"));
  CHECK(slurp(out1 / "sweep.json") == slurp(out2 / "sweep.json"));
  const auto j = nlohmann::json::parse(slurp(out1 / "sweep.json"));
  CHECK(j.contains("config_hash"));
  CHECK(j["master_seed"] == 7);
  CHECK(r1.out.find("fitted_slope = ") != std::string::npos);

  std::ostringstream verbose_err, sink;
  CHECK(cli::run({"sweep", "--config", cfg.string(), "--out", out1.string(), "--verbose"}, sink,
                 verbose_err) == 0);
  CHECK(verbose_err.str().find("delta=0.001") != std::string::npos);
}

TEST_CASE("cli solve and diagnose write reports") {
  TempDir dir("solve");
  const auto solve_cfg = dir.write(
      "solve.cfg", std::string(kProblem) + "[solve]\nalpha = 0.01\ndelta = 0.001\nseed = 3\n");
  auto r = run_cli({"solve", "--config", solve_cfg.string(), "--out", dir.path.string()});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(slurp(dir.path / "solve.json"));
  CHECK(j["seed"] == 3);
  CHECK(j.contains("config_hash"));
  CHECK(j["optimality_residual"].get<double>() <= 1e-8);
  CHECK(j["u"]["coeffs"].size() == 32);
  const std::string first = slurp(dir.path / "solve.json");
  REQUIRE(run_cli({"solve", "--config", solve_cfg.string(), "--out", dir.path.string()}).code == 0);
  CHECK(slurp(dir.path / "solve.json") == first);
  REQUIRE(run_cli({"solve", "--config", solve_cfg.string(), "--out", dir.path.string(), "--seed", "4"}).code == 0);
  CHECK(nlohmann::json::parse(slurp(dir.path / "solve.json"))["seed"] == 4);

  const auto diag_cfg = dir.write(
      "diag.cfg", std::string(kProblem) +
                      "[diagnose]\nalpha = 0.01\ndelta = 0.01\nseed = 5\nzetas = [1e-3, 3e-3, 1e-2, 3e-2]\n"
                      "betas = [1e-3, 3e-3, 1e-2, 3e-2]\n");
  r = run_cli({"diagnose", "--config", diag_cfg.string(), "--out", dir.path.string()});
  REQUIRE(r.code == 0);
  const auto d = nlohmann::json::parse(slurp(dir.path / "diagnose.json"));
  CHECK(d["seed"] == 5);
  CHECK(d["reports"].size() == 3);
  for (const auto& rep : d["reports"]) {
    CHECK(rep.contains("quantity"));
    CHECK(rep.contains("fitted_slope"));
    CHECK(rep.contains("predicted_slope"));
    CHECK(rep.contains("residual"));
  }
  CHECK(d["noise_norm"]["order"].get<double>() == doctest::Approx(-0.51));

  const auto broken = dir.write("broken.cfg", std::string(kProblem) + "[solve]\nalpha = -1\ndelta = 0\nseed = 1\n");
  r = run_cli({"solve", "--config", broken.string(), "--out", dir.path.string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("solve.alpha") != std::string::npos);
}
