// Thin Python surface over the core library. Fields cross the boundary as
// plain float sequences; reports come back as dicts.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "largenoise/cli.hpp"
#include "largenoise/config.hpp"
#include "largenoise/errors.hpp"
#include "largenoise/experiments.hpp"
#include "largenoise/noise.hpp"
#include "largenoise/operators.hpp"
#include "largenoise/regularizers.hpp"
#include "largenoise/solvers.hpp"
#include "largenoise/source_analysis.hpp"
#include "largenoise/spectral.hpp"

namespace py = pybind11;
using namespace largenoise;

namespace {

std::vector<double> to_list(const CoefficientField& u) { return {u.coeffs().begin(), u.coeffs().end()}; }

CoefficientField field(const SpectralOperator& K, const std::vector<double>& v) {
  return {K.basis(), v};
}

py::object json_to_py(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Variational regularization under large (white) noise on diagonal models";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  auto invalid = py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<BasisMismatch>(m, "BasisMismatch", invalid.ptr());
  py::register_exception<HypothesisViolation>(m, "HypothesisViolation", invalid.ptr());
  py::register_exception<ConvergenceError>(m, "ConvergenceError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());

  py::class_<BasisSpec>(m, "Basis")
      .def(py::init<int, std::size_t>(), py::arg("d"), py::arg("N"))
      .def_property_readonly("d", &BasisSpec::dimension)
      .def_property_readonly("N", &BasisSpec::mode_count)
      .def("weights", &BasisSpec::weights);

  py::class_<SpectralOperator>(m, "Operator")
      .def_static("power", &SpectralOperator::power, py::arg("basis"), py::arg("t"))
      .def_static(
          "from_multipliers",
          [](const BasisSpec& b, const std::vector<double>& s) {
            return SpectralOperator::from_multipliers(b, s);
          },
          py::arg("basis"), py::arg("sigma"))
      .def_property_readonly("basis", &SpectralOperator::basis)
      .def("sigma", [](const SpectralOperator& K) {
        std::vector<double> s(K.basis().mode_count());
        for (std::size_t i = 0; i < s.size(); ++i) s[i] = K.sigma(i);
        return s;
      });

  py::class_<Penalty>(m, "Penalty")
      .def_static("quadratic", &Penalty::quadratic)
      .def_static("p_power", &Penalty::p_power, py::arg("p"))
      .def_static("besov_one", &Penalty::besov_one, py::arg("s"))
      .def_static("total_variation", &Penalty::total_variation, py::arg("basis"),
                  py::arg("grid_size"))
      .def("__repr__", &Penalty::describe);

  m.def(
      "penalty_eval",
      [](const Penalty& R, const SpectralOperator& K, const std::vector<double>& u) {
        return penalty_eval(R, field(K, u));
      },
      py::arg("penalty"), py::arg("op"), py::arg("u"));
  m.def(
      "prox",
      [](const Penalty& R, double tau, const SpectralOperator& K, const std::vector<double>& z) {
        return to_list(prox(R, tau, field(K, z)));
      },
      py::arg("penalty"), py::arg("tau"), py::arg("op"), py::arg("z"));

  m.def(
      "solve",
      [](const SpectralOperator& K, const std::vector<double>& f, double alpha, const Penalty& R,
         double tol, std::size_t max_iter, bool accelerated) {
        SolverOptions opts;
        opts.tol = tol;
        opts.max_iter = max_iter;
        opts.accelerated = accelerated;
        const auto r = solve_variational(K, field(K, f), alpha, R, opts);
        py::dict out;
        out["u"] = to_list(r.u);
        out["mu"] = to_list(r.mu);
        out["objective"] = r.objective;
        out["iterations"] = r.iterations;
        out["optimality_residual"] = r.optimality_residual;
        return out;
      },
      py::arg("op"), py::arg("f"), py::arg("alpha"), py::arg("penalty"), py::arg("tol") = 1e-8,
      py::arg("max_iter") = 50000, py::arg("accelerated") = false);

  m.def("effective_dimension", &effective_dimension, py::arg("op"), py::arg("beta"));
  m.def(
      "e_value",
      [](const Penalty& R, const SpectralOperator& K, double alpha, double zeta,
         const std::vector<double>& theta) { return e_value(R, K, alpha, zeta, field(K, theta)); },
      py::arg("penalty"), py::arg("op"), py::arg("alpha"), py::arg("zeta"), py::arg("theta"));

  m.def(
      "balance_zeta",
      [](double a, double b, double s, double t) {
        const auto z = balance_zeta(a, b, s, t);
        return py::make_tuple(z.zeta_star, z.minimum);
      },
      py::arg("a"), py::arg("b"), py::arg("s"), py::arg("t"));

  m.def(
      "kappa",
      [](const std::string& setting, double r1, double r2, double p, double m_exp, double s,
         double t, double d, double eps) {
        RateInputs in;
        in.setting = rate_setting_from_string(setting);
        in.r1 = r1;
        in.r2 = r2;
        in.p = p;
        in.m = m_exp;
        in.s = s;
        in.t = t;
        in.d = d;
        in.eps = eps;
        const auto rule = kappa_rule(in);
        return py::make_tuple(rule.kappa, rule.predicted_exponent);
      },
      py::arg("setting"), py::arg("r1") = 0.0, py::arg("r2") = 0.0, py::arg("p") = 2.0,
      py::arg("m") = 1.0, py::arg("s") = 0.0, py::arg("t") = 0.0, py::arg("d") = 1.0,
      py::arg("eps") = 0.01);

  m.def(
      "white_noise",
      [](const BasisSpec& b, std::uint64_t seed) { return to_list(sample_white_noise(b, seed).n); },
      py::arg("basis"), py::arg("seed"));
  m.def("derive_seed", &derive_seed, py::arg("master"), py::arg("stream"));

  m.def(
      "fit_rate",
      [](const std::vector<std::pair<double, double>>& pts) {
        const auto f = fit_rate(pts);
        return py::make_tuple(f.slope, f.intercept, f.residual);
      },
      py::arg("points"));

  m.def(
      "run_sweep",
      [](const std::string& config_text, std::size_t threads) {
        auto cfg = rate_config_from(ConfigDocument::parse(config_text));
        cfg.threads = threads;
        const RateReport rep = [&] {
          py::gil_scoped_release release;
          return run_rate_sweep(cfg);
        }();
        std::ostringstream csv;
        write_rate_csv(csv, rep);
        return py::make_tuple(json_to_py(rate_summary_json(rep)), csv.str());
      },
      py::arg("config_text"), py::arg("threads") = 1,
      "Runs a rate sweep from config text; returns (summary dict, CSV text).");

  m.def(
      "cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = cli::run(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command-line frontend in-process: (exit code, stdout, stderr).");
}
