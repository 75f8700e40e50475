#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "imreg/cli.hpp"
#include "imreg/freqdomain.hpp"
#include "imreg/verify.hpp"

namespace py = pybind11;
using namespace imreg;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<double> to_matrix(const std::vector<double>& v, std::size_t rows, int cols) {
  py::array_t<double> a({static_cast<py::ssize_t>(rows), static_cast<py::ssize_t>(cols)});
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

py::dict evaluate(const Scenario& s) {
  cli::Evaluation ev;
  {
    py::gil_scoped_release release;
    ev = cli::evaluate(s);
  }
  const auto& tr = ev.traj;
  py::dict d;
  d["t"] = to_array(tr.times);
  d["e"] = to_array(tr.e);
  d["u"] = to_array(tr.u);
  d["v"] = to_array(tr.v);
  d["x"] = to_matrix(tr.x, tr.size(), tr.n);
  d["z"] = to_matrix(tr.z, tr.size(), tr.nz);
  d["sup"] = ev.norms.sup;
  d["l2"] = ev.norms.rms;
  d["mean_square"] = ev.norms.mean_square;
  d["harmonic_freqs"] = to_array(ev.spectrum.frequencies);
  d["harmonic_magnitudes"] = to_array(ev.spectrum.magnitudes);
  d["window"] = py::make_tuple(ev.window_start, ev.window_end);
  return d;
}

std::tuple<int, std::string, std::string> run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "imreg");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

PYBIND11_MODULE(_imreg, m) {
  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);

  py::class_<RegulatorConfig>(m, "RegulatorConfig")
      .def(py::init([](int n_o, double sigma, double mu, double omega_hat, double epsilon) {
             return RegulatorConfig::canonical(n_o, sigma, mu, omega_hat, epsilon);
           }),
           py::arg("n_o") = 0, py::arg("sigma") = 2.0, py::arg("mu") = 1.0,
           py::arg("omega_hat") = 6.283185307179586, py::arg("epsilon") = 0.5)
      .def_readonly("n_o", &RegulatorConfig::n_o)
      .def_readwrite("sigma", &RegulatorConfig::sigma)
      .def_readwrite("mu", &RegulatorConfig::mu)
      .def_readwrite("omega_hat", &RegulatorConfig::omega_hat)
      .def_property_readonly("coefficients",
                             [](const RegulatorConfig& c) {
                               const auto v = c.coefficients.values();
                               return std::vector<double>(v.begin(), v.end());
                             })
      .def("frequencies", &RegulatorConfig::frequencies);

  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("name", &Scenario::name)
      .def_readwrite("regulator", &Scenario::regulator)
      .def_property(
          "t_end", [](const Scenario& s) { return s.sim.t_end; },
          [](Scenario& s, double v) { s.sim.t_end = v; })
      .def_property(
          "dt", [](const Scenario& s) { return s.sim.dt; },
          [](Scenario& s, double v) { s.sim.dt = v; })
      .def_property(
          "seed", [](const Scenario& s) { return s.sim.seed; },
          [](Scenario& s, std::uint64_t v) { s.sim.seed = v; })
      .def_property(
          "noise_power", [](const Scenario& s) { return s.noise.enabled ? s.noise.power : 0.0; },
          [](Scenario& s, double p) { s.noise = {p > 0.0, p > 0.0 ? p : s.noise.power}; })
      .def("period", &Scenario::period)
      .def("serialize", [](const Scenario& s) { return serialize_scenario(s); });

  m.def("parse_scenario", [](const std::string& text) {
    std::istringstream is(text);
    return parse_scenario(is);
  });
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("example_scenario", &example_scenario, py::arg("n_o"),
        py::arg("omega_hat") = 6.283185307179586);
  m.def("high_gain_scenario", &high_gain_scenario, py::arg("sigma"));
  m.def("simulate", &evaluate, py::arg("scenario"));

  m.def("transfer_gain", &transfer_gain, py::arg("config"), py::arg("omega"));
  m.def("transfer_gain_resolvent", [](const RegulatorConfig& c, double w) {
    return transfer_gain_resolvent(build_bank(c), c.mu, w);
  });
  m.def("bound_constants", [](const RegulatorConfig& c) {
    const auto b = bound_constants(c.coefficients, c.mu);
    py::dict d;
    d["kappa0"] = b.kappa0;
    d["kappa1"] = b.kappa1;
    return d;
  });
  m.def("certify", [](const RegulatorConfig& c) {
    const auto r = certify(c);
    py::dict d;
    d["passed"] = r.passed();
    d["worst_eig_real"] = r.worst_eig_real;
    py::dict checks;
    for (const auto& ch : r.checks) checks[py::str(ch.name)] = ch.pass;
    d["checks"] = checks;
    return d;
  });
  m.def("bode", [](const RegulatorConfig& c, const std::vector<double>& grid) {
    return py::make_tuple(to_array(bode_high_gain(c.sigma, grid).magnitude),
                          to_array(bode_internal_model(c, grid).magnitude));
  });
  m.def("log_grid", &log_grid);
  m.def("run_cli", &run_cli, py::arg("args"));
}
