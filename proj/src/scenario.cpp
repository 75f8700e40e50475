#include "imreg/scenario.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "imreg/csv.hpp"

namespace imreg {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<double> parse_list(const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  for (const auto& cell : csv::split(v)) out.push_back(csv::parse_double(cell));
  return out;
}

std::string list_str(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += csv::fmt(v[i]);
  }
  return s;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("not a boolean: '" + v + "'");
}

}  // namespace

const char* to_string(PlantKind k) {
  switch (k) {
    case PlantKind::Example:
      return "example";
    case PlantKind::LinearTest:
      return "linear";
    case PlantKind::ReducedChain:
      return "reduced";
  }
  return "unknown";
}

const char* to_string(ControllerKind k) {
  return k == ControllerKind::HighGain ? "high_gain" : "internal_model";
}

double Scenario::period() const {
  if (plant == PlantKind::Example) return 1.0;
  return 2.0 * std::numbers::pi / signal.omega;
}

void Scenario::validate() const {
  try {
    if (name.empty() || name.find_first_of("/\\ ") != std::string::npos) {
      throw std::invalid_argument("name must be a non-empty token without spaces or slashes");
    }
    if (plant != PlantKind::Example) {
      if (signal.shape != "zero" && signal.shape != "sin" && signal.shape != "cos") {
        throw std::invalid_argument("plant.signal must be zero, sin or cos");
      }
      if (!(signal.omega > 0.0)) throw std::invalid_argument("plant.omega must be positive");
    }
    if (plant == PlantKind::ReducedChain) NormalFormReduction::make(chain.r, chain.a);
    if (controller == ControllerKind::InternalModel) {
      regulator.validate();
    } else if (!(regulator.sigma > 0.0)) {
      throw std::invalid_argument("sigma must be positive");
    }
    sim.validate();
    const int n = make_plant(*this).n;
    if (static_cast<int>(sim.x0.size()) != n) {
      throw std::invalid_argument("sim.x0 has " + std::to_string(sim.x0.size()) +
                                  " entries, plant has " + std::to_string(n) + " states");
    }
    const int nz = controller == ControllerKind::InternalModel ? 2 * regulator.n_o + 1 : 0;
    if (!sim.z0.empty() && static_cast<int>(sim.z0.size()) != nz) {
      throw std::invalid_argument("sim.z0 must be empty or have " + std::to_string(nz) +
                                  " entries");
    }
    if (noise.power < 0.0) throw std::invalid_argument("noise.power must be >= 0");
    if (analysis.n_periods < 1) throw std::invalid_argument("analysis.n_periods must be >= 1");
    if (!(analysis.settle_fraction >= 0.0 && analysis.settle_fraction < 1.0)) {
      throw std::invalid_argument("analysis.settle_fraction must lie in [0, 1)");
    }
    if (analysis.max_harmonic < 0) {
      throw std::invalid_argument("analysis.max_harmonic must be >= 0");
    }
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
}

Scenario parse_scenario(std::istream& is) {
  Scenario s;
  std::string line;
  std::size_t lineno = 0;
  double epsilon = 0.5;
  double n_z0 = 2.0;
  std::vector<double> explicit_coeffs;
  std::map<std::string, std::size_t> seen;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ScenarioError("line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (!seen.emplace(key, lineno).second) {
      throw ScenarioError("line " + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    try {
      if (key == "name") {
        s.name = val;
      } else if (key == "plant") {
        if (val == "example") s.plant = PlantKind::Example;
        else if (val == "linear") s.plant = PlantKind::LinearTest;
        else if (val == "reduced") s.plant = PlantKind::ReducedChain;
        else throw std::invalid_argument("unknown plant '" + val + "'");
      } else if (key == "plant.signal") {
        s.signal.shape = val;
      } else if (key == "plant.amplitude") {
        s.signal.amplitude = csv::parse_double(val);
      } else if (key == "plant.omega") {
        s.signal.omega = csv::parse_double(val);
      } else if (key == "plant.r") {
        s.chain.r = static_cast<int>(csv::parse_int(val));
      } else if (key == "plant.a") {
        s.chain.a = parse_list(val);
      } else if (key == "controller") {
        if (val == "internal_model") s.controller = ControllerKind::InternalModel;
        else if (val == "high_gain") s.controller = ControllerKind::HighGain;
        else throw std::invalid_argument("unknown controller '" + val + "'");
      } else if (key == "regulator.sigma") {
        s.regulator.sigma = csv::parse_double(val);
      } else if (key == "regulator.mu") {
        s.regulator.mu = csv::parse_double(val);
      } else if (key == "regulator.n_o") {
        s.regulator.n_o = static_cast<int>(csv::parse_int(val));
      } else if (key == "regulator.omega_hat") {
        s.regulator.omega_hat = csv::parse_double(val);
      } else if (key == "regulator.epsilon") {
        epsilon = csv::parse_double(val);
      } else if (key == "regulator.n_z0") {
        n_z0 = csv::parse_double(val);
      } else if (key == "regulator.coefficients") {
        explicit_coeffs = parse_list(val);
        if (explicit_coeffs.empty()) throw std::invalid_argument("empty coefficient list");
      } else if (key == "regulator.frequencies") {
        s.regulator.frequency_override = parse_list(val);
      } else if (key == "sim.dt") {
        s.sim.dt = csv::parse_double(val);
      } else if (key == "sim.t_end") {
        s.sim.t_end = csv::parse_double(val);
      } else if (key == "sim.x0") {
        s.sim.x0 = parse_list(val);
      } else if (key == "sim.e0") {
        s.sim.e0 = csv::parse_double(val);
      } else if (key == "sim.z0") {
        s.sim.z0 = parse_list(val);
      } else if (key == "sim.record_stride") {
        s.sim.record_stride = static_cast<int>(csv::parse_int(val));
      } else if (key == "sim.seed") {
        s.sim.seed = csv::parse_uint(val);
      } else if (key == "noise.enabled") {
        s.noise.enabled = parse_bool(val);
      } else if (key == "noise.power") {
        s.noise.power = csv::parse_double(val);
      } else if (key == "analysis.n_periods") {
        s.analysis.n_periods = static_cast<int>(csv::parse_int(val));
      } else if (key == "analysis.settle_fraction") {
        s.analysis.settle_fraction = csv::parse_double(val);
      } else if (key == "analysis.max_harmonic") {
        s.analysis.max_harmonic = static_cast<int>(csv::parse_int(val));
      } else if (key == "analysis.noise_tail") {
        s.analysis.noise_tail = csv::parse_double(val);
      } else if (key == "outputs") {
        s.outputs = val;
      } else {
        throw std::invalid_argument("unknown key '" + key + "'");
      }
    } catch (const std::invalid_argument& e) {
      throw ScenarioError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  try {
    if (!explicit_coeffs.empty()) {
      if (seen.count("regulator.epsilon") || seen.count("regulator.n_z0")) {
        throw std::invalid_argument(
            "regulator.coefficients cannot be combined with epsilon or n_z0");
      }
      s.regulator.coefficients = CoefficientSequence::explicit_values(explicit_coeffs);
    } else {
      s.regulator.coefficients =
          CoefficientSequence::canonical(std::max(s.regulator.n_o, 0), epsilon, n_z0);
    }
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  if (!seen.count("sim.x0")) s.sim.x0.assign(static_cast<std::size_t>(make_plant(s).n), 0.0);
  s.validate();
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  return parse_scenario(in);
}

std::string serialize_scenario(const Scenario& s) {
  std::ostringstream os;
  os << "name=" << s.name << '\n';
  os << "plant=" << to_string(s.plant) << '\n';
  os << "plant.signal=" << s.signal.shape << '\n';
  os << "plant.amplitude=" << csv::fmt(s.signal.amplitude) << '\n';
  os << "plant.omega=" << csv::fmt(s.signal.omega) << '\n';
  os << "plant.r=" << s.chain.r << '\n';
  os << "plant.a=" << list_str(s.chain.a) << '\n';
  os << "controller=" << to_string(s.controller) << '\n';
  const auto& r = s.regulator;
  os << "regulator.sigma=" << csv::fmt(r.sigma) << '\n';
  os << "regulator.mu=" << csv::fmt(r.mu) << '\n';
  os << "regulator.n_o=" << r.n_o << '\n';
  os << "regulator.omega_hat=" << csv::fmt(r.omega_hat) << '\n';
  if (r.coefficients.rule() == TailRule::CanonicalEpsilon) {
    os << "regulator.epsilon=" << csv::fmt(r.coefficients.epsilon()) << '\n';
    os << "regulator.n_z0=" << csv::fmt(r.coefficients[0]) << '\n';
  } else {
    const auto v = r.coefficients.values();
    os << "regulator.coefficients=" << list_str({v.begin(), v.end()}) << '\n';
  }
  if (r.frequency_override) {
    os << "regulator.frequencies=" << list_str(*r.frequency_override) << '\n';
  }
  os << "sim.dt=" << csv::fmt(s.sim.dt) << '\n';
  os << "sim.t_end=" << csv::fmt(s.sim.t_end) << '\n';
  os << "sim.x0=" << list_str(s.sim.x0) << '\n';
  os << "sim.e0=" << csv::fmt(s.sim.e0) << '\n';
  os << "sim.z0=" << list_str(s.sim.z0) << '\n';
  os << "sim.record_stride=" << s.sim.record_stride << '\n';
  os << "sim.seed=" << s.sim.seed << '\n';
  os << "noise.enabled=" << (s.noise.enabled ? "true" : "false") << '\n';
  os << "noise.power=" << csv::fmt(s.noise.power) << '\n';
  os << "analysis.n_periods=" << s.analysis.n_periods << '\n';
  os << "analysis.settle_fraction=" << csv::fmt(s.analysis.settle_fraction) << '\n';
  os << "analysis.max_harmonic=" << s.analysis.max_harmonic << '\n';
  os << "analysis.noise_tail=" << csv::fmt(s.analysis.noise_tail) << '\n';
  os << "outputs=" << s.outputs << '\n';
  return os.str();
}

Scenario example_scenario(int n_o, double omega_hat) {
  Scenario s;
  s.name = "example_no" + std::to_string(n_o);
  s.plant = PlantKind::Example;
  s.controller = ControllerKind::InternalModel;
  s.regulator = RegulatorConfig::canonical(n_o, 2.0, 1.0, omega_hat, 0.5);
  s.sim.x0 = {1.0, -2.0};
  s.sim.e0 = 4.0;
  return s;
}

Scenario high_gain_scenario(double sigma) {
  Scenario s = example_scenario(0);
  s.name = "high_gain";
  s.controller = ControllerKind::HighGain;
  s.regulator.sigma = sigma;
  return s;
}

namespace {

std::function<double(double)> make_signal(const SignalSpec& sig) {
  const double a = sig.amplitude, w = sig.omega;
  if (sig.shape == "zero") return [](double) { return 0.0; };
  if (sig.shape == "cos") return [a, w](double t) { return a * std::cos(w * t); };
  return [a, w](double t) { return a * std::sin(w * t); };
}

}  // namespace

PlantModel make_plant(const Scenario& s) {
  switch (s.plant) {
    case PlantKind::Example:
      return example_plant();
    case PlantKind::LinearTest:
      return linear_test_plant(make_signal(s.signal), s.period());
    case PlantKind::ReducedChain: {
      ChainModel chain;
      chain.chi_dim = 0;
      chain.period = s.period();
      chain.q0 = [sig = make_signal(s.signal)](double t, std::span<const double>,
                                               std::span<const double>) { return sig(t); };
      return reduce_relative_degree(chain, s.chain.r, s.chain.a);
    }
  }
  throw ScenarioError("unknown plant kind");
}

Controller make_controller(const Scenario& s) {
  if (s.controller == ControllerKind::HighGain) return Controller::high_gain(s.regulator.sigma);
  return Controller::internal_model(s.regulator);
}

}  // namespace imreg
