#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "imreg/internal_model.hpp"
#include "imreg/plants.hpp"
#include "imreg/simulate.hpp"

namespace imreg {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class PlantKind { Example, LinearTest, ReducedChain };
enum class ControllerKind { HighGain, InternalModel };

/// Exogenous drift for the linear test plant, and q0 for the reduced chain:
/// amplitude * {0, sin, cos}(omega t).
struct SignalSpec {
  std::string shape = "sin";  // zero | sin | cos
  double amplitude = 1.0;
  double omega = 6.283185307179586;

  bool operator==(const SignalSpec&) const = default;
};

struct ChainSpec {
  int r = 2;
  std::vector<double> a{1.0};

  bool operator==(const ChainSpec&) const = default;
};

struct AnalysisSpec {
  int n_periods = 20;
  double settle_fraction = 0.5;
  int max_harmonic = 10;
  double noise_tail = 30.0;  // seconds searched for the random noisy period

  bool operator==(const AnalysisSpec&) const = default;
};

/// A complete simulation job. Stored as flat `key=value` lines with dotted
/// section prefixes, e.g.
///
///   plant=example
///   controller=internal_model
///   regulator.sigma=2
///   regulator.n_o=4
///   sim.x0=1,-2
struct Scenario {
  std::string name = "scenario";
  PlantKind plant = PlantKind::Example;
  SignalSpec signal;
  ChainSpec chain;
  ControllerKind controller = ControllerKind::InternalModel;
  RegulatorConfig regulator;
  SimConfig sim;
  NoiseModel noise;
  AnalysisSpec analysis;
  std::string outputs = ".";

  /// Revalidates every nested invariant. Throws ScenarioError.
  void validate() const;
  double period() const;

  bool operator==(const Scenario&) const = default;
};

Scenario parse_scenario(std::istream& is);
Scenario load_scenario(const std::string& path);
std::string serialize_scenario(const Scenario& s);

/// Reference setup: example plant, x(0) = (1, -2), e(0) = 4, z(0) = 0,
/// sigma = 2, mu = 1, eps = 0.5, omega_hat = 2 pi, 150 s at dt = 1e-4.
Scenario example_scenario(int n_o, double omega_hat = 6.283185307179586);
Scenario high_gain_scenario(double sigma);

PlantModel make_plant(const Scenario& s);
Controller make_controller(const Scenario& s);

const char* to_string(PlantKind k);
const char* to_string(ControllerKind k);

}  // namespace imreg
