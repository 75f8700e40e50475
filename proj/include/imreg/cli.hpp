#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "imreg/analysis.hpp"
#include "imreg/scenario.hpp"

namespace imreg::cli {

enum ExitCode : int {
  kOk = 0,
  kCheckFailed = 1,
  kUsage = 2,
  kNumerical = 3,
};

struct Overrides {
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<std::uint64_t> seed;
};

void apply(Scenario& s, const Overrides& o);

/// Simulation plus steady-state analysis of one scenario.
///
/// Noise-free runs are measured over the last analysis.n_periods periods.
/// Noisy runs use a single period picked at random (seeded by sim.seed) in the
/// last analysis.noise_tail seconds.
struct Evaluation {
  Trajectory traj;
  Norms norms;
  HarmonicSpectrum spectrum;
  double window_start = 0.0;
  double window_end = 0.0;
};

/// Throws SimulationOverflow or TrajectoryTooShort.
Evaluation evaluate(const Scenario& s);
NormsRecord norms_record(const Scenario& s, const Norms& n);

/// Returns a copy of `base` with one regulator parameter replaced. Axis is
/// sigma, n_o or omega_hat; changing n_o regenerates a canonical sequence with
/// the base epsilon and n_z0. Throws ScenarioError.
Scenario with_axis_value(const Scenario& base, const std::string& axis, double value);

/// Regulator parameters given directly on the command line.
struct RegulatorFlags {
  double sigma = 2.0;
  double mu = 1.0;
  double epsilon = 0.5;
  double omega_hat = 6.283185307179586;
  int n_o = 10;
  std::vector<double> coefficients;  // overrides the canonical sequence

  /// Not validated: verify reports bad values as failed checks.
  RegulatorConfig config() const;
};

struct ReproduceOptions {
  Overrides overrides;
  int workers = 1;
  std::string out_dir = ".";
};

int cmd_simulate(Scenario s, const std::string& out_dir, std::ostream& out,
                 std::ostream& err);
int cmd_sweep(const Scenario& base, const std::string& axis,
              const std::vector<double>& values, int workers, const std::string& out_dir,
              std::ostream& out, std::ostream& err);
/// Norms and spectrum of an existing trajectory CSV.
int cmd_analyze(const std::string& trajectory_path, double period, int n_periods,
                double settle_fraction, int max_harmonic, const std::string& out_dir,
                std::ostream& out, std::ostream& err);
int cmd_bode(const RegulatorFlags& flags, const std::string& out_dir, std::ostream& out,
             std::ostream& err);
int cmd_verify(const RegulatorFlags& flags, const std::string& out_dir, std::ostream& out,
               std::ostream& err);
/// table is one of 1, 2, fig1, fft.
int cmd_reproduce(const std::string& table, const ReproduceOptions& opts,
                  std::ostream& out, std::ostream& err);

/// Full command-line entry point. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace imreg::cli
