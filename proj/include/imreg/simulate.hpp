#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "imreg/internal_model.hpp"
#include "imreg/plants.hpp"

namespace imreg {

/// Raised when a state component leaves [-1e12, 1e12] or becomes non-finite.
class SimulationOverflow : public std::runtime_error {
 public:
  SimulationOverflow(double t, const std::string& what)
      : std::runtime_error(what), time_(t) {}
  double time() const { return time_; }

 private:
  double time_;
};

inline constexpr double kOverflowThreshold = 1e12;

/// Either the plain high-gain law u = -sigma (e + v), or the internal-model
/// regulator driven by e + v.
class Controller {
 public:
  enum class Kind { HighGain, InternalModel };

  static Controller high_gain(double sigma);
  static Controller internal_model(const RegulatorConfig& config);

  Kind kind() const { return kind_; }
  double sigma() const { return sigma_; }
  int state_dim() const { return kind_ == Kind::HighGain ? 0 : bank_.dim(); }
  const OscillatorBank& bank() const { return bank_; }
  const RegulatorConfig& config() const { return config_; }

  /// Control input for measured error e + v.
  double output(std::span<const double> z, double e, double v) const;
  /// z' for measured error e + v.
  void rhs(std::span<const double> z, double e, double v, std::span<double> dz) const;

 private:
  Kind kind_ = Kind::HighGain;
  double sigma_ = 0.0;
  RegulatorConfig config_;
  OscillatorBank bank_;
};

struct SimConfig {
  double dt = 1e-4;
  double t_end = 150.0;
  std::vector<double> x0;
  double e0 = 0.0;
  std::vector<double> z0;  // empty means zero
  int record_stride = 10;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const SimConfig&) const = default;
};

struct NoiseModel {
  bool enabled = false;
  double power = 1e-3;

  bool operator==(const NoiseModel&) const = default;
};

/// Second-order section y = (b0 + b1 z^-1 + b2 z^-2) / (1 + a1 z^-1 + a2 z^-2) x,
/// transposed direct form II.
class Biquad {
 public:
  Biquad(double b0, double b1, double b2, double a1, double a2)
      : b0_(b0), b1_(b1), b2_(b2), a1_(a1), a2_(a2) {}

  /// Bilinear transform of (n2 s^2 + n1 s + n0) / (d2 s^2 + d1 s + d0) at step dt.
  static Biquad tustin(double n2, double n1, double n0, double d2, double d1,
                       double d0, double dt);

  double process(double x);
  void reset() { s1_ = s2_ = 0.0; }

  double b0() const { return b0_; }
  double b1() const { return b1_; }
  double b2() const { return b2_; }
  double a1() const { return a1_; }
  double a2() const { return a2_; }

 private:
  double b0_, b1_, b2_, a1_, a2_;
  double s1_ = 0.0, s2_ = 0.0;
};

/// H(s) = s^2 / (s^2 + 3 s + 2) discretized at dt.
Biquad measurement_noise_filter(double dt);

/// Gaussian white samples of variance power / dt, coloured by the high-pass
/// filter. One sample per integration step.
class NoiseSource {
 public:
  NoiseSource(double power, double dt, std::uint64_t seed);
  double next();

 private:
  double stddev_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  Biquad filter_;
};

std::vector<double> make_noise(double power, double dt, std::size_t steps,
                               std::uint64_t seed);

/// Packed closed-loop state (x, e, z).
struct LoopState {
  double t = 0.0;
  std::vector<double> x;
  double e = 0.0;
  std::vector<double> z;
};

/// One classical RK4 step of x' = f, e' = q + u, z' = Phi z + Gamma (e + v),
/// with v held over the step. Throws SimulationOverflow on blow-up.
LoopState step_rk4(const PlantModel& plant, const Controller& controller,
                   const LoopState& state, double dt, double v);

struct Trajectory {
  int n = 0;   // plant state dimension
  int nz = 0;  // controller state dimension
  double sample_dt = 0.0;
  std::vector<double> times;
  std::vector<double> x;  // samples x n, row-major
  std::vector<double> e;
  std::vector<double> z;  // samples x nz, row-major
  std::vector<double> u;
  std::vector<double> v;

  std::size_t size() const { return times.size(); }
  double x_at(std::size_t sample, int i) const { return x[sample * n + i]; }
  double z_at(std::size_t sample, int i) const { return z[sample * nz + i]; }
};

/// Integrates from t = 0 to t_end. Identical inputs give bit-identical output.
Trajectory run(const PlantModel& plant, const Controller& controller,
               const SimConfig& sim, const NoiseModel& noise);

/// Header `t,e,u,v,x1..xn,z1..zk`, 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& is);

/// Classical RK4 for a generic autonomous-in-form system y' = rhs(t, y).
/// Used for open-loop checks.
template <typename Rhs>
void rk4_integrate(Rhs&& rhs, double t0, std::vector<double>& y, double dt,
                   std::size_t steps) {
  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
  double t = t0;
  for (std::size_t s = 0; s < steps; ++s) {
    rhs(t, y, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    rhs(t + 0.5 * dt, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    rhs(t + 0.5 * dt, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + dt * k3[i];
    rhs(t + dt, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) {
      y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    t = t0 + static_cast<double>(s + 1) * dt;
  }
}

}  // namespace imreg
