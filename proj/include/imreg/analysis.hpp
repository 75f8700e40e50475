#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "imreg/simulate.hpp"

namespace imreg {

class TrajectoryTooShort : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A tail segment of a trajectory spanning a whole number of plant periods.
struct SteadyWindow {
  const Trajectory* traj = nullptr;
  double period = 1.0;
  int n_periods = 1;
  std::size_t first = 0;             // index of the first sample
  std::size_t samples_per_period = 0;

  double t_start() const { return traj->times[first]; }
  double t_end() const { return traj->times[last()]; }
  std::size_t last() const { return first + samples_per_period * n_periods; }
  std::span<const double> e() const {
    return std::span<const double>(traj->e).subspan(first, last() - first + 1);
  }
  std::span<const double> t() const {
    return std::span<const double>(traj->times).subspan(first, last() - first + 1);
  }
};

/// The last n_periods * period seconds. Fails with TrajectoryTooShort when the
/// window would start before settle_fraction * (trajectory duration).
SteadyWindow steady_window(const Trajectory& traj, double period, int n_periods,
                           double settle_fraction = 0.5);

/// One period starting at a seeded uniformly chosen sample inside the last
/// `tail_span` seconds (used for the noisy runs).
SteadyWindow random_period_window(const Trajectory& traj, double period,
                                  double tail_span, std::uint64_t seed);

struct Norms {
  double sup = 0.0;          // max |e| over the window
  double mean_square = 0.0;  // (1/T) int_0^T |e|^2 dt, averaged over periods
  double rms = 0.0;          // sqrt(mean_square)
};

Norms norms(const SteadyWindow& window);

/// sup_t |e(t) - e(t - T)| inside the window.
double periodicity_residual(const SteadyWindow& window);

struct HarmonicSpectrum {
  std::vector<double> frequencies;  // rad/s
  std::vector<double> cos_coeffs;
  std::vector<double> sin_coeffs;
  std::vector<double> magnitudes;

  double max_magnitude() const;
};

/// (2/W) int e(t) {cos, sin}(w t) dt over the window by the trapezoid rule at
/// exactly the requested frequencies; (1/W) for w = 0.
HarmonicSpectrum fourier_at(const SteadyWindow& window, std::span<const double> freqs);

/// Harmonics k * 2 pi / T for k = 0..max_harmonic.
std::vector<double> harmonic_grid(double period, int max_harmonic);

/// Binned DFT of the window on the grid k * 2 pi / W, k = 0..bins-1, with
/// single-sided amplitude scaling (plot data for spectrum figures).
HarmonicSpectrum dft_spectrum(const SteadyWindow& window, std::size_t bins);

struct SigmaPoint {
  double sigma;
  double sup;
};

struct SigmaScaling {
  double psi_hat = 0.0;        // max sigma * sup
  bool monotone_decay = false; // sup strictly decreasing in sigma
};

SigmaScaling sigma_scaling_check(std::vector<SigmaPoint> points);

/// freq_rad_s,cos,sin,magnitude
void write_spectrum_csv(std::ostream& os, const HarmonicSpectrum& spectrum);

/// One row of a norms report. High-gain runs have no oscillator bank and are
/// written with n_o = -1, mu = 0 and omega_hat = 0.
struct NormsRecord {
  std::string scenario;
  double sigma = 0.0;
  double mu = 0.0;
  int n_o = -1;
  double omega_hat = 0.0;
  Norms norms;
  bool noisy = false;
};

/// scenario,sigma,mu,n_o,omega_hat,sup,inf_l2,noisy. The inf_l2 column holds
/// the RMS over one period.
void write_norms_csv(std::ostream& os, std::span<const NormsRecord> rows);

}  // namespace imreg
