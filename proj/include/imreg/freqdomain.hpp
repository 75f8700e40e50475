#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "imreg/internal_model.hpp"

namespace imreg {

/// Gain of the shifted regulator subsystem
///   zeta' = (Phi - mu M M^T N_z) zeta - M v
/// measured as zeta^* N_z zeta / |v|^2 at frequency omega.
///
/// Away from the oscillator frequencies this is the sum-of-fractions form
///   sum_l n_zl (w^2 + w_l^2) / (w_l^2 - w^2)^2
///   ------------------------------------------------
///   1 + mu^2 (sum_l n_zl w / (w_l^2 - w^2))^2
/// with w_0 = 0. Within 1e-6 * omega_hat of some w_l the product form is used
/// instead; at w = w_l > 0 the value is 2 / (mu^2 n_zl) and at w = 0 it is
/// 1 / (mu^2 n_z0).
double transfer_gain(const RegulatorConfig& config, double omega);

/// Sum-of-fractions form only. `weights` are n_z0..n_z(n_o), `freqs` the
/// oscillator frequencies w_1..w_{n_o}.
double transfer_gain_rational(std::span<const double> weights,
                              std::span<const double> freqs, double mu, double omega);

/// Polynomial form (numerator and denominator multiplied through by
/// prod_m (w_m^2 - w^2)^2), evaluated with log-scaled products so that large
/// n_o does not overflow. Singularity-free except at w = 0.
double transfer_gain_product(std::span<const double> weights,
                             std::span<const double> freqs, double mu, double omega);

/// Independent route: dense complex solve against Phi - mu M M^T N_z.
double transfer_gain_resolvent(const OscillatorBank& bank, double mu, double omega);

/// The gain on the normalized axis x = omega / omega_hat with omega_hat = 1,
/// which is the form the quadratic bound is stated for.
double transfer_gain_normalized(const CoefficientSequence& coeffs, int n_o,
                                double mu, double x);

struct BoundConstants {
  double s = 0.0;       // n_z0/n_z1 + n_z0/(3 n_z2) + 10/3
  double a = 0.0;       // max((2 + sqrt 2) s, 25/8)
  double varpi = 0.0;   // 1 / (48 (a + 2))
  double kappa0 = 0.0;  // (7/2) n_z0
  double kappa1 = 0.0;  // 4 n_z0 / varpi^2 + 512 / (mu^2 n_z1)
};

/// Needs n_z0, n_z1 and n_z2 (canonical sequences supply them past n_o).
BoundConstants bound_constants(const CoefficientSequence& coeffs, double mu);

struct TransferCurve {
  std::vector<double> x_grid;
  std::vector<double> values;
  double kappa0 = 0.0;
  double kappa1 = 0.0;

  /// Grid indices where values[i] > kappa0 + kappa1 x^2.
  std::vector<std::size_t> bound_violations() const;
};

TransferCurve transfer_curve(const CoefficientSequence& coeffs, int n_o, double mu,
                             std::vector<double> x_grid);

inline constexpr double kDbFloor = -160.0;

struct BodeCurve {
  std::vector<double> omega_grid;
  std::vector<double> magnitude;
  std::vector<double> magnitude_db;  // floored at kDbFloor
};

/// |e / q| for e' = u + q(t) under u = -sigma e.
double closed_loop_gain_high_gain(double sigma, double omega);

/// |e / q| for e' = u + q(t) under the internal-model regulator:
///   |e|^2 = |q|^2 / ((w^2 + sigma^2) (1 + mu^2 (w sum_l n_zl / (w_l^2 - w^2))^2)).
/// Exactly zero at w = w_l, l = 0..n_o.
double closed_loop_gain_internal_model(const RegulatorConfig& config, double omega);

BodeCurve bode_high_gain(double sigma, std::vector<double> omega_grid);
BodeCurve bode_internal_model(const RegulatorConfig& config,
                              std::vector<double> omega_grid);

double to_db(double magnitude);

/// n points logarithmically spaced from lo to hi, endpoints included.
std::vector<double> log_grid(double lo, double hi, std::size_t n);

/// omega_rad_s,magnitude,magnitude_db
void write_bode_csv(std::ostream& os, const BodeCurve& curve);

}  // namespace imreg
