#include "imreg/freqdomain.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <Eigen/LU>

#include "imreg/csv.hpp"

namespace imreg {

namespace {

constexpr double kResonanceWindow = 1e-6;

// Squared oscillator frequency for index l, with w_0 = 0.
double freq_sq(std::span<const double> freqs, std::size_t l) {
  if (l == 0) return 0.0;
  const double w = freqs[l - 1];
  return w * w;
}

void check_lengths(std::span<const double> weights, std::span<const double> freqs) {
  if (weights.size() != freqs.size() + 1) {
    throw std::invalid_argument("expected n_o + 1 weights for n_o frequencies");
  }
}

double gain_core(std::span<const double> weights, std::span<const double> freqs,
                 double mu, double omega_hat, double omega) {
  check_lengths(weights, freqs);
  omega = std::abs(omega);
  if (omega == 0.0) return 1.0 / (mu * mu * weights[0]);

  double resonant_weight = 0.0;
  bool near = omega < kResonanceWindow * omega_hat;
  for (std::size_t l = 1; l < weights.size(); ++l) {
    const double w = freqs[l - 1];
    if (omega == w) resonant_weight += weights[l];
    if (std::abs(omega - w) < kResonanceWindow * omega_hat) near = true;
  }
  if (resonant_weight > 0.0) return 2.0 / (mu * mu * resonant_weight);
  if (near) return transfer_gain_product(weights, freqs, mu, omega);
  return transfer_gain_rational(weights, freqs, mu, omega);
}

}  // namespace

double transfer_gain_rational(std::span<const double> weights,
                              std::span<const double> freqs, double mu, double omega) {
  check_lengths(weights, freqs);
  const double w2 = omega * omega;
  double num = 0.0, s = 0.0;
  for (std::size_t l = 0; l < weights.size(); ++l) {
    const double wl2 = freq_sq(freqs, l);
    const double d = wl2 - w2;
    num += weights[l] * (w2 + wl2) / (d * d);
    s += weights[l] * omega / d;
  }
  return num / (1.0 + mu * mu * s * s);
}

double transfer_gain_product(std::span<const double> weights,
                             std::span<const double> freqs, double mu, double omega) {
  check_lengths(weights, freqs);
  const std::size_t n = weights.size();
  const double w2 = omega * omega;
  if (omega == 0.0) return 1.0 / (mu * mu * weights[0]);

  // log |d_m| and sign(d_m) with d_m = w_m^2 - w^2.
  std::vector<double> logd(n);
  std::vector<int> sgn(n);
  double log_all = 0.0;
  int sign_all = 1;
  std::size_t zeros = 0, zero_at = 0;
  for (std::size_t m = 0; m < n; ++m) {
    const double d = freq_sq(freqs, m) - w2;
    sgn[m] = d < 0.0 ? -1 : 1;
    sign_all *= sgn[m];
    if (d == 0.0) {
      ++zeros;
      zero_at = m;
      logd[m] = -std::numeric_limits<double>::infinity();
    } else {
      logd[m] = std::log(std::abs(d));
      log_all += logd[m];
    }
  }
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  // log |prod_{m != l} d_m| for every l.
  std::vector<double> log_except(n);
  for (std::size_t l = 0; l < n; ++l) {
    if (zeros == 0) {
      log_except[l] = log_all - logd[l];
    } else if (zeros == 1 && l == zero_at) {
      log_except[l] = log_all;
    } else {
      log_except[l] = kNegInf;
    }
  }
  const double log_total = zeros == 0 ? log_all : kNegInf;
  const double ref = *std::max_element(log_except.begin(), log_except.end());
  if (!std::isfinite(ref)) {
    throw std::domain_error("repeated oscillator frequency at the evaluation point");
  }

  double num = 0.0, s = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    const double scale = std::exp(log_except[l] - ref);
    const int sign_except = sgn[l] * sign_all;  // sign of prod_{m != l}
    num += (freq_sq(freqs, l) + w2) * weights[l] * scale * scale;
    s += weights[l] * sign_except * scale;
  }
  const double total = std::exp(log_total - ref);
  const double den = total * total + mu * mu * w2 * s * s;
  return num / den;
}

double transfer_gain(const RegulatorConfig& config, double omega) {
  const auto freqs = config.frequencies();
  return gain_core(config.coefficients.values(), freqs, config.mu, config.omega_hat,
                   omega);
}

double transfer_gain_resolvent(const OscillatorBank& bank, double mu, double omega) {
  using Complex = std::complex<double>;
  const int d = bank.dim();
  const Eigen::MatrixXd nz = bank.n_z_dense();
  const Eigen::VectorXd m = bank.m_dense();
  const Eigen::MatrixXd a = bank.phi_dense() - mu * m * (m.transpose() * nz);
  Eigen::MatrixXcd lhs = -a.cast<Complex>();
  lhs.diagonal().array() += Complex(0.0, omega);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(lhs);
  const Eigen::VectorXcd zeta = lu.solve((-m).cast<Complex>());
  const double residual = (lhs * zeta + m.cast<Complex>()).norm();
  if (!std::isfinite(residual) || residual > 1e-6 * (1.0 + m.norm())) {
    throw std::runtime_error("resolvent solve is singular at omega = " +
                             csv::fmt(omega));
  }
  double g = 0.0;
  for (int i = 0; i < d; ++i) g += nz(i, i) * std::norm(zeta(i));
  return g;
}

double transfer_gain_normalized(const CoefficientSequence& coeffs, int n_o, double mu,
                                double x) {
  std::vector<double> weights(static_cast<std::size_t>(n_o) + 1);
  std::vector<double> freqs(static_cast<std::size_t>(n_o));
  for (std::size_t l = 0; l < weights.size(); ++l) weights[l] = coeffs.at(l);
  for (std::size_t l = 0; l < freqs.size(); ++l) freqs[l] = static_cast<double>(l + 1);
  return gain_core(weights, freqs, mu, 1.0, x);
}

BoundConstants bound_constants(const CoefficientSequence& coeffs, double mu) {
  if (!(mu > 0.0)) throw std::invalid_argument("mu must be positive");
  if (coeffs.rule() == TailRule::Explicit && coeffs.size() < 3) {
    throw std::invalid_argument("bound constants need n_z0, n_z1 and n_z2");
  }
  const double n0 = coeffs.at(0), n1 = coeffs.at(1), n2 = coeffs.at(2);
  BoundConstants b;
  b.s = n0 / n1 + n0 / (3.0 * n2) + 10.0 / 3.0;
  b.a = std::max((2.0 + std::numbers::sqrt2) * b.s, 25.0 / 8.0);
  b.varpi = 1.0 / (48.0 * (b.a + 2.0));
  b.kappa0 = 3.5 * n0;
  b.kappa1 = 4.0 * n0 / (b.varpi * b.varpi) + 512.0 / (mu * mu * n1);
  return b;
}

std::vector<std::size_t> TransferCurve::bound_violations() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < x_grid.size(); ++i) {
    const double x = x_grid[i];
    if (!(values[i] <= kappa0 + kappa1 * x * x)) out.push_back(i);
  }
  return out;
}

TransferCurve transfer_curve(const CoefficientSequence& coeffs, int n_o, double mu,
                             std::vector<double> x_grid) {
  TransferCurve c;
  const auto b = bound_constants(coeffs, mu);
  c.kappa0 = b.kappa0;
  c.kappa1 = b.kappa1;
  c.values.reserve(x_grid.size());
  for (double x : x_grid) c.values.push_back(transfer_gain_normalized(coeffs, n_o, mu, x));
  c.x_grid = std::move(x_grid);
  return c;
}

double closed_loop_gain_high_gain(double sigma, double omega) {
  return 1.0 / std::hypot(omega, sigma);
}

double closed_loop_gain_internal_model(const RegulatorConfig& config, double omega) {
  omega = std::abs(omega);
  if (omega == 0.0) return 0.0;
  const auto freqs = config.frequencies();
  const auto& w = config.coefficients;
  const double w2 = omega * omega;
  double s = -w[0] / w2;
  for (std::size_t l = 1; l < w.size(); ++l) {
    const double d = freqs[l - 1] * freqs[l - 1] - w2;
    if (d == 0.0) return 0.0;
    s += w[l] / d;
  }
  const double ims = config.mu * omega * s;
  return 1.0 / (std::hypot(omega, config.sigma) * std::sqrt(1.0 + ims * ims));
}

double to_db(double magnitude) {
  if (!(magnitude > 0.0)) return kDbFloor;
  return std::max(kDbFloor, 20.0 * std::log10(magnitude));
}

namespace {

template <typename Gain>
BodeCurve make_bode(std::vector<double> grid, Gain&& gain) {
  BodeCurve c;
  c.magnitude.reserve(grid.size());
  c.magnitude_db.reserve(grid.size());
  for (double w : grid) {
    const double g = gain(w);
    c.magnitude.push_back(g);
    c.magnitude_db.push_back(to_db(g));
  }
  c.omega_grid = std::move(grid);
  return c;
}

}  // namespace

BodeCurve bode_high_gain(double sigma, std::vector<double> omega_grid) {
  return make_bode(std::move(omega_grid),
                   [sigma](double w) { return closed_loop_gain_high_gain(sigma, w); });
}

BodeCurve bode_internal_model(const RegulatorConfig& config,
                              std::vector<double> omega_grid) {
  config.validate();
  return make_bode(std::move(omega_grid), [&config](double w) {
    return closed_loop_gain_internal_model(config, w);
  });
}

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) {
    throw std::invalid_argument("log grid needs 0 < lo < hi and at least 2 points");
  }
  std::vector<double> g(n);
  const double a = std::log10(lo), b = std::log10(hi);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

void write_bode_csv(std::ostream& os, const BodeCurve& c) {
  os << "omega_rad_s,magnitude,magnitude_db\n";
  for (std::size_t i = 0; i < c.omega_grid.size(); ++i) {
    csv::write_row(os, {c.omega_grid[i], c.magnitude[i], c.magnitude_db[i]});
  }
}

}  // namespace imreg
